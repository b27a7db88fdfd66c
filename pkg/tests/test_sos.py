"""SOS path: problem assembly, the SDP kernel, and certificate checking."""

import numpy as np
import pytest

from ldpcdesign.certify import min_normalized_slack
from ldpcdesign.lp import SolveRequest, solve_semi_infinite
from ldpcdesign.polynomials import Polynomial, poly_from_edge_coeffs
from ldpcdesign.sos import (
    SOSCertificate, build_sos_problem, certificate_min_eigenvalue,
    check_certificate, solve_sdp)

RHO_X = poly_from_edge_coeffs({2: 1.0})
RHO_X3 = poly_from_edge_coeffs({4: 1.0})


def _gram_poly(G):
    """Coefficients of b(x)^T G b(x) with b the monomial basis."""
    s = G.shape[0]
    coeffs = np.zeros(2 * s - 1)
    for i in range(s):
        for j in range(s):
            coeffs[i + j] += G[i, j]
    return coeffs


def _interval_sos_poly(m, G0, G1):
    """q from the two-block interval representation at degree m."""
    q = np.zeros(m + 1)
    if m % 2 == 0:
        p0 = _gram_poly(G0)
        q[: p0.size] += p0
        if G1 is not None and G1.size:
            p1 = np.convolve([0.0, 1.0, -1.0], _gram_poly(G1))
            q[: p1.size] += p1
    else:
        p0 = np.convolve([0.0, 1.0], _gram_poly(G0))
        p1 = np.convolve([1.0, -1.0], _gram_poly(G1))
        q[: p0.size] += p0
        q[: p1.size] += p1
    return q


def test_problem_degree_bookkeeping():
    prob = build_sos_problem(
        SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=1.0, d_v=6))
    assert prob.q_degree == 14
    assert prob.gram_sizes == (8, 7)
    assert prob.degrees == tuple(range(2, 7))


def test_problem_affine_constant_carries_alpha():
    # q(0) = alpha - sum_i h_{i,0} lambda_i: the alpha term of alpha*x
    # survives the division by x as the constant coefficient.
    prob = build_sos_problem(
        SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=0.7, d_v=6))
    assert prob.alpha == 0.7
    lam = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    q0 = prob.alpha - float(prob.h_matrix[0] @ lam)
    # h_{2,0} = (g_2/x)(0) = 0.9 for rho = x^3, eps = 0.3.
    assert q0 == pytest.approx(0.7 - 0.9, abs=1e-12)


def test_solve_pinned_single_variable():
    sol, cert = solve_sdp(build_sos_problem(
        SolveRequest(rho=RHO_X, epsilon=0.5, alpha=1.0, d_v=2)))
    assert sol.status == "optimal"
    assert sol.lambda_coeffs[2] == pytest.approx(1.0, abs=1e-8)
    assert sol.objective == pytest.approx(0.5, abs=1e-7)
    # q(x) = 1 - 0.5*lambda_2 is the constant 0.5; its certificate is a
    # 1x1 Gram matrix carrying that value.
    assert cert.gram_blocks[0].shape == (1, 1)
    assert cert.gram_blocks[0][0, 0] == pytest.approx(0.5, abs=1e-6)


def test_solve_pinned_cubic():
    sol, _ = solve_sdp(build_sos_problem(
        SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=1.0, d_v=2)))
    assert sol.status == "optimal"
    assert sol.lambda_coeffs[2] == pytest.approx(1.0, abs=1e-8)
    assert sol.objective == pytest.approx(0.5, abs=1e-7)


def test_solve_matches_lp_path():
    req = SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=1.0, d_v=6)
    sol, cert = solve_sdp(build_sos_problem(req))
    lp_res = solve_semi_infinite(req)
    assert sol.status == "optimal"
    rate_sdp = 1.0 - RHO_X3.integral01() / sum(
        c / i for i, c in sol.lambda_coeffs.items())
    assert rate_sdp == pytest.approx(lp_res.rate, abs=1e-3)
    assert cert.matching_residual <= 1e-8
    assert cert.min_eigenvalue >= -1e-8


def test_solve_below_floor_infeasible():
    sol, cert = solve_sdp(build_sos_problem(
        SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=0.05, d_v=6)))
    assert sol.status == "infeasible"
    assert cert is None
    assert sol.lambda_coeffs == {}


def test_solution_soundness_and_duality_gap():
    for alpha in (0.3, 0.6, 1.0):
        req = SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=alpha, d_v=6)
        sol, cert = solve_sdp(build_sos_problem(req))
        assert sol.status == "optimal"
        assert sol.duality_gap <= 1e-7 * (1.0 + abs(sol.objective))
        margin = min_normalized_slack(sol.lambda_coeffs, RHO_X3, 0.3, alpha)
        assert margin.min_slack >= -1e-8


def test_solver_deterministic():
    req = SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=0.5, d_v=6)
    sol1, cert1 = solve_sdp(build_sos_problem(req))
    sol2, cert2 = solve_sdp(build_sos_problem(req))
    assert sol1.lambda_coeffs == sol2.lambda_coeffs
    assert np.array_equal(cert1.gram_blocks[0], cert2.gram_blocks[0])


def test_check_certificate_perfect_square():
    G0 = np.array([[0.0, 0.0], [0.0, 1.0]])
    G1 = np.zeros((1, 1))
    cert = SOSCertificate(gram_blocks=(G0, G1), matching_residual=0.0,
                          min_eigenvalue=0.0)
    q = Polynomial([0.0, 0.0, 1.0])  # x^2
    assert check_certificate(q, cert) == pytest.approx(0.0, abs=1e-15)


def test_check_certificate_constant():
    cert = SOSCertificate(gram_blocks=(np.array([[1.0]]),),
                          matching_residual=0.0, min_eigenvalue=1.0)
    assert check_certificate(Polynomial([1.0]), cert) == 0.0


def test_check_certificate_dimension_mismatch():
    # Blocks of sizes (3, 1) fit no interval representation.
    cert = SOSCertificate(gram_blocks=(np.eye(3), np.eye(1)),
                          matching_residual=0.0, min_eigenvalue=1.0)
    with pytest.raises(ValueError):
        check_certificate(Polynomial([0.0, 0.0, 1.0]), cert)
    # Degree-4 blocks cannot certify a degree-7 polynomial.
    cert = SOSCertificate(gram_blocks=(np.eye(3), np.eye(2)),
                          matching_residual=0.0, min_eigenvalue=1.0)
    with pytest.raises(ValueError):
        check_certificate(Polynomial([0.0] * 7 + [1.0]), cert)


def test_check_certificate_detects_perturbation():
    req = SolveRequest(rho=RHO_X3, epsilon=0.3, alpha=0.5, d_v=6)
    prob = build_sos_problem(req)
    sol, cert = solve_sdp(prob)
    lam = np.array([sol.lambda_coeffs.get(i, 0.0) for i in prob.degrees])
    q_coeffs = np.zeros(prob.q_degree + 1)
    q_coeffs[0] = prob.alpha
    q_coeffs -= prob.h_matrix @ lam
    q = Polynomial(q_coeffs)
    assert check_certificate(q, cert) <= 1e-8
    G0 = cert.gram_blocks[0].copy()
    G0[1, 1] += 1e-3
    bad = SOSCertificate(gram_blocks=(G0,) + cert.gram_blocks[1:],
                         matching_residual=0.0, min_eigenvalue=0.0)
    assert check_certificate(q, bad) >= 1e-4


def test_round_trip_random_explicit_sos():
    rng = np.random.default_rng(6)
    for _ in range(100):
        m = int(rng.integers(1, 13))
        if m % 2 == 0:
            s0, s1 = m // 2 + 1, m // 2
        else:
            s0 = s1 = (m + 1) // 2
        A0 = rng.standard_normal((s0, s0))
        G0 = A0 @ A0.T + 1e-6 * np.eye(s0)
        if s1 > 0:
            A1 = rng.standard_normal((s1, s1))
            G1 = A1 @ A1.T + 1e-6 * np.eye(s1)
        else:
            G1 = None
        q = Polynomial(_interval_sos_poly(m, G0, G1))
        blocks = (G0,) if G1 is None else (G0, G1)
        cert = SOSCertificate(gram_blocks=blocks, matching_residual=0.0,
                              min_eigenvalue=0.0)
        assert check_certificate(q, cert) <= 1e-10
        assert certificate_min_eigenvalue(cert) >= 0.0
