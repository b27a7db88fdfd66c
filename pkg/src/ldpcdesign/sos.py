"""SDP path: sum-of-squares certificates for the fast-convergence constraint.

The slack polynomial p(x) = alpha*x - sum_i lambda_i g_i(x) vanishes at 0,
so nonnegativity on [0, 1] is imposed on q = p / x through the two-block
interval representation

    deg q even:  q = sigma0 + x(1-x) sigma1
    deg q odd:   q = x sigma0 + (1-x) sigma1

with each sigma a sum of squares represented by a symmetric Gram matrix
whose anti-diagonal sums reproduce its coefficients.  The resulting small
block-diagonal SDP (Gram blocks, the lambda scalars, and their unit upper
bounds) is solved by an in-repo primal-dual interior-point kernel built on
a homogeneous self-dual embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp import SolveRequest
from .polynomials import Polynomial, constraint_basis

MATCHING_TOL = 1e-8
EIG_TOL = 1e-8
MAX_IPM_ITERS = 500
PHASE1_TOL = 1e-7

# The interior-point kernel runs in extended precision.  Near a degenerate
# optimum the Schur system's condition number exceeds 1/eps for float64 and
# the search direction degrades into noise before the residuals reach
# tolerance; the extra mantissa bits of longdouble keep the last few
# iterations productive.  numpy.linalg does not accept longdouble, so the
# tiny dense factorizations involved are written out below.
_LD = np.longdouble


def _cholesky_ld(M):
    """Lower Cholesky factor in extended precision; raises LinAlgError."""
    n = M.shape[0]
    L = np.zeros((n, n), dtype=_LD)
    for j in range(n):
        s = M[j, j] - np.dot(L[j, :j], L[j, :j])
        if s <= 0.0:
            raise np.linalg.LinAlgError("matrix is not positive definite")
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            L[i, j] = (M[i, j] - np.dot(L[i, :j], L[j, :j])) / L[j, j]
    return L


def _inv_from_cholesky(L):
    """Inverse of L L^T given the lower factor L."""
    n = L.shape[0]
    Li = np.zeros((n, n), dtype=_LD)
    for i in range(n):
        Li[i, i] = 1.0 / L[i, i]
        for j in range(i):
            Li[i, j] = -np.dot(L[i, j:i], Li[j:i, j]) / L[i, i]
    return Li.T @ Li


def _solve_dense_ld(A, rhs):
    """Gaussian elimination with partial pivoting in extended precision."""
    A = np.array(A, dtype=_LD)
    rhs = np.array(rhs, dtype=_LD)
    n = A.shape[0]
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if A[p, k] == 0.0:
            raise np.linalg.LinAlgError("singular system")
        if p != k:
            A[[k, p]] = A[[p, k]]
            rhs[[k, p]] = rhs[[p, k]]
        mult = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(mult, A[k, k:])
        rhs[k + 1:] -= mult * rhs[k]
    x = np.zeros(n, dtype=_LD)
    for k in range(n - 1, -1, -1):
        x[k] = (rhs[k] - np.dot(A[k, k + 1:], x[k + 1:])) / A[k, k]
    return x


@dataclass(frozen=True)
class SOSProblem:
    degrees: tuple  # variable-node degrees 2..d_v
    h_matrix: np.ndarray  # (m+1) x (d_v-1); column i holds coeffs of g_i/x
    alpha: float
    q_degree: int  # m
    gram_sizes: tuple  # (s0, s1); s1 may be 0
    objective: np.ndarray  # 1/i per lambda_i
    rho: Polynomial
    epsilon: float


@dataclass(frozen=True)
class SOSCertificate:
    gram_blocks: tuple  # one or two symmetric ndarray blocks
    matching_residual: float
    min_eigenvalue: float


@dataclass(frozen=True)
class SDPSolution:
    lambda_coeffs: dict
    objective: float
    duality_gap: float
    iterations: int
    status: str  # optimal | infeasible | iteration-limit


def _gram_sizes(m: int) -> tuple[int, int]:
    if m % 2 == 0:
        return m // 2 + 1, m // 2
    return (m + 1) // 2, (m + 1) // 2


def _anti_diag(size: int, level: int) -> np.ndarray:
    """Symmetric 0/1 matrix selecting entries with i + j = level."""
    A = np.zeros((size, size))
    if size > 0:
        for i in range(size):
            j = level - i
            if 0 <= j < size:
                A[i, j] = 1.0
    return A


def _reconstruction_maps(m: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-coefficient linear maps from the two Gram blocks to coeff l of q."""
    s0, s1 = _gram_sizes(m)
    maps0, maps1 = [], []
    for l in range(m + 1):
        if m % 2 == 0:
            maps0.append(_anti_diag(s0, l))
            maps1.append(_anti_diag(s1, l - 1) - _anti_diag(s1, l - 2))
        else:
            maps0.append(_anti_diag(s0, l - 1))
            maps1.append(_anti_diag(s1, l) - _anti_diag(s1, l - 1))
    return maps0, maps1


def build_sos_problem(req: SolveRequest) -> SOSProblem:
    basis = constraint_basis(req.rho, req.epsilon, req.d_v)
    hs = [g.quotient_by_x() for g in basis]
    m = max(h.degree for h in hs)
    H = np.zeros((m + 1, len(hs)))
    for col, h in enumerate(hs):
        H[: h.coeffs.size, col] = h.coeffs
    degrees = tuple(range(2, req.d_v + 1))
    objective = np.array([1.0 / i for i in degrees])
    return SOSProblem(
        degrees=degrees, h_matrix=H, alpha=req.alpha, q_degree=m,
        gram_sizes=_gram_sizes(m), objective=objective,
        rho=req.rho, epsilon=req.epsilon,
    )


# --- generic small block-diagonal SDP kernel ------------------------------


class _BlockSDP:
    """min sum<C_b, X_b>  s.t.  sum_b <A_kb, X_b> = b_k,  X_b >= 0 (PSD)."""

    def __init__(self, sizes, C, A, b):
        self.sizes = list(sizes)
        self.C = [np.asarray(M, dtype=_LD) for M in C]
        self.A = [[np.asarray(M, dtype=_LD) for M in row] for row in A]
        self.b = np.asarray(b, dtype=_LD)

    def _inner(self, Ms, Ns):
        return sum(np.sum(M * N) for M, N in zip(Ms, Ns))

    def _apply(self, X) -> np.ndarray:
        return np.array([self._inner(row, X) for row in self.A])

    def _adjoint(self, y):
        out = [np.zeros((s, s), dtype=_LD) for s in self.sizes]
        for k, row in enumerate(self.A):
            for bidx, M in enumerate(row):
                out[bidx] += y[k] * M
        return out

    def _feasibility_correction(self, dX, rp, X):
        """Adjust dX so A(dX) = rp holds to roundoff.

        The Newton direction satisfies this only up to the (often huge)
        condition number of the Schur system; without restoration the primal
        residual stops contracting.  The adjustment is least-norm in the
        X-scaled metric (dX += X W X), which keeps it compatible with the
        cone: directions where X is nearly singular are barely perturbed.
        """
        K = self.b.size
        nb = len(self.sizes)
        AX = [[self.A[k][bi] @ X[bi] for bi in range(nb)] for k in range(K)]
        M = np.empty((K, K), dtype=_LD)
        for k in range(K):
            for h in range(k, K):
                M[k, h] = M[h, k] = sum(np.sum(AX[k][bi] * AX[h][bi].T)
                                        for bi in range(nb))
        for _ in range(3):
            err = rp - self._apply(dX)
            try:
                w = _solve_dense_ld(M, err)
            except np.linalg.LinAlgError:
                w = np.linalg.lstsq(M.astype(float), err.astype(float),
                                    rcond=None)[0]
            if not np.all(np.isfinite(w.astype(float))):
                break
            W = self._adjoint(w)
            for bi in range(nb):
                dX[bi] = dX[bi] + X[bi] @ W[bi] @ X[bi]
        return dX

    @staticmethod
    def _is_pd(Ms) -> bool:
        for M in Ms:
            try:
                _cholesky_ld(M)
            except np.linalg.LinAlgError:
                return False
        return True

    @classmethod
    def _max_step(cls, X, dX) -> float:
        """Step a <= 1 keeping X + a*dX strictly positive definite."""
        step = np.inf
        for M, dM in zip(X, dX):
            # float64 is plenty for a step bound; backtracking below
            # verifies in extended precision.
            try:
                L = np.linalg.cholesky(M.astype(float))
            except np.linalg.LinAlgError:
                continue
            W = np.linalg.solve(L, np.linalg.solve(L, dM.astype(float).T).T)
            lam_min = float(np.linalg.eigvalsh(0.5 * (W + W.T))[0])
            if lam_min < 0.0:
                step = min(step, -1.0 / lam_min)
        a = min(1.0, 0.98 * step)
        # Guard against roundoff at the PSD boundary.
        while a > 1e-13 and not cls._is_pd(
                [M + a * dM for M, dM in zip(X, dX)]):
            a *= 0.8
        return a if a > 1e-13 else 0.0

    def solve(self, gap_tol: float = 1e-8, feas_tol: float = 1e-9,
              dual_tol: float = 1e-8, max_iters: int = MAX_IPM_ITERS):
        """Homogeneous self-dual path following (HKM direction).

        The embedding carries homogenizing scalars (tau, kappa) alongside
        (X, y, Z), so X = Z = I, tau = kappa = 1 is always a strictly
        interior start and infeasibility shows up as tau -> 0 rather than
        as a divergent iterate.  Returns the de-homogenized (X, y, Z).

        The dual residual gets a looser tolerance than the primal one: it
        only backs the duality-gap bound on the reported objective, while
        the primal residual bounds the certificate's matching error.
        """
        nb = len(self.sizes)
        K = self.b.size
        n_total = sum(self.sizes) + 1
        X = [np.eye(s, dtype=_LD) for s in self.sizes]
        Z = [np.eye(s, dtype=_LD) for s in self.sizes]
        y = np.zeros(K, dtype=_LD)
        tau = _LD(1.0)
        kappa = _LD(1.0)

        b_norm = 1.0 + float(np.linalg.norm(self.b.astype(float)))
        c_norm = 1.0 + max(float(np.abs(M).max()) for M in self.C)
        status = "iteration-limit"
        best = None
        best_rels = (np.inf, np.inf, np.inf)
        best_merit = np.inf
        stall = 0
        it = 0
        for it in range(1, max_iters + 1):
            cx = self._inner(self.C, X)
            by = self.b @ y
            rp = self.b * tau - self._apply(X)
            AtY = self._adjoint(y)
            Rd = [tau * C - Zb - Ab for C, Zb, Ab in zip(self.C, Z, AtY)]
            rg = kappa + cx - by
            gap = self._inner(X, Z)
            mu = (gap + tau * kappa) / n_total

            rel_p = float(np.sqrt(rp @ rp) / (tau * b_norm))
            rel_d = float(max(np.abs(M).max() for M in Rd) / (tau * c_norm))
            rel_g = float(gap / (tau * tau * (1.0 + abs(cx / tau))))
            merit = max(rel_p, rel_d, rel_g)
            if merit < best_merit:
                best_merit = merit
                best_rels = (rel_p, rel_d, rel_g)
                best = ([M / tau for M in X], y / tau, [M / tau for M in Z])
                stall = 0
            else:
                stall += 1
            # Push two extra digits past the contractual tolerances while
            # progress lasts: the surplus absorbs the later clipping and
            # renormalization of the lambda block.  The best iterate is
            # graded against the contractual tolerances after the loop.
            if (rel_p <= 0.01 * feas_tol and rel_d <= 0.01 * dual_tol
                    and rel_g <= 0.01 * gap_tol):
                break
            if tau <= 1e-9 * max(1.0, kappa) or stall >= 30:
                break

            Zi = [_inv_from_cholesky(_cholesky_ld(Zb)) for Zb in Z]

            ZiA = [[Zi[bi] @ self.A[k][bi] for bi in range(nb)]
                   for k in range(K)]
            AX = [[self.A[k][bi] @ X[bi] for bi in range(nb)]
                  for k in range(K)]
            CX = [self.C[bi] @ X[bi] for bi in range(nb)]
            ZiC = [Zi[bi] @ self.C[bi] for bi in range(nb)]
            RdX = [Rd[bi] @ X[bi] for bi in range(nb)]
            # Schur system in (dy, dtau); entries are trace products with
            # A_k, C symmetric so tr(P Zi Q X) = sum((Zi P) * (Q X)).
            S = np.zeros((K + 1, K + 1), dtype=_LD)
            for k in range(K):
                for h in range(K):
                    S[k, h] = sum(np.sum(ZiA[k][bi] * AX[h][bi])
                                  for bi in range(nb))
            u = np.array([sum(np.sum(ZiA[k][bi] * CX[bi]) for bi in range(nb))
                          for k in range(K)])
            w = sum(np.sum(ZiC[bi] * CX[bi]) for bi in range(nb))
            a0 = np.array([sum(np.trace(ZiA[k][bi]) for bi in range(nb))
                           for k in range(K)])
            qv = np.array([sum(np.sum(ZiA[k][bi] * RdX[bi])
                               for bi in range(nb)) for k in range(K)])
            s_rd = sum(np.sum(ZiC[bi] * RdX[bi]) for bi in range(nb))
            ctilde = sum(np.sum(self.C[bi] * Zi[bi]) for bi in range(nb))
            S[:K, K] = -(u + self.b)
            S[K, :K] = self.b - u
            S[K, K] = w + kappa / tau

            def directions(sigma):
                om = 1.0 - sigma
                smu = sigma * mu
                r1 = om * (rp + qv) + (self.b * tau - rp) - smu * a0
                r2 = (om * (rg - s_rd) + smu * ctilde - cx
                      + (smu - tau * kappa) / tau)
                rhs = np.concatenate([r1, np.array([r2], dtype=_LD)])
                try:
                    sol = _solve_dense_ld(S, rhs)
                except np.linalg.LinAlgError:
                    sol = np.linalg.lstsq(S.astype(float),
                                          rhs.astype(float), rcond=None)[0]
                dy, dtau = sol[:K], sol[K]
                AtdY = self._adjoint(dy)
                dZ = [dtau * C - Ab + om * R
                      for C, Ab, R in zip(self.C, AtdY, Rd)]
                dX = []
                for bi in range(nb):
                    D = smu * Zi[bi] - X[bi] - Zi[bi] @ dZ[bi] @ X[bi]
                    dX.append(0.5 * (D + D.T))
                dX = self._feasibility_correction(
                    dX, om * rp + self.b * dtau, X)
                dkappa = (smu - tau * kappa - kappa * dtau) / tau
                return dX, dy, dZ, dtau, dkappa

            def joint_step(dX, dZ, dtau, dkappa):
                a = min(self._max_step(X, dX), self._max_step(Z, dZ))
                if dtau < 0.0:
                    a = min(a, -0.98 * tau / dtau)
                if dkappa < 0.0:
                    a = min(a, -0.98 * kappa / dkappa)
                return a

            # Predictor (affine) step fixes the centering weight.
            dXa, _, dZa, dta, dka = directions(0.0)
            aff = joint_step(dXa, dZa, dta, dka)
            gap_aff = (self._inner(
                [Xb + aff * db for Xb, db in zip(X, dXa)],
                [Zb + aff * db for Zb, db in zip(Z, dZa)])
                + (tau + aff * dta) * (kappa + aff * dka))
            sigma = min(0.9, max(1e-4,
                                 (max(gap_aff, 0.0) / (gap + tau * kappa)) ** 3))

            dX, dy, dZ, dtau, dkappa = directions(sigma)
            a = joint_step(dX, dZ, dtau, dkappa)
            if a <= 1e-8:
                # Combined step blocked at the cone boundary; a pure
                # centering step re-opens the interior.
                dX, dy, dZ, dtau, dkappa = directions(1.0)
                a = joint_step(dX, dZ, dtau, dkappa)
                if a <= 1e-8:
                    break
            X = [Xb + a * db for Xb, db in zip(X, dX)]
            Z = [Zb + a * db for Zb, db in zip(Z, dZ)]
            y = y + a * dy
            tau += a * dtau
            kappa += a * dkappa
        if (best_rels[0] <= feas_tol and best_rels[1] <= dual_tol
                and best_rels[2] <= gap_tol):
            status = "optimal"
        if best is None:
            best = ([M / tau for M in X], y / tau, [M / tau for M in Z])
        Xb, yb, Zb = best
        return ([np.asarray(M, dtype=float) for M in Xb],
                np.asarray(yb, dtype=float),
                [np.asarray(M, dtype=float) for M in Zb],
                it, status)


# --- assembling and solving the fast-convergence SDP ----------------------


def _assemble(prob: SOSProblem, phase1: bool):
    """Blocks: [G0, (G1), lambda_i scalars, slack scalars, (t)]."""
    m = prob.q_degree
    s0, s1 = prob.gram_sizes
    nl = len(prob.degrees)
    sizes = [s0] + ([s1] if s1 > 0 else []) + [1] * (2 * nl) + ([1] if phase1 else [])
    g1_present = s1 > 0
    lam_off = 1 + (1 if g1_present else 0)
    slack_off = lam_off + nl
    t_off = slack_off + nl

    maps0, maps1 = _reconstruction_maps(m)

    A, b = [], []
    # Coefficient matching: R_l(G) + sum_i h_{i,l} lambda_i (- t at l=0)
    #   = alpha * [l == 1 of p] -> for q: alpha at l = 0.
    for l in range(m + 1):
        row = [np.zeros((s, s)) for s in sizes]
        row[0] = maps0[l]
        if g1_present:
            row[1] = maps1[l]
        for i in range(nl):
            row[lam_off + i] = np.array([[prob.h_matrix[l, i]]])
        if phase1 and l == 0:
            row[t_off] = np.array([[-1.0]])
        A.append(row)
        b.append(prob.alpha if l == 0 else 0.0)
    # Simplex equality sum lambda = 1.
    row = [np.zeros((s, s)) for s in sizes]
    for i in range(nl):
        row[lam_off + i] = np.array([[1.0]])
    A.append(row)
    b.append(1.0)
    # Unit upper bounds lambda_i + u_i = 1 (redundant under the simplex
    # equality; kept in the formulation, never active).
    for i in range(nl):
        row = [np.zeros((s, s)) for s in sizes]
        row[lam_off + i] = np.array([[1.0]])
        row[slack_off + i] = np.array([[1.0]])
        A.append(row)
        b.append(1.0)

    C = [np.zeros((s, s)) for s in sizes]
    if phase1:
        C[t_off] = np.array([[1.0]])
    else:
        for i in range(nl):
            C[lam_off + i] = np.array([[-prob.objective[i]]])
    return _BlockSDP(sizes, C, A, b), lam_off, g1_present


def _certificate_from_blocks(prob: SOSProblem, G0, G1, lam) -> SOSCertificate:
    m = prob.q_degree
    q = np.zeros(m + 1)
    q[0] = prob.alpha
    q -= prob.h_matrix @ lam
    maps0, maps1 = _reconstruction_maps(m)
    residual = 0.0
    for l in range(m + 1):
        rec = float(np.sum(maps0[l] * G0))
        if G1 is not None:
            rec += float(np.sum(maps1[l] * G1))
        residual = max(residual, abs(rec - q[l]))
    eigs = [float(np.linalg.eigvalsh(G0)[0])]
    blocks = [G0]
    if G1 is not None:
        eigs.append(float(np.linalg.eigvalsh(G1)[0]))
        blocks.append(G1)
    return SOSCertificate(gram_blocks=tuple(blocks),
                          matching_residual=residual,
                          min_eigenvalue=min(eigs))


def solve_sdp(prob: SOSProblem, tol: float = 1e-8):
    """Phase-I feasibility probe, then the rate-maximizing SDP.

    Returns (SDPSolution, SOSCertificate | None).  Deterministic for
    identical inputs.
    """
    nl = len(prob.degrees)

    sdp1, lam_off, g1_present = _assemble(prob, phase1=True)
    X1, _, _, it1, status1 = sdp1.solve(gap_tol=tol)
    t_val = float(X1[-1][0, 0])
    if status1 == "optimal" and t_val > PHASE1_TOL:
        sol = SDPSolution(lambda_coeffs={}, objective=float("nan"),
                          duality_gap=float("nan"), iterations=it1,
                          status="infeasible")
        return sol, None

    sdp2, lam_off, g1_present = _assemble(prob, phase1=False)
    X, y, Z, it2, status2 = sdp2.solve(gap_tol=tol)
    lam = np.array([float(X[lam_off + i][0, 0]) for i in range(nl)])
    lam = np.clip(lam, 0.0, None)
    lam = lam / lam.sum()
    lambda_coeffs = {prob.degrees[i]: float(lam[i]) for i in range(nl)
                     if lam[i] > 1e-12}
    objective = float(prob.objective @ lam)
    gap = float(sdp2._inner(X, Z))
    G0 = X[0]
    G1 = X[1] if g1_present else None
    cert = _certificate_from_blocks(prob, G0, G1, lam)
    sol = SDPSolution(lambda_coeffs=lambda_coeffs, objective=objective,
                      duality_gap=gap, iterations=it1 + it2, status=status2)
    return sol, cert


def check_certificate(q: Polynomial, cert: SOSCertificate) -> float:
    """Independent recheck: rebuild the polynomial implied by the Gram
    blocks and interval multipliers, return the max coefficient deviation
    from q.  (Eigenvalues are available via ``cert.min_eigenvalue`` or a
    fresh ``certificate_min_eigenvalue``.)"""
    G0 = cert.gram_blocks[0]
    G1 = cert.gram_blocks[1] if len(cert.gram_blocks) > 1 else None
    s0 = G0.shape[0]
    s1 = G1.shape[0] if G1 is not None and G1.size > 0 else 0
    # Infer the certified degree from the block shapes; q may sit below it
    # when its true leading coefficient underflows the trim tolerance.
    if s1 == s0:
        m = 2 * s0 - 1
    elif s1 == s0 - 1:
        m = 2 * (s0 - 1)
    else:
        raise ValueError(
            f"Gram block sizes {(s0, s1)} do not form an interval certificate")
    if _gram_sizes(m) != (s0, s1):
        raise ValueError(f"inconsistent Gram block sizes {(s0, s1)}")
    if q.degree > m:
        raise ValueError(
            f"polynomial degree {q.degree} exceeds certified degree {m}")

    maps0, maps1 = _reconstruction_maps(m)
    coeffs = np.zeros(m + 1)
    target = np.zeros(m + 1)
    target[: q.coeffs.size] = q.coeffs
    residual = 0.0
    for l in range(m + 1):
        coeffs[l] = float(np.sum(maps0[l] * G0))
        if G1 is not None and s1 > 0:
            coeffs[l] += float(np.sum(maps1[l] * G1))
        residual = max(residual, abs(coeffs[l] - target[l]))
    return residual


def certificate_min_eigenvalue(cert: SOSCertificate) -> float:
    return min(float(np.linalg.eigvalsh(G)[0]) for G in cert.gram_blocks
               if G.size > 0)
