"""Independent reference implementations used only by the test suite.

These deliberately avoid the library's solver code paths: the LP oracle
enumerates vertices by brute force, and the threshold oracle scans the DE
update map for fixed points.
"""

from itertools import combinations

import numpy as np


def brute_force_lp(c, A, b, E, d):
    """max c.x  s.t.  A x <= b, E x = d, x >= 0, by vertex enumeration.

    Assumes the feasible region is bounded (callers add box constraints).
    Returns (best_x, best_obj) or (None, None) when infeasible.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, c.size)
    b = np.asarray(b, dtype=float)
    E = np.asarray(E, dtype=float).reshape(-1, c.size)
    d = np.asarray(d, dtype=float)
    n = c.size

    ineq_rows = np.vstack([A, -np.eye(n)])
    ineq_rhs = np.concatenate([b, np.zeros(n)])
    m_eq = E.shape[0]
    if m_eq > n:
        return None, None

    best_x, best_obj = None, None
    for combo in combinations(range(ineq_rows.shape[0]), n - m_eq):
        M = np.vstack([E, ineq_rows[list(combo)]])
        rhs = np.concatenate([d, ineq_rhs[list(combo)]])
        try:
            x = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if np.any(ineq_rows @ x > ineq_rhs + 1e-9):
            continue
        if m_eq and np.any(np.abs(E @ x - d) > 1e-9):
            continue
        obj = float(c @ x)
        if best_obj is None or obj > best_obj:
            best_obj, best_x = obj, x
    return best_x, best_obj


def threshold_fixed_point_scan(lam_poly, rho_poly, eps, grid_step=1e-4):
    """True iff the DE update eps*lambda(1 - rho(1 - y)) stays strictly
    below y on a fine grid over (0, eps] -- i.e. no fixed point blocks
    convergence to zero."""
    ys = np.arange(grid_step, eps + grid_step, grid_step)
    ys = ys[ys <= eps]
    upd = eps * lam_poly(1.0 - rho_poly(1.0 - ys))
    return bool(np.all(upd < ys))


def bisect_threshold_by_recursion(lam_poly, rho_poly, tol=1e-4):
    """Threshold estimate from bisection over the fixed-point scan."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if threshold_fixed_point_scan(lam_poly, rho_poly, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
