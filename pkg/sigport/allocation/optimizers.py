import logging
from typing import Optional, Tuple

import numpy as np

from ..common import OptimizationError

logger = logging.getLogger(__name__)

MAX_ITER = 10_000
PG_TOL = 1e-10
KKT_TOL = 1e-9
ACCEPT_TOL = 1e-6
POLISH_EVERY = 25
SUPPORT_EPS = 1e-12


################################################################
# Helpers
################################################################
def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum w = 1}."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = ind[u - css / ind > 0][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def kkt_residual(Q: np.ndarray, w: np.ndarray, support_eps: float = 1e-8) -> float:
    """Relative violation of the optimality conditions of min w'Qw on the simplex.

    On the support (Qw)_i must share a common value lam, off the support (Qw)_j >= lam.
    """
    g = Q @ w
    scale = max(float(np.max(np.abs(g))), np.finfo(float).tiny)
    support = w > support_eps
    if not support.any():
        return np.inf
    lam = float(np.mean(g[support]))
    on = float(np.max(np.abs(g[support] - lam)))
    off = float(np.max(np.maximum(lam - g[~support], 0.0))) if (~support).any() else 0.0
    return max(on, off) / scale


def _polish(Q: np.ndarray, w: np.ndarray) -> Optional[np.ndarray]:
    """Exact minimizer on the current support, if it is feasible."""
    support = w > SUPPORT_EPS
    try:
        z = np.linalg.solve(Q[np.ix_(support, support)], np.ones(int(support.sum())))
    except np.linalg.LinAlgError:
        return None
    total = z.sum()
    if not np.isfinite(total) or total <= 0 or np.any(z <= 0):
        return None
    polished = np.zeros_like(w)
    polished[support] = z / total
    return polished


################################################################
# Solver
################################################################
def minimize_on_simplex(
    Q: np.ndarray,
    x0: Optional[np.ndarray] = None,
    max_iter: int = MAX_ITER,
    tol: float = PG_TOL,
) -> Tuple[np.ndarray, int]:
    """Minimize w'Qw over the simplex for a symmetric PSD Q.

    Accelerated projected gradient with backtracking and function-value restarts. Every few
    iterations the support of the iterate is polished into an exact solution and accepted
    when it satisfies the KKT conditions.

    Returns:
        (weights, iterations)

    Raises:
        OptimizationError: no KKT point within `max_iter` iterations.
    """
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[0]
    x = project_simplex(np.full(n, 1.0 / n) if x0 is None else np.asarray(x0, dtype=float))
    if n == 1:
        return x, 0

    def f(v):
        return float(v @ Q @ v)

    y, t, L = x.copy(), 1.0, 1.0
    fx = f(x)
    for it in range(1, max_iter + 1):
        gy = 2.0 * (Q @ y)
        fy = f(y)
        while True:
            x_new = project_simplex(y - gy / L)
            d = x_new - y
            f_new = f(x_new)
            if f_new <= fy + gy @ d + 0.5 * L * (d @ d) + 1e-15 * abs(fy):
                break
            L *= 2.0

        if f_new > fx:
            # restart momentum from the last iterate
            y, t = x.copy(), 1.0
            continue
        t_new = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, fx, t = x_new, f_new, t_new

        gx = 2.0 * (Q @ x)
        mapping = L * (x - project_simplex(x - gx / L))
        if np.max(np.abs(mapping)) < tol:
            return x, it

        if it % POLISH_EVERY == 0:
            polished = _polish(Q, x)
            if polished is not None and kkt_residual(Q, polished) < KKT_TOL and f(polished) <= fx:
                return polished, it

    polished = _polish(Q, x)
    if polished is not None and kkt_residual(Q, polished) < KKT_TOL:
        return polished, max_iter
    residual = kkt_residual(Q, x)
    if residual < ACCEPT_TOL:
        logger.warning(f"simplex solver stopped after {max_iter} iterations with KKT residual {residual:.3e}")
        return x, max_iter
    raise OptimizationError(f"simplex solver did not converge in {max_iter} iterations", residual=residual)
