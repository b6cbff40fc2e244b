"""Exact finite-alphabet integer least squares via Schnorr-Euchner sphere decoding."""

import numpy as np

from .errors import ConfigError, SolverBudgetError

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

DEFAULT_MAX_NODES = 2_000_000


@njit(cache=True)
def _fill_order(levels, rho, out):
    """Candidate indices sorted by distance to the layer center rho.

    Two-pointer merge outward from the nearest level; O(L), no allocation.
    """
    L = levels.shape[0]
    lo = np.searchsorted(levels, rho) - 1
    hi = lo + 1
    for r in range(L):
        if lo < 0:
            out[r] = hi
            hi += 1
        elif hi >= L:
            out[r] = lo
            lo -= 1
        elif rho - levels[lo] <= levels[hi] - rho:
            out[r] = lo
            lo -= 1
        else:
            out[r] = hi
            hi += 1


@njit(cache=True)
def _sesd_kernel(R, e, levels, max_nodes, init_x, use_init):
    """Depth-first branch and bound for min ||e - R x||^2, x in levels^n.

    R is upper triangular with positive diagonal. Children at each layer are
    enumerated in increasing distance from the unconstrained per-layer
    center, so without a warm start the first leaf reached is the Babai
    (successive rounding) point and serves as the initial incumbent. A warm
    start (any point of the alphabet) only tightens the initial radius and
    never affects exactness. Returns (x, objective, nodes, completed).
    """
    n = R.shape[0]
    L = levels.shape[0]
    order = np.zeros((n, L), dtype=np.int64)
    rank = np.zeros(n, dtype=np.int64)
    b = np.zeros(n)
    pacc = np.zeros(n + 1)
    x = np.zeros(n)
    best_x = np.zeros(n)
    best = np.inf
    if use_init:
        r = e - R @ init_x
        best = r @ r
        best_x[:] = init_x
    nodes = 0

    i = n - 1
    b[i] = e[i]
    _fill_order(levels, b[i] / R[i, i], order[i])
    rank[i] = 0

    while True:
        if rank[i] >= L:
            i += 1
            if i >= n:
                break
            continue
        lev = levels[order[i, rank[i]]]
        t = b[i] - R[i, i] * lev
        d = pacc[i + 1] + t * t
        nodes += 1
        if nodes > max_nodes:
            return best_x, best, nodes, False
        if d >= best:
            # children are distance-ordered: all remaining siblings are worse
            i += 1
            if i >= n:
                break
            continue
        rank[i] += 1
        x[i] = lev
        if i == 0:
            best = d
            best_x[:] = x
            i += 1
            continue
        pacc[i] = d
        i -= 1
        acc = e[i]
        for j in range(i + 1, n):
            acc -= R[i, j] * x[j]
        b[i] = acc
        _fill_order(levels, b[i] / R[i, i], order[i])
        rank[i] = 0

    return best_x, best, nodes, True


def sesd_solve(R, e, levels, max_nodes=DEFAULT_MAX_NODES, warm_start=None,
               best_effort=False):
    """Exact minimizer of ||e - R x||^2 over the real level set, per coordinate.

    Returns (x, objective, node_count). Raises SolverBudgetError if the
    search tree exceeds max_nodes before the minimizer is certified. With
    best_effort=True it instead returns (x, objective, node_count, exact)
    where x is the best incumbent found within the budget and exact marks
    whether the tree was exhausted (certified optimal).
    """
    R = np.ascontiguousarray(R, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    levels = np.ascontiguousarray(np.sort(np.asarray(levels, dtype=float)))
    if levels.size == 0:
        raise ConfigError("alphabet must be non-empty")
    if R.ndim != 2 or R.shape[0] != R.shape[1] or R.shape[0] != e.shape[0]:
        raise ConfigError("R must be square and match the target length")
    if np.any(np.diag(R) <= 0):
        raise ConfigError("R must have a positive diagonal")
    if warm_start is None:
        init, use_init = np.zeros_like(e), False
    else:
        init, use_init = np.ascontiguousarray(warm_start, dtype=float), True
    x, obj, nodes, ok = _sesd_kernel(R, e, levels, max_nodes, init, use_init)
    if best_effort:
        if not np.isfinite(obj):
            raise SolverBudgetError("budget too small to reach any incumbent")
        return x, float(obj), int(nodes), bool(ok)
    if not ok:
        raise SolverBudgetError(f"sphere decoder exceeded the {max_nodes}-node budget")
    return x, float(obj), int(nodes)
