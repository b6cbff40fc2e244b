"""Quantized BBU refinement precoding.

QRZF initialization, fixed Wiener receiver gains, real-embedded per-column
integer least squares with Cholesky factorization, exact sphere decoding, and
a bisection on the power-constraint multiplier lambda.
"""

import numpy as np
import scipy.linalg
from dataclasses import dataclass

from .aas import EffectiveChannel
from .errors import ConfigError, DegenerateInputError, NotPositiveDefiniteError, SolverBudgetError
from .quantizer import QuantizerSpec, quantize_complex
from .sesd import sesd_solve, DEFAULT_MAX_NODES

BISECTION_MAX_ITERS = 50
POWER_GAP_REL = 1e-2
LAMBDA_FLOOR = 1e-12
ONE_STAGE_TREE_BUDGET = 48
MIN_NODES_PER_SOLVE = 20_000


@dataclass(frozen=True)
class ReceiverGains:
    """Per-UE complex scaling beta minimizing each UE's MSE at fixed precoding."""

    beta: np.ndarray

    def as_diag(self):
        return np.diag(self.beta)


@dataclass(frozen=True)
class ContinuousPrecoder:
    """Unquantized precoder (QRZF/RZF) scaled to the power budget."""

    matrix: np.ndarray
    mu: float


@dataclass(frozen=True)
class IlsProblem:
    """Real 2N-dimensional embedding of the per-column quantized subproblems."""

    v_real: np.ndarray
    R: np.ndarray
    targets: np.ndarray  # K x 2N, one row per column subproblem
    lam: float

    @property
    def dim(self):
        return self.R.shape[0]


@dataclass(frozen=True)
class BbuPrecoder:
    """N x K second-stage precoder with all entries on the fronthaul alphabet."""

    matrix: np.ndarray
    achieved_power: float
    lambda_star: float
    objective: float


def qrzf_mu(K, q, sigma0_sq, eta, dim_for_mu):
    """Quantization-aware regularizer of the RZF precoder."""
    return K / (1 - eta) ** 2 * (sigma0_sq / q + eta * (1 - eta) * dim_for_mu)


def qrzf(H, q, sigma0_sq, eta, dim_for_mu) -> ContinuousPrecoder:
    """H^H (H H^H + mu I)^(-1), scaled to meet the power budget with equality."""
    H = np.asarray(H)
    K = H.shape[0]
    mu = qrzf_mu(K, q, sigma0_sq, eta, dim_for_mu)
    gram = H @ H.conj().T + mu * np.eye(K)
    P = H.conj().T @ np.linalg.solve(gram, np.eye(K))
    nrm = np.linalg.norm(P, "fro")
    if nrm == 0:
        raise DegenerateInputError("QRZF produced a zero precoder")
    return ContinuousPrecoder(P * np.sqrt(q) / nrm, mu)


def receiver_gains(H_eff: EffectiveChannel, P, sigma0_sq) -> ReceiverGains:
    """MSE-optimal per-UE gains for the given effective channel and precoder."""
    G = H_eff.matrix @ P  # K x K, row k = UE k's receive coefficients
    num = np.conj(np.diag(G))
    den = np.sum(np.abs(G) ** 2, axis=1) + sigma0_sq
    if np.any(den == 0):
        raise DegenerateInputError("zero received power with zero noise")
    return ReceiverGains(num / den)


def real_embed_matrix(V):
    """[[Re V, -Im V], [Im V, Re V]]; symmetric when V is Hermitian."""
    return np.block([[V.real, -V.imag], [V.imag, V.real]])


def real_embed_vector(z):
    return np.concatenate([np.asarray(z).real, np.asarray(z).imag])


def split_real_vector(x):
    n = x.shape[0] // 2
    return x[:n] + 1j * x[n:]


def build_ils(H_eff: EffectiveChannel, gains: ReceiverGains, lam) -> IlsProblem:
    """Real 2N-dim reformulation of the per-column quantized MSE subproblems.

    With G = B H_eff, V = G^H G + lam I, and x the stacked real/imaginary
    parts of a column a, each complex term a^H V a - 2 Re(g_i^T a) equals
    ||e_i - R x||^2 - ||e_i||^2 where R^T R is the real embedding of V and
    e_i solves R^T e_i = [Re g_i; -Im g_i] for the i-th row g_i of G.
    """
    if lam < 0:
        raise ConfigError("lambda must be non-negative")
    He = H_eff.matrix
    N = He.shape[1]
    G = gains.beta[:, None] * He
    V = G.conj().T @ G + lam * np.eye(N)
    v_real = real_embed_matrix(V)
    try:
        Lf = np.linalg.cholesky(v_real)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("Gram matrix is not positive definite at this lambda")
    R = Lf.T
    targets = np.empty((He.shape[0], 2 * N))
    for i in range(He.shape[0]):
        c = np.concatenate([G[i].real, -G[i].imag])
        targets[i] = scipy.linalg.solve_triangular(Lf, c, lower=True)
    return IlsProblem(v_real=v_real, R=R, targets=targets, lam=float(lam))


def modifysd_objective(H_eff: EffectiveChannel, gains: ReceiverGains, P, lam):
    """Lagrangian surrogate: sum_i a_i^H (G^H G + lam I) a_i - 2 Re(g_i^T a_i)."""
    He = H_eff.matrix
    G = gains.beta[:, None] * He
    V = G.conj().T @ G + lam * np.eye(He.shape[1])
    quad = np.einsum("ni,nm,mi->", P.conj(), V, P).real
    lin = 2 * np.einsum("in,ni->", G, P).real
    return float(quad - lin)


def _round_to_levels(x, levels):
    """Nearest alphabet level, entrywise, for a sorted level vector."""
    idx = np.clip(np.searchsorted(levels, x), 1, levels.size - 1)
    lo = levels[idx - 1]
    hi = levels[idx]
    return np.where(x - lo <= hi - x, lo, hi)


def _solve_columns(prob: IlsProblem, levels, max_nodes, warm=None, best_effort=False):
    """Per-column solves; returns (complex N x K matrix, objective, nodes, exact).

    warm, when given, holds one alphabet point per column (e.g. the solution
    at a nearby lambda) used as the initial incumbent; exactness at the
    current lambda is unaffected. Columns with no warm entry start from the
    rounded unconstrained minimizer. With best_effort=True a column whose
    tree exceeds the remaining budget keeps its best incumbent and exact is
    reported False; otherwise the budget overrun raises.
    """
    K = prob.targets.shape[0]
    N = prob.dim // 2
    P = np.empty((N, K), dtype=complex)
    obj = 0.0
    nodes = 0
    exact = True
    for i in range(K):
        ws = None if warm is None else warm.get(i)
        if ws is None:
            x_ls = scipy.linalg.solve_triangular(prob.R, prob.targets[i], lower=False)
            ws = _round_to_levels(x_ls, levels)
        cap = max((max_nodes - nodes) // (K - i), 1)
        x, d, nd, ok = sesd_solve(prob.R, prob.targets[i], levels, max_nodes=cap,
                                  warm_start=ws, best_effort=True)
        if not ok and not best_effort:
            raise SolverBudgetError(f"sphere decoder exceeded the {cap}-node budget")
        exact = exact and ok
        P[:, i] = split_real_vector(x)
        if warm is not None:
            warm[i] = x
        obj += d - prob.targets[i] @ prob.targets[i]
        nodes += nd
    return P, obj, nodes, exact


def _power(P):
    return float(np.linalg.norm(P, "fro") ** 2)


def bbu_precode(H_eff: EffectiveChannel, spec: QuantizerSpec, q, sigma0_sq,
                dim_for_mu=None, node_budget=DEFAULT_MAX_NODES,
                best_effort=False) -> BbuPrecoder:
    """Quantized sum-MSE precoder with a bisected power multiplier.

    The receiver gains are fixed at the power-normalized QRZF solution. The
    multiplier search solves at lambda = 0 first; if the power constraint is
    violated (or the Gram matrix is singular at zero, where the unconstrained
    minimizer has uncontrolled norm), lambda is doubled from 1 until feasible
    and then bisected until the power budget is nearly met.

    node_budget caps the total tree-search size across the whole multiplier
    search. By default every candidate solution is a certified exact
    minimizer at its own lambda; when a solve near the crossing point exceeds
    the remaining budget (the search degenerates as lambda -> 0 at fine
    quantization), that lambda is abandoned and the best certified feasible
    solution is returned. With best_effort=True a budget-limited solve keeps
    its best incumbent instead - the search is seeded with the entrywise-
    quantized continuous precoder, so the result never does worse than
    rounding - and the returned matrix is no longer certified optimal.
    """
    He = H_eff.matrix
    K, N = He.shape
    if dim_for_mu is None:
        dim_for_mu = N
    cont = qrzf(He, q, sigma0_sq, spec.eta, dim_for_mu)
    gains = receiver_gains(H_eff, cont.matrix, sigma0_sq)
    levels = spec.levels
    min_power = 2 * N * K * np.min(np.abs(levels)) ** 2
    if min_power > q:
        raise ConfigError(
            "the alphabet cannot meet the power budget: even the smallest-magnitude "
            f"matrix has power {min_power:.4g} > q = {q:.4g}"
        )

    budget = {"left": int(node_budget)}
    # Seed the incumbents with the entrywise-quantized continuous precoder so
    # a budget-limited search can never end up worse than plain rounding.
    rounded = quantize_complex(cont.matrix, spec)
    warm = {i: real_embed_vector(rounded[:, i]) for i in range(K)}

    def solve_at(lam, cap=None):
        avail = budget["left"] if cap is None else min(cap, budget["left"])
        if avail <= 0:
            if not best_effort:
                raise SolverBudgetError("node budget for this precoding call is exhausted")
            avail = MIN_NODES_PER_SOLVE  # warm incumbents keep this cheap and valid
        prob = build_ils(H_eff, gains, lam)
        P, surrogate, nodes, _ = _solve_columns(prob, levels, avail, warm,
                                                best_effort=best_effort)
        budget["left"] -= nodes
        return P, surrogate

    def done(P, lam):
        return BbuPrecoder(P, _power(P), lam,
                           modifysd_objective(H_eff, gains, P, lam))

    # All levels share one magnitude (B = 1): every candidate matrix has the
    # same norm, so the argmin is independent of lambda. Solve once at a
    # well-conditioned lambda and report the lambda = 0 solution.
    if np.allclose(np.abs(levels), np.abs(levels[0])):
        lam_c = max(np.trace(He.conj().T @ He).real / N, LAMBDA_FLOOR)
        P, _ = solve_at(lam_c)
        return done(P, 0.0)

    singular_at_zero = False
    try:
        P0, _ = solve_at(0.0, cap=node_budget // 4)
        if _power(P0) <= q:
            return done(P0, 0.0)
    except NotPositiveDefiniteError:
        singular_at_zero = True
        # At a singular Gram matrix the search tree is nearly degenerate, so
        # retry at the floor with a small node budget before searching from
        # above, where the multiplier restores conditioning.
        try:
            P0, _ = solve_at(LAMBDA_FLOOR, cap=node_budget // 20)
            if _power(P0) <= q:
                return done(P0, LAMBDA_FLOOR)
        except (NotPositiveDefiniteError, SolverBudgetError):
            pass
    except SolverBudgetError:
        singular_at_zero = True

    lam_lo = LAMBDA_FLOOR if singular_at_zero else 0.0
    lam_hi = 1.0
    best = None
    for _ in range(64):
        try:
            P, _ = solve_at(lam_hi)
            if _power(P) <= q:
                best = (P, lam_hi)
                break
        except NotPositiveDefiniteError:
            pass
        except SolverBudgetError:
            if budget["left"] <= 0:
                raise
        lam_lo = lam_hi
        lam_hi *= 2.0
    if best is None:
        raise ConfigError("no feasible multiplier found; check the power budget")

    for _ in range(BISECTION_MAX_ITERS):
        if _power(best[0]) >= (1 - POWER_GAP_REL) * q:
            break
        if budget["left"] <= 0:
            break
        lam = 0.5 * (lam_lo + lam_hi)
        if lam <= lam_lo or lam >= lam_hi:
            break
        try:
            P, _ = solve_at(lam)
        except (NotPositiveDefiniteError, SolverBudgetError):
            lam_lo = lam  # cannot certify near zero; move towards feasibility
            continue
        if _power(P) <= q:
            lam_hi = lam
            if _power(P) > _power(best[0]):
                best = (P, lam)
        else:
            lam_lo = lam

    P, lam_star = best
    return done(P, lam_star)


def one_stage_precode(H, spec: QuantizerSpec, q, sigma0_sq,
                      allow_large=False, node_budget=DEFAULT_MAX_NODES,
                      best_effort=False) -> BbuPrecoder:
    """Quantized one-stage precoder: the same machinery on the full channel."""
    Hm = H.entries if hasattr(H, "entries") else np.asarray(H)
    M = Hm.shape[1]
    tree = 2 * M * spec.bits
    if tree > ONE_STAGE_TREE_BUDGET and not allow_large:
        raise SolverBudgetError(
            f"instance too large for exact one-stage: 2*M*B = {tree} > "
            f"{ONE_STAGE_TREE_BUDGET}; reduce M or B, or pass allow_large=True"
        )
    return bbu_precode(EffectiveChannel(Hm), spec, q, sigma0_sq,
                       dim_for_mu=M, node_budget=node_budget,
                       best_effort=best_effort)
