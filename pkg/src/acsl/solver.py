"""Alternating-minimization engine for collaborative similarity learning.

Joint state: a row-sparse projection ``p`` mapping stacked features to a
relaxed cluster indicator ``f``, a learned similarity structure ``s`` fusing
the per-view graphs with per-column view weights ``w``, and the diagonal
reweighting ``gamma_diag`` that realizes the l2,1 penalty as an iteratively
reweighted quadratic. One outer iteration updates the blocks in the order
p, f, s, w; each block update is the exact minimizer of its subproblem with
the other blocks held fixed.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, NumericError
from .graph import AffinityGraph, connected_components, laplacian_of
from .numerics import project_simplex_columns, smallest_k_eigen, solve_spd

# Relative change of the inner reweighted-regression objective below which
# the inner loop stops.
INNER_TOL = 1e-8


@dataclass(frozen=True)
class Hyperparams:
    """Solver weights and loop controls.

    alpha weights the spectral (rank-surrogate) term, beta the regression
    fit, gamma the row-sparsity penalty; k is the target cluster count and
    epsilon the smoothing constant keeping the reweighting finite on zero
    rows. With adaptive_alpha on, the fit loop doubles alpha while the
    learned structure has fewer than k components and halves it while it
    has more.
    """

    k: int
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    epsilon: float = 1e-8
    max_outer_iters: int = 100
    max_inner_iters: int = 30
    tol_rel_objective: float = 1e-6
    adaptive_alpha: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")
        for name in ("alpha", "beta", "gamma", "epsilon", "tol_rel_objective"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("max_outer_iters", "max_inner_iters"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass
class SolverState:
    """Mutable solver state plus per-iteration traces.

    Invariants maintained by the updates: f has orthonormal columns, every
    column of s lies on the probability simplex, every column of w sums
    to 1 (entries may be negative), and gamma_diag is strictly positive.
    alpha_trace records the alpha in effect at each recorded objective
    value (it only varies when adaptive alpha is enabled).
    """

    p: np.ndarray
    f: np.ndarray
    s: AffinityGraph
    w: np.ndarray
    gamma_diag: np.ndarray
    iteration: int = 0
    objective_trace: list[float] = field(default_factory=list)
    components_trace: list[int] = field(default_factory=list)
    alpha_trace: list[float] = field(default_factory=list)
    converged: bool = False


def _check_problem(views: list[AffinityGraph], x: np.ndarray, hp: Hyperparams) -> int:
    if not views:
        raise ConfigError("at least one view graph is required")
    n = views[0].n
    for i, g in enumerate(views):
        if g.n != n:
            raise ConfigError(f"view {i} has {g.n} samples, expected {n}")
    if x.ndim != 2 or x.shape[0] != n:
        raise ConfigError(
            f"stacked feature matrix has shape {x.shape}, expected ({n}, d)"
        )
    if n < hp.k:
        raise ConfigError(f"cannot split {n} samples into {hp.k} clusters")
    return n


def _fused_columns(views: list[AffinityGraph], w: np.ndarray) -> np.ndarray:
    """Column j of the result is sum_v w[v, j] * views[v][:, j]."""
    fused = np.zeros_like(views[0].matrix)
    for v, g in enumerate(views):
        fused += g.matrix * w[v][None, :]
    return fused


def _regularized_gram(x: np.ndarray, gamma: float, gamma_diag: np.ndarray) -> np.ndarray:
    q = x.T @ x
    q[np.diag_indices_from(q)] += gamma * gamma_diag
    return q


def _row_norms(p: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(p * p, axis=1))


def _reweighting_of(p: np.ndarray, epsilon: float) -> np.ndarray:
    """Diagonal weights 1 / (2 sqrt(||p_i||^2 + epsilon)) per feature row."""
    return 1.0 / (2.0 * np.sqrt(np.sum(p * p, axis=1) + epsilon))


def _regression_objective(x: np.ndarray, p: np.ndarray, f: np.ndarray, gamma: float) -> float:
    resid = x @ p - f
    return float(np.sum(resid * resid) + gamma * _row_norms(p).sum())


def _irls_loop(
    x: np.ndarray, f: np.ndarray, p0: np.ndarray, hp: Hyperparams
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Alternate the closed-form solve and the reweighting until the
    regression objective stalls.

    Returns the final projection, the diagonal weights used for its solve
    (so the pair is exactly stationary for the weighted quadratic), and the
    objective value after every solve.
    """
    gram = x.T @ x
    xtf = x.T @ f
    diag = np.diag_indices_from(gram)
    p = p0
    prev = _regression_objective(x, p, f, hp.gamma)
    history = [prev]
    for _ in range(hp.max_inner_iters):
        # Reweight at the previous iterate, then solve: however the loop
        # exits, `weights` is the reweighting the returned `p` was solved
        # with, so the pair is exactly stationary for its quadratic.
        weights = _reweighting_of(p, hp.epsilon)
        q = gram.copy()
        q[diag] += hp.gamma * weights
        p = solve_spd(q, xtf)
        cur = _regression_objective(x, p, f, hp.gamma)
        history.append(cur)
        if abs(prev - cur) <= INNER_TOL * max(abs(prev), 1e-30):
            break
        prev = cur
    return p, weights, history


def update_p(
    state: SolverState, x: np.ndarray, hp: Hyperparams
) -> tuple[np.ndarray, np.ndarray]:
    """Row-sparse regression of the indicator on the stacked features.

    Returns (new p, new gamma_diag). gamma_diag is the reweighting used in
    the final closed-form solve, so 2 X^T (X p - f) + 2 gamma G p = 0 holds
    at the returned pair up to solver round-off.
    """
    p, weights, _ = _irls_loop(x, state.f, state.p, hp)
    return p, weights


def _embedding_operator(
    s: AffinityGraph, x: np.ndarray, gamma_diag: np.ndarray, hp: Hyperparams
) -> np.ndarray:
    """Symmetric operator whose bottom eigenvectors give the indicator."""
    lap = laplacian_of(s).matrix
    q = _regularized_gram(x, hp.gamma, gamma_diag)
    back = solve_spd(q, x.T)  # Q^{-1} X^T without forming the inverse
    m = lap + hp.beta * (np.eye(x.shape[0]) - x @ back)
    return 0.5 * (m + m.T)


def update_f(state: SolverState, x: np.ndarray, hp: Hyperparams) -> np.ndarray:
    """Indicator update: k smallest eigenvectors of the embedding operator."""
    m = _embedding_operator(state.s, x, state.gamma_diag, hp)
    _, vecs = smallest_k_eigen(m, hp.k)
    return vecs


def _indicator_sq_distances(f: np.ndarray) -> np.ndarray:
    """a[i, j] = ||f_i - f_j||^2 over indicator rows."""
    sq = np.sum(f * f, axis=1)
    return np.maximum(sq[:, None] + sq[None, :] - 2.0 * (f @ f.T), 0.0)


def update_s(
    state: SolverState, views: list[AffinityGraph], hp: Hyperparams
) -> AffinityGraph:
    """Similarity update: per-column simplex projection of the fused view
    columns shifted by the indicator distances.

    Column j is projected from sum_v w_j^v S_j^v - (alpha / 2) a_j where
    a_j holds the squared indicator-row distances to sample j. Columns are
    independent.
    """
    fused = _fused_columns(views, state.w)
    shift = _indicator_sq_distances(state.f)
    return AffinityGraph(project_simplex_columns(fused - 0.5 * hp.alpha * shift))


def _min_quadratic_weights(gram: np.ndarray) -> np.ndarray:
    """Minimize w^T gram w subject to sum(w) = 1.

    Solved through gram^{-1} 1 normalized to unit sum. An exactly singular
    gram (identical views) can slip through Cholesky with a junk pivot, so
    near-singularity is detected by the smallest eigenvalue and met with a
    symmetric ridge delta * I, delta = 1e-10 * trace / V. A gram that is
    singular even ridged (identically zero) makes every feasible w optimal
    and uniform weights are returned.
    """
    v = gram.shape[0]
    ones = np.ones(v)
    trace = float(np.trace(gram))
    if trace <= 0.0:
        return ones / v
    smallest = np.linalg.eigvalsh(gram)[0]
    if smallest <= 1e-12 * trace / v:
        gram = gram + (1e-10 * trace / v) * np.eye(v)
    try:
        y = solve_spd(gram, ones)
    except NumericError:
        return ones / v
    total = y.sum()
    if not np.isfinite(total) or total <= 0:
        return ones / v
    return y / total


def update_w(state: SolverState, views: list[AffinityGraph]) -> np.ndarray:
    """View-weight update: per-column minimum of the fusion residual.

    For column j, stacking b_v = s_j - s_j^v as the columns of B_j, the
    minimizer of ||B_j w||^2 over sum(w) = 1 is (B_j^T B_j)^{-1} 1
    renormalized to unit sum. Entries may be negative.
    """
    v = len(views)
    s = state.s.matrix
    b = s[None, :, :] - np.stack([g.matrix for g in views])  # (V, n, n)
    grams = np.einsum("vij,uij->jvu", b, b)  # per-column V x V Gram matrices
    w = np.empty((v, s.shape[0]))
    for j in range(s.shape[0]):
        w[:, j] = _min_quadratic_weights(grams[j])
    return w


def objective(
    state: SolverState,
    views: list[AffinityGraph],
    x: np.ndarray,
    hp: Hyperparams,
) -> float:
    """Overall objective value at the given state.

    fusion residual + alpha * Tr(F^T L_S F) + beta * (||X P - F||^2
    + gamma * sum of row norms of P).
    """
    fused = _fused_columns(views, state.w)
    resid_s = state.s.matrix - fused
    fusion = float(np.sum(resid_s * resid_s))
    lap = laplacian_of(state.s).matrix
    spectral = float(np.sum(state.f * (lap @ state.f)))
    resid_f = x @ state.p - state.f
    fit = float(np.sum(resid_f * resid_f))
    sparsity = float(_row_norms(state.p).sum())
    return fusion + hp.alpha * spectral + hp.beta * (fit + hp.gamma * sparsity)


def initialize(
    views: list[AffinityGraph], x: np.ndarray, hp: Hyperparams
) -> SolverState:
    """Starting state: uniform view weights, the uniform fusion of the view
    graphs as the similarity structure, the indicator from the embedding
    operator of that structure with unit reweighting, and the projection
    solved once against that indicator.
    """
    x = np.asarray(x, dtype=float)
    n = _check_problem(views, x, hp)
    v = len(views)
    d = x.shape[1]

    w = np.full((v, n), 1.0 / v)
    fused = _fused_columns(views, w)
    s = AffinityGraph(project_simplex_columns(fused))
    gamma_diag = np.ones(d)
    state = SolverState(p=np.zeros((d, hp.k)), f=np.zeros((n, hp.k)), s=s,
                        w=w, gamma_diag=gamma_diag)
    state.f = update_f(state, x, hp)
    q = _regularized_gram(x, hp.gamma, gamma_diag)
    state.p = solve_spd(q, x.T @ state.f)
    state.objective_trace.append(objective(state, views, x, hp))
    state.components_trace.append(connected_components(s))
    state.alpha_trace.append(hp.alpha)
    return state


def fit(views: list[AffinityGraph], x: np.ndarray, hp: Hyperparams) -> SolverState:
    """Run the alternating loop until the relative objective change drops
    below hp.tol_rel_objective or max_outer_iters is reached.

    With adaptive alpha enabled, alpha doubles while the structure has
    fewer than k components and halves while it has more; iterations that
    change alpha do not count toward convergence. Non-convergence leaves
    state.converged False rather than raising.
    """
    x = np.asarray(x, dtype=float)
    _check_problem(views, x, hp)
    state = initialize(views, x, hp)
    current = hp
    for it in range(1, hp.max_outer_iters + 1):
        try:
            state.p, state.gamma_diag = update_p(state, x, current)
            state.f = update_f(state, x, current)
            state.s = update_s(state, views, current)
            state.w = update_w(state, views)
        except NumericError as exc:
            raise NumericError(f"outer iteration {it}: {exc}") from exc
        state.iteration = it

        value = objective(state, views, x, current)
        comps = connected_components(state.s)
        state.objective_trace.append(value)
        state.components_trace.append(comps)
        state.alpha_trace.append(current.alpha)

        alpha_changed = False
        if hp.adaptive_alpha and comps != hp.k:
            factor = 2.0 if comps < hp.k else 0.5
            current = replace(current, alpha=current.alpha * factor)
            alpha_changed = True

        prev = state.objective_trace[-2]
        rel = abs(prev - value) / max(abs(prev), 1e-30)
        if rel < hp.tol_rel_objective and not alpha_changed:
            state.converged = True
            break
    return state
