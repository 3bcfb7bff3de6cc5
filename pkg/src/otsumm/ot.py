"""Cross-domain alignment by entropic optimal transport.

Two solvers are provided: classic Sinkhorn scaling on the Gibbs kernel
exp(-C/lambda), with a log-domain mode for small regularization, and the
proximal-point scheme that repeatedly re-scales the kernel-times-plan
product with a small inner scaling loop. A small exact LP solver acts as
the ground-truth oracle for both.

Orientation convention, used everywhere: cost rows index the visual items
(K of them), columns index the textual items (M). The reported distance is
the plain inner product <C, T>; the entropy term is never included.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp

from .errors import (
    DimMismatch,
    DivisionUnderflow,
    EmptyCandidateSet,
    NumericalUnderflow,
    TooLarge,
    ZeroNormRow,
    ZeroSize,
)
from .model import CandidatePair, EmbeddingMatrix

LP_ORACLE_MAX_CELLS = 64

SOLVERS = ("sinkhorn", "alg1")


@dataclass(frozen=True)
class CostMatrix:
    """K x M pairwise transport costs; cosine costs live in [0, 2]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"cost matrix must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("cost matrix contains non-finite entries")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def K(self) -> int:
        return int(self.values.shape[0])

    @property
    def M(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class MarginalPair:
    """Strictly positive row/column masses, each summing to one."""

    mu: np.ndarray
    nu: np.ndarray

    def __post_init__(self) -> None:
        mu = np.ascontiguousarray(np.asarray(self.mu, dtype=np.float64))
        nu = np.ascontiguousarray(np.asarray(self.nu, dtype=np.float64))
        for name, vec in (("mu", mu), ("nu", nu)):
            if vec.ndim != 1 or vec.size < 1:
                raise ValueError(f"{name} must be a nonempty vector")
            if np.any(vec <= 0):
                raise ValueError(f"{name} must be strictly positive")
            if abs(vec.sum() - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1 within 1e-9, got {vec.sum()!r}")
        mu.setflags(write=False)
        nu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)


@dataclass(frozen=True)
class TransportPlan:
    """A nonnegative coupling with its <C, T> distance and solve metadata."""

    T: np.ndarray
    distance: float
    iterations_used: int
    marginal_violation: float
    converged: bool

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.T, dtype=np.float64))
        arr.setflags(write=False)
        object.__setattr__(self, "T", arr)


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by both solvers.

    lam is the entropic weight, beta the proximal kernel temperature,
    outer_iters/inner_iters the proximal loop counts, tol the marginal
    residual target, max_iters the Sinkhorn safety cap.
    """

    lam: float = 0.1
    beta: float = 0.5
    outer_iters: int = 100
    inner_iters: int = 1
    tol: float = 1e-6
    max_iters: int = 10_000

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.outer_iters < 1 or self.inner_iters < 1:
            raise ValueError("iteration counts must be at least 1")
        if not (0 < self.tol < 1):
            raise ValueError("tol must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


def cosine_cost(V: EmbeddingMatrix, E: EmbeddingMatrix) -> CostMatrix:
    """C[k, m] = 1 - cos(V row k, E row m), clipped into [0, 2].

    Rows index the visual items, columns the textual items; the transpose
    identity cosine_cost(V, E) == cosine_cost(E, V).T holds exactly.
    """
    if V.dims != E.dims:
        raise DimMismatch(f"dims differ: visual {V.dims} vs textual {E.dims}")
    vu = _unit_rows(V.data, "visual")
    eu = _unit_rows(E.data, "textual")
    cost = 1.0 - vu @ eu.T
    return CostMatrix(np.clip(cost, 0.0, 2.0))


def _unit_rows(data: np.ndarray, label: str) -> np.ndarray:
    arr = data.astype(np.float64)
    norms = np.linalg.norm(arr, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ZeroNormRow(f"{label} row {int(zero[0])} has zero norm")
    return arr / norms[:, None]


def uniform_marginals(K: int, M: int) -> MarginalPair:
    """mu = (1/K, ...), nu = (1/M, ...)."""
    if K < 1 or M < 1:
        raise ZeroSize(f"marginal sizes must be >= 1, got K={K}, M={M}")
    return MarginalPair(np.full(K, 1.0 / K), np.full(M, 1.0 / M))


def _violation(T: np.ndarray, mu: np.ndarray, nu: np.ndarray) -> float:
    row = np.max(np.abs(T.sum(axis=1) - mu))
    col = np.max(np.abs(T.sum(axis=0) - nu))
    return float(max(row, col))


def _forced_plan(C: np.ndarray, mu: np.ndarray, nu: np.ndarray) -> TransportPlan:
    # With a single row or column the marginals pin down the coupling.
    T = nu[None, :].copy() if mu.size == 1 else mu[:, None].copy()
    dist = float(np.sum(C * T))
    return TransportPlan(T, dist, 0, _violation(T, mu, nu), True)


def sinkhorn_entropic(
    C: CostMatrix,
    w: MarginalPair,
    cfg: SolverConfig,
    mode: str = "auto",
) -> TransportPlan:
    """Minimize <T, C> + lam * sum T log T over couplings of (mu, nu).

    mode "scaling" runs plain kernel scaling and raises NumericalUnderflow
    if exp(-C/lam) vanishes; "log" works on dual potentials and survives
    arbitrarily small lam; "auto" starts in scaling mode and switches to
    log on underflow. The reported distance is <C, T> without the entropy
    term.
    """
    if mode not in ("auto", "scaling", "log"):
        raise ValueError(f"unknown sinkhorn mode {mode!r}")
    Cv = C.values
    mu, nu = w.mu, w.nu
    if mu.size != C.K or nu.size != C.M:
        raise DimMismatch(f"marginals ({mu.size}, {nu.size}) do not fit cost {C.K}x{C.M}")
    if C.K == 1 or C.M == 1:
        return _forced_plan(Cv, mu, nu)
    if mode == "log":
        return _sinkhorn_log(Cv, mu, nu, cfg)
    kernel = np.exp(-Cv / cfg.lam)
    if np.any(kernel == 0.0):
        if mode == "scaling":
            raise NumericalUnderflow(
                f"exp(-C/lambda) underflowed at lambda={cfg.lam}; use log-domain mode"
            )
        return _sinkhorn_log(Cv, mu, nu, cfg)
    try:
        return _sinkhorn_scaling(kernel, Cv, mu, nu, cfg)
    except NumericalUnderflow:
        if mode == "scaling":
            raise
        return _sinkhorn_log(Cv, mu, nu, cfg)


def _sinkhorn_scaling(
    kernel: np.ndarray, Cv: np.ndarray, mu: np.ndarray, nu: np.ndarray, cfg: SolverConfig
) -> TransportPlan:
    v = np.ones_like(nu)
    u = np.ones_like(mu)
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        Kv = kernel @ v
        if np.any(Kv == 0.0):
            raise NumericalUnderflow("kernel-vector product underflowed to zero")
        u = mu / Kv
        Ku = kernel.T @ u
        if np.any(Ku == 0.0):
            raise NumericalUnderflow("kernel-vector product underflowed to zero")
        v = nu / Ku
        T = u[:, None] * kernel * v[None, :]
        if _violation(T, mu, nu) <= cfg.tol:
            converged = True
            break
    T = u[:, None] * kernel * v[None, :]
    viol = _violation(T, mu, nu)
    return TransportPlan(T, float(np.sum(Cv * T)), iterations, viol, converged)


def _sinkhorn_log(
    Cv: np.ndarray, mu: np.ndarray, nu: np.ndarray, cfg: SolverConfig
) -> TransportPlan:
    lam = cfg.lam
    log_mu = np.log(mu)
    log_nu = np.log(nu)
    f = np.zeros_like(mu)
    g = np.zeros_like(nu)
    converged = False
    iterations = 0
    # Warm-start through a decreasing regularization schedule: potentials for
    # a larger lam are excellent initializers, which keeps the iteration
    # count flat even at lam = 1e-3 on O(1) costs.
    schedule = []
    level = max(lam, float(np.max(Cv)) / 4.0 if np.max(Cv) > 0 else lam)
    while level > lam * 1.5:
        schedule.append(level)
        level /= 3.0
    for warm_lam in schedule:
        for _ in range(20):
            f = warm_lam * (log_mu - logsumexp((g[None, :] - Cv) / warm_lam, axis=1))
            g = warm_lam * (log_nu - logsumexp((f[:, None] - Cv) / warm_lam, axis=0))
    for iterations in range(1, cfg.max_iters + 1):
        f = lam * (log_mu - logsumexp((g[None, :] - Cv) / lam, axis=1))
        g = lam * (log_nu - logsumexp((f[:, None] - Cv) / lam, axis=0))
        T = np.exp((f[:, None] + g[None, :] - Cv) / lam)
        if _violation(T, mu, nu) <= cfg.tol:
            converged = True
            break
    T = np.exp((f[:, None] + g[None, :] - Cv) / lam)
    viol = _violation(T, mu, nu)
    return TransportPlan(T, float(np.sum(Cv * T)), iterations, viol, converged)


def algorithm1_distance(
    V: EmbeddingMatrix, E: EmbeddingMatrix, cfg: SolverConfig
) -> TransportPlan:
    """Proximal-point alignment distance over cosine costs.

    Literal procedure: G = exp(-C/beta); sigma = (1/M) 1; T = 1 1^T; then
    N outer rounds of Q = G * T followed by L inner scalings
    delta = 1/(K Q sigma), sigma = 1/(M Q^T delta), closing each round with
    T = diag(delta) Q diag(sigma). Marginals are uniform by construction.
    Returns <C, T> as the distance.
    """
    C = cosine_cost(V, E)
    Cv = C.values
    K, M = C.K, C.M
    G = np.exp(-Cv / cfg.beta)
    sigma = np.full(M, 1.0 / M)
    T = np.ones((K, M))
    delta = np.full(K, 1.0 / K)
    for _ in range(cfg.outer_iters):
        Q = G * T
        for _ in range(cfg.inner_iters):
            Qs = Q @ sigma
            if np.any(Qs <= 0.0) or not np.all(np.isfinite(Qs)):
                raise DivisionUnderflow("Q sigma fell below the machine floor")
            delta = 1.0 / (K * Qs)
            Qd = Q.T @ delta
            if np.any(Qd <= 0.0) or not np.all(np.isfinite(Qd)):
                raise DivisionUnderflow("Q^T delta fell below the machine floor")
            sigma = 1.0 / (M * Qd)
        T = delta[:, None] * Q * sigma[None, :]
    w = uniform_marginals(K, M)
    viol = _violation(T, w.mu, w.nu)
    return TransportPlan(T, float(np.sum(Cv * T)), cfg.outer_iters, viol, viol <= cfg.tol)


def lp_oracle(C: CostMatrix, w: MarginalPair) -> TransportPlan:
    """Exact optimum of the unregularized transport LP (desk-scale only).

    Solves min <C, T> s.t. T 1 = mu, T^T 1 = nu, T >= 0 with an exact
    simplex method; instances are capped at K*M <= 64 cells.
    """
    K, M = C.K, C.M
    if K * M > LP_ORACLE_MAX_CELLS:
        raise TooLarge(f"lp_oracle caps at {LP_ORACLE_MAX_CELLS} cells, got {K * M}")
    if w.mu.size != K or w.nu.size != M:
        raise DimMismatch(f"marginals ({w.mu.size}, {w.nu.size}) do not fit cost {K}x{M}")
    cost = C.values.ravel()
    # Row-sum constraints, then column sums with the final (redundant) one
    # dropped so the equality system has full rank.
    a_eq = np.zeros((K + M - 1, K * M))
    b_eq = np.zeros(K + M - 1)
    for k in range(K):
        a_eq[k, k * M : (k + 1) * M] = 1.0
        b_eq[k] = w.mu[k]
    for m in range(M - 1):
        a_eq[K + m, m::M] = 1.0
        b_eq[K + m] = w.nu[m]
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed to solve: {res.message}")
    T = np.maximum(res.x.reshape(K, M), 0.0)
    return TransportPlan(T, float(res.fun), 0, _violation(T, w.mu, w.nu), True)


def solve_alignment(
    V: EmbeddingMatrix, E: EmbeddingMatrix, solver: str, cfg: SolverConfig
) -> TransportPlan:
    """Cosine cost + the chosen solver under uniform marginals."""
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}, expected one of {SOLVERS}")
    if solver == "alg1":
        return algorithm1_distance(V, E, cfg)
    C = cosine_cost(V, E)
    return sinkhorn_entropic(C, uniform_marginals(C.K, C.M), cfg)


def select_best_pair(
    pairs: list[CandidatePair],
    solver: str,
    cfg: SolverConfig,
    workers: int = 1,
) -> CandidatePair:
    """Fill every pair's distance and return the best-aligned pair.

    The minimum distance wins; exact ties fall to the lowest
    (visual_segment_id, textual_segment_id). Solves may run on a thread
    pool; results are committed by pair index so the outcome is identical
    for any worker count.
    """
    if not pairs:
        raise EmptyCandidateSet("no candidate pairs to align")

    def solve(pair: CandidatePair) -> float:
        plan = solve_alignment(pair.visual_candidate, pair.textual_candidate, solver, cfg)
        return plan.distance

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            distances = list(pool.map(solve, pairs))
    else:
        distances = [solve(p) for p in pairs]
    for pair, dist in zip(pairs, distances):
        pair.distance = dist
    return min(pairs, key=lambda p: (p.distance, p.visual_segment_id, p.textual_segment_id))
