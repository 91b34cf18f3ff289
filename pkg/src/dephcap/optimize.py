"""Capacity maximization over the input simplex, bounds and asymptotics.

The truncated capacity is the maximum of J(p) = H(p) - S(A(p)) over
probability vectors p on Fock levels 0..N. J is concave (the channel is
degradable), so mirror ascent with multiplicative updates converges to
the global value; restarts only guard against numerical stagnation.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import replica
from .fock import DephasingParams
from .replica import InputDistribution

_LN2 = math.log(2.0)

GRADIENT_RESIDUAL_TOL = 1e-9
OBJECTIVE_STALL_ITERS = 5
WEIGHT_FLOOR = 1e-14
FD_STEP = 1e-6
MAX_BACKTRACKS = 60
_GRADIENT_MODES = ("analytic", "finite_difference")


@dataclass(frozen=True)
class OptimizerConfig:
    objective_tolerance: float = 1e-10
    max_iterations: int = 20000
    restarts: int = 3
    gradient_mode: str = "analytic"
    seed: int = 0

    def __post_init__(self):
        if not self.objective_tolerance > 0.0:
            raise ValueError("objective_tolerance must be > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.gradient_mode not in _GRADIENT_MODES:
            raise ValueError(f"gradient_mode must be one of {_GRADIENT_MODES}")


@dataclass(frozen=True)
class CapacityResult:
    """One optimized point: truncation N, rate gamma and the value in bits."""

    gamma: float
    n_max: int
    q_bits: float
    p_opt: InputDistribution | None
    iterations: int
    converged: bool
    gradient_residual: float
    wall_time: float | None = None

    def __post_init__(self):
        if math.isnan(self.q_bits):
            if self.converged:
                raise ValueError("a converged result cannot carry q_bits = nan")
            return
        if self.q_bits < 0.0:
            raise ValueError(f"q_bits must be >= 0, got {self.q_bits!r}")
        if self.q_bits > math.log2(self.n_max + 1) + 1e-9:
            raise ValueError(f"q_bits {self.q_bits!r} exceeds log2(N+1)")

    def mean_energy(self) -> float:
        if self.p_opt is None:
            return math.nan
        return self.p_opt.mean_energy()


@dataclass(frozen=True)
class DiscreteGaussianAnsatz:
    """p_m proportional to e^{-(m-mu)^2 / (2 sigma^2)} on m = 0..N, mu = N/2."""

    n_max: int
    sigma: float
    mu: float | None = None

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if not self.sigma > 0.0:
            raise ValueError("sigma must be > 0")
        if self.mu is None:
            object.__setattr__(self, "mu", self.n_max / 2.0)


@dataclass(frozen=True)
class TwoPointBound:
    """Coherent information of the equal mixture of |n> and |n+j>."""

    gamma: float
    j: int
    q_plus: float
    q_minus: float
    value_bits: float


def binary_entropy_bits(q_plus: float, q_minus: float) -> float:
    """H2 of a two-point distribution, with 0 log 0 = 0."""
    h = 0.0
    for q in (q_plus, q_minus):
        if q > 0.0:
            h -= q * math.log(q)
    return h / _LN2


def two_point_lower_bound(params: DephasingParams, j: int) -> TwoPointBound:
    """Lower bound 1 - H2((1 +- e^{-gamma j^2/2})/2); independent of the base level."""
    if j < 1:
        raise ValueError("j must be >= 1")
    e = math.exp(-params.gamma * j ** 2 / 2.0)
    q_plus = (1.0 + e) / 2.0
    q_minus = (1.0 - e) / 2.0
    value = 1.0 - binary_entropy_bits(q_plus, q_minus)
    return TwoPointBound(params.gamma, j, q_plus, q_minus, value)


# ---------------------------------------------------------------------------
# objective and gradient

def _objective_and_gradient_analytic(weights, indices, gamma):
    """(J, unprojected gradient) on the support, sharing one eigendecomposition.

    dJ/dp_m = -log2 p_m + <c_m| log2 Omega |c_m>; the overlap term comes
    from the eigenpairs of M = D^{1/2} G D^{1/2}: an eigenvector v of M
    with eigenvalue a lifts to the Omega eigenvector C D^{1/2} v / sqrt(a),
    so |<u_i|c_m>|^2 = (V^T D^{1/2} G)[i,m]^2 / a_i.
    """
    g_kernel = replica.gram_matrix(DephasingParams(gamma), indices)
    sq = np.sqrt(weights)
    m = sq[:, None] * g_kernel * sq[None, :]
    a, v = np.linalg.eigh(m)
    pos = a > 0.0
    a_pos = a[pos]
    entropy = float(-(a_pos * np.log(a_pos)).sum() / _LN2) if a_pos.size else 0.0
    shannon = float(-(weights * np.log(weights)).sum() / _LN2)
    # weights |<u_i|c_m>|^2 are <= 1 and <= a_i/p_m; modes below the relative
    # floor contribute O(a |log a|) and only amplify eigensolver noise
    keep = a > 1e-14 * a.max()
    a_k = a[keep]
    b = v[:, keep].T @ (sq[:, None] * g_kernel)
    proj = np.clip(b ** 2 / a_k[:, None], 0.0, 1.0)
    overlap_term = (np.log2(a_k) @ proj)
    grad = -np.log2(weights) + overlap_term
    return shannon - entropy, grad


def _fd_gradient(weights, indices, gamma, step=FD_STEP):
    """Central differences of the raw objective along support coordinates."""
    full = np.zeros(int(indices.max()) + 1)
    full[indices] = weights
    grad = np.empty(weights.size)
    for k, idx in enumerate(indices):
        hi = full.copy()
        lo = full.copy()
        hi[idx] += step
        lo[idx] -= step
        grad[k] = (
            replica._objective_bits_raw(hi, gamma) - replica._objective_bits_raw(lo, gamma)
        ) / (2.0 * step)
    return grad


def objective_gradient(
    p: InputDistribution, params: DephasingParams, mode: str = "analytic"
) -> np.ndarray:
    """Gradient of J(p) = H(p) - S(A(p)), projected onto the simplex tangent.

    Both modes return the tangent-space projection (component sums vanish),
    which is the quantity that drives simplex ascent and the one on which
    the two modes are comparable; unprojected gradients differ only by the
    constant multiples of the all-ones vector that normalization absorbs.
    """
    if mode not in _GRADIENT_MODES:
        raise ValueError(f"mode must be one of {_GRADIENT_MODES}")
    if p.p.min() <= 0.0:
        raise ValueError("gradient requires strictly positive p")
    indices = np.arange(p.dim)
    if mode == "analytic":
        _, grad = _objective_and_gradient_analytic(p.p, indices, params.gamma)
    else:
        grad = _fd_gradient(p.p, indices, params.gamma)
    bad = np.flatnonzero(~np.isfinite(grad))
    if bad.size:
        raise ValueError(f"non-finite gradient component at index {bad[0]}")
    return grad - grad.mean()


# ---------------------------------------------------------------------------
# mirror ascent

class _AscentOutcome(NamedTuple):
    p_full: np.ndarray
    value: float
    iterations: int
    converged: bool
    residual: float


def _eval_support(weights, indices, gamma, mode):
    if mode == "analytic":
        return _objective_and_gradient_analytic(weights, indices, gamma)
    value = replica._objective_bits_raw(_embed(weights, indices), gamma)
    return value, _fd_gradient(weights, indices, gamma)


def _embed(weights, indices):
    full = np.zeros(int(indices.max()) + 1)
    full[indices] = weights
    return full


def _mirror_ascent(p0: np.ndarray, gamma: float, config: OptimizerConfig) -> _AscentOutcome:
    """Exponentiated-gradient ascent with backtracking step control.

    Multiplicative updates keep the iterate positive and normalized for
    free. Weights that sink below 1e-14 are frozen at zero and leave the
    support for good; restarts handle re-entry.
    """
    dim = p0.size
    support = np.flatnonzero(p0 > WEIGHT_FLOOR)
    w = p0[support] / p0[support].sum()
    value, grad = _eval_support(w, support, gamma, config.gradient_mode)
    eta = 1.0
    stall = 0
    converged = False
    residual = math.inf
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        centred = grad - grad.mean()
        residual = float(np.linalg.norm(centred))
        if residual < GRADIENT_RESIDUAL_TOL:
            converged = True
            break
        accepted = False
        first_try = False
        for attempt in range(MAX_BACKTRACKS):
            x = eta * centred
            x -= x.max()
            w_new = w * np.exp(x)
            w_new /= w_new.sum()
            keep = w_new >= WEIGHT_FLOOR
            sup_new = support[keep]
            w_new = w_new[keep]
            w_new /= w_new.sum()
            value_new, grad_new = _eval_support(w_new, sup_new, gamma, config.gradient_mode)
            if value_new >= value:
                accepted = True
                first_try = attempt == 0
                break
            eta *= 0.5
        if not accepted:
            # no step size improves the objective: numerically stationary
            converged = True
            break
        delta = value_new - value
        w, support, value, grad = w_new, sup_new, value_new, grad_new
        if first_try:
            eta = min(eta * 1.3, 100.0)
        stall = stall + 1 if delta < config.objective_tolerance else 0
        if stall >= OBJECTIVE_STALL_ITERS:
            converged = True
            break
    centred = grad - grad.mean()
    residual = float(np.linalg.norm(centred))
    p_full = np.zeros(dim)
    p_full[support] = w
    return _AscentOutcome(p_full, value, iterations, converged, residual)


def default_sigma(n_max: int) -> float:
    """Width fit of the optimal discrete Gaussian, sigma = 0.2 N + 0.6."""
    return 0.2 * n_max + 0.6


def _ansatz_weights(n_max: int, sigma: float, mu: float | None = None) -> np.ndarray:
    centre = n_max / 2.0 if mu is None else mu
    m = np.arange(n_max + 1, dtype=float)
    z = -((m - centre) ** 2) / (2.0 * sigma ** 2)
    z -= z.max()
    w = np.exp(z)
    return w / w.sum()


def ansatz_distribution(ansatz: DiscreteGaussianAnsatz) -> InputDistribution:
    """Normalized discrete Gaussian on 0..N centered at mu (default N/2)."""
    return InputDistribution(_ansatz_weights(ansatz.n_max, ansatz.sigma, ansatz.mu))


def _starting_points(n_max: int, config: OptimizerConfig) -> list[np.ndarray]:
    """Discrete-Gaussian default start, uniform fallback, then perturbed copies."""
    rng = np.random.default_rng(config.seed)
    base = _ansatz_weights(n_max, default_sigma(n_max))
    starts = [base]
    if config.restarts >= 2:
        starts.append(np.full(n_max + 1, 1.0 / (n_max + 1)))
    while len(starts) < config.restarts:
        pert = base * np.exp(0.15 * rng.standard_normal(n_max + 1))
        starts.append(pert / pert.sum())
    return starts


def maximize_coherent_information(
    n_max: int, params: DephasingParams, config: OptimizerConfig | None = None
) -> CapacityResult:
    """Maximize J over the simplex on Fock levels 0..N.

    Concavity makes every local maximizer globally optimal in value; the
    best of the restarted ascents is returned. converged means the
    tangent-projected gradient norm fell below 1e-9 or the objective
    change stayed under objective_tolerance.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    cfg = config if config is not None else OptimizerConfig()
    t0 = time.perf_counter()
    best: _AscentOutcome | None = None
    for p0 in _starting_points(n_max, cfg):
        outcome = _mirror_ascent(p0, params.gamma, cfg)
        if best is None or outcome.value > best.value:
            best = outcome
    q = min(max(best.value, 0.0), math.log2(n_max + 1))
    return CapacityResult(
        gamma=params.gamma,
        n_max=n_max,
        q_bits=q,
        p_opt=InputDistribution(best.p_full),
        iterations=best.iterations,
        converged=best.converged,
        gradient_residual=best.residual,
        wall_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# discrete Gaussian ansatz search

def _golden_section_max(f, lo: float, hi: float, tol: float = 1e-10):
    """Golden-section search for the maximum of a unimodal f on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    if not (math.isfinite(fc) and math.isfinite(fd)):
        raise ValueError(f"bracket failure: non-finite objective on [{lo}, {hi}]")
    while (b - a) > tol * (1.0 + abs(a) + abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_over_ansatz(n_max: int, params: DephasingParams):
    """One-dimensional maximization of J over the ansatz width sigma.

    Returns (sigma_opt, q_bits) from a golden-section search on the
    bracket [0.05, 5N].
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")

    def value(sigma: float) -> float:
        return replica._objective_bits_raw(_ansatz_weights(n_max, sigma), params.gamma)

    sigma_opt, q = _golden_section_max(value, 0.05, 5.0 * n_max)
    return sigma_opt, max(q, 0.0)


# ---------------------------------------------------------------------------
# large-gamma asymptotics

def asymptotic_capacity(p: InputDistribution, params: DephasingParams) -> float:
    """Leading large-gamma behavior of the coherent information, in bits.

    e^{-gamma} sum_m p_m p_{m+1} / (p_m - p_{m+1}) log2(p_m / p_{m+1}),
    with the removable singularity at p_m = p_{m+1} replaced by its limit
    p_m / ln 2 and zero-probability terms dropped. Accurate to relative
    order e^{-gamma}; intended for e^{-gamma/2} < 0.1.
    """
    if params.epsilon >= 0.1:
        warnings.warn(
            f"asymptotic formula is reliable for e^(-gamma/2) < 0.1; "
            f"gamma={params.gamma} gives {params.epsilon:.3f}",
            RuntimeWarning,
            stacklevel=2,
        )
    w = p.p
    total = 0.0
    for m in range(w.size - 1):
        a, b = w[m], w[m + 1]
        if a == 0.0 or b == 0.0:
            continue
        if abs(a - b) < 1e-8 * max(a, b):
            total += a / _LN2
        else:
            total += a * b / (a - b) * math.log2(a / b)
    return math.exp(-params.gamma) * total


# ---------------------------------------------------------------------------
# parameter sweeps

def _sweep_point(n_max: int, gamma: float, config: OptimizerConfig) -> CapacityResult:
    t0 = time.perf_counter()
    try:
        return maximize_coherent_information(n_max, DephasingParams(gamma), config)
    except Exception as exc:  # record the failure, keep sweeping
        warnings.warn(f"sweep point (N={n_max}, gamma={gamma}) failed: {exc}", RuntimeWarning)
        return CapacityResult(
            gamma=gamma,
            n_max=n_max,
            q_bits=math.nan,
            p_opt=None,
            iterations=0,
            converged=False,
            gradient_residual=math.nan,
            wall_time=time.perf_counter() - t0,
        )


def capacity_sweep(
    gammas,
    n_maxes,
    config: OptimizerConfig | None = None,
    max_workers: int | None = None,
) -> list[CapacityResult]:
    """One CapacityResult per (N, gamma) pair, ordered by (N, gamma).

    Points are independent; with max_workers > 1 they run on a thread
    pool. Results depend only on (grids, config.seed), never on the
    execution order. Each result carries its wall time.
    """
    gamma_grid = [float(g) for g in gammas]
    n_grid = [int(n) for n in n_maxes]
    if not gamma_grid or not n_grid:
        raise ValueError("gamma and N grids must be nonempty")
    cfg = config if config is not None else OptimizerConfig()
    points = [(n, g) for n in sorted(n_grid) for g in sorted(gamma_grid)]
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(_sweep_point, n, g, cfg) for n, g in points]
            return [f.result() for f in futures]
    return [_sweep_point(n, g, cfg) for n, g in points]
