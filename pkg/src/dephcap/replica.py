"""Entropy of the complementary output through the small replica matrix.

The environment output for a diagonal input with weights p is the
coherent-state mixture Omega = sum_m p_m |sqrt(gamma) m><sqrt(gamma) m|.
Its nonzero spectrum equals that of the (N+1)x(N+1) matrix
A[i, j] = e^{-gamma (i-j)^2 / 2} p_j, so the entropy never requires the
large environment space. A brute-force construction of Omega on a
verified truncation serves as the independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .fock import DephasingParams

_LN2 = math.log(2.0)

SUM_TOL = 1e-12
EIG_CLAMP = -1e-12


@dataclass(frozen=True)
class InputDistribution:
    """Probability vector p_0..p_N over Fock states |0>..|N>."""

    p: np.ndarray

    def __post_init__(self):
        w = np.array(self.p, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("p must be a nonempty 1-D vector")
        if w.min() < 0.0:
            raise ValueError(f"p must be nonnegative, min entry {w.min():.3e}")
        if abs(w.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"p must sum to 1 within {SUM_TOL:.0e}, got {w.sum():.15g}")
        w.setflags(write=False)
        object.__setattr__(self, "p", w)

    @classmethod
    def uniform(cls, dim: int) -> "InputDistribution":
        return cls(np.full(dim, 1.0 / dim))

    @property
    def dim(self) -> int:
        return self.p.size

    @property
    def n_max(self) -> int:
        return self.p.size - 1

    def mean_energy(self) -> float:
        return float(np.arange(self.dim) @ self.p)


@dataclass(frozen=True)
class ReplicaMatrix:
    """A = G diag(p) with G the coherent-overlap Gram kernel."""

    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def gram_overlap(params: DephasingParams, i: int, j: int) -> float:
    """Overlap <sqrt(gamma) i | sqrt(gamma) j> = e^{-gamma (i-j)^2 / 2}."""
    if i < 0 or j < 0:
        raise ValueError("indices must be nonnegative")
    return math.exp(-params.gamma * (i - j) ** 2 / 2.0)


def gram_matrix(params: DephasingParams, indices) -> np.ndarray:
    """Gram kernel e^{-gamma (i-j)^2 / 2} over the given Fock indices."""
    idx = np.asarray(indices, dtype=float)
    d = np.subtract.outer(idx, idx)
    return np.exp(-params.gamma * d ** 2 / 2.0)


def build_replica_matrix(p: InputDistribution, params: DephasingParams) -> ReplicaMatrix:
    g = gram_matrix(params, np.arange(p.dim))
    return ReplicaMatrix(g * p.p[None, :])


def _support_spectrum(weights: np.ndarray, indices: np.ndarray, gamma: float) -> np.ndarray:
    """Eigenvalues of D^{1/2} G D^{1/2}, similar to A on the support of p.

    The symmetric form keeps the spectrum real and the solver stable; the
    original Fock indices are retained so the kernel distances survive the
    restriction to the support.
    """
    g = gram_matrix(DephasingParams(gamma), indices)
    sq = np.sqrt(weights)
    return np.linalg.eigvalsh(sq[:, None] * g * sq[None, :])


def _entropy_bits_raw(weights: np.ndarray, gamma: float) -> float:
    """-sum a ln a / ln 2 over the positive replica eigenvalues.

    Works for any nonnegative weight vector (no unit-sum requirement) so
    finite differences can probe off the simplex.
    """
    idx = np.flatnonzero(weights > 0.0)
    if idx.size == 0:
        return 0.0
    a = _support_spectrum(weights[idx], idx, gamma)
    a = a[a > 0.0]
    if a.size == 0:
        return 0.0
    return float(-(a * np.log(a)).sum() / _LN2)


def _shannon_bits_raw(weights: np.ndarray) -> float:
    w = weights[weights > 0.0]
    if w.size == 0:
        return 0.0
    return float(-(w * np.log(w)).sum() / _LN2)


def _objective_bits_raw(weights: np.ndarray, gamma: float) -> float:
    """H(p) - S(A(p)) as a smooth function of raw nonnegative weights."""
    return _shannon_bits_raw(weights) - _entropy_bits_raw(weights, gamma)


def entropy_replica(p: InputDistribution, params: DephasingParams) -> float:
    """Entropy of the complementary output in bits, via the replica matrix.

    Zero-probability indices are dropped before diagonalizing; roundoff
    eigenvalues in [-1e-12, 0) are clamped to 0 and contribute nothing.
    """
    idx = np.flatnonzero(p.p > 0.0)
    a = _support_spectrum(p.p[idx], idx, params.gamma)
    if a.min() < EIG_CLAMP:
        raise ValueError(f"replica spectrum has eigenvalue {a.min():.3e} below clamp")
    a = a[a > 0.0]
    if a.size == 0:
        return 0.0
    return max(float(-(a * np.log(a)).sum() / _LN2), 0.0)


def entropy_bruteforce_oracle(
    p: InputDistribution,
    params: DephasingParams,
    env_dim: int | None = None,
    residual_bound: float = fock.DEFAULT_RESIDUAL_BOUND,
) -> float:
    """Entropy of Omega built explicitly from truncated coherent vectors.

    Refuses to run on an unverified truncation: every |sqrt(gamma) m| up
    to m = N must pass the residual check, else TruncationError.
    """
    if env_dim is None:
        env_dim = fock.default_env_dim(params, p.n_max)
    omega = fock.complementary_output(p, params, env_dim, residual_bound)
    return fock.vn_entropy_bits(omega.entries)


def shannon_entropy(p: InputDistribution) -> float:
    """-sum p log2 p with 0 log 0 = 0, in bits."""
    return _shannon_bits_raw(p.p)


def coherent_information_diagonal(p: InputDistribution, params: DephasingParams) -> float:
    """J(diag p) = H(p) - S(complementary output), in bits.

    Diagonal inputs are channel fixed points, so the channel-output
    entropy is exactly the Shannon entropy of p.
    """
    return shannon_entropy(p) - entropy_replica(p, params)
