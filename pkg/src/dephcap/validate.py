"""Cross-oracle validation suites behind the `validate` CLI command.

Each suite exercises one structural guarantee on randomized inputs and
reports its worst observed deviation. quick keeps everything under a few
seconds; full runs the oracle comparisons at their acceptance scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fock, replica
from .fock import DephasingParams

EQUIV_TOL = 1e-8
EXACT_TOL = 1e-14
DOMINANCE_SLACK = 1e-9


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    detail: str


def _max_diff(a: fock.FockDensityMatrix, b: fock.FockDensityMatrix) -> float:
    return float(np.abs(a.entries - b.entries).max())


def suite_representation_equivalence(level: str = "quick") -> SuiteResult:
    """Closed form vs Kraus, RK4, dilation trace and quadrature, pairwise."""
    rng = np.random.default_rng(101)
    n_states = 20 if level == "full" else 6
    dims = [rng.integers(2, 7) if level == "full" else rng.integers(2, 6) for _ in range(n_states)]
    worst = 0.0
    for dim in dims:
        rho = fock.random_density_matrix(int(dim), rng)
        for gamma in (0.25, 1.0, 2.0):
            params = DephasingParams(gamma)
            outs = [
                fock.apply_dephasing(rho, params),
                fock.kraus_apply(rho, params).state,
                fock.evolve_master_equation(
                    rho, gamma, fock.master_equation_steps(gamma, rho.dim, 1e-10)
                ),
                fock.dilation_oracle(rho, params)[0],
                fock.phase_average_oracle(rho, params, 96),
            ]
            for i in range(len(outs)):
                for k in range(i + 1, len(outs)):
                    worst = max(worst, _max_diff(outs[i], outs[k]))
    return SuiteResult(
        "representation_equivalence",
        worst < EQUIV_TOL,
        worst,
        f"{n_states} states, pairwise max deviation {worst:.3e} (tol {EQUIV_TOL:.0e})",
    )


def suite_replica_vs_bruteforce(level: str = "quick") -> SuiteResult:
    """entropy_replica against the explicit coherent-mixture construction."""
    rng = np.random.default_rng(202)
    n_maxes = range(1, 6) if level == "full" else (1, 3)
    samples = 50 if level == "full" else 10
    worst = 0.0
    for n_max in n_maxes:
        for gamma in (0.25, 1.0, 2.0):
            params = DephasingParams(gamma)
            for _ in range(samples):
                p = replica.InputDistribution(rng.dirichlet(np.ones(n_max + 1)))
                fast = replica.entropy_replica(p, params)
                slow = replica.entropy_bruteforce_oracle(p, params)
                worst = max(worst, abs(fast - slow))
    return SuiteResult(
        "replica_vs_bruteforce",
        worst < EQUIV_TOL,
        worst,
        f"max |replica - bruteforce| {worst:.3e} (tol {EQUIV_TOL:.0e})",
    )


def suite_semigroup(level: str = "quick") -> SuiteResult:
    """N_g2 after N_g1 equals N_{g1+g2} elementwise."""
    rng = np.random.default_rng(303)
    pairs = [(0.0, 0.7), (0.5, 0.5), (2.0, 3.0)]
    pairs += [tuple(rng.uniform(0.0, 3.0, 2)) for _ in range(10)]
    worst = 0.0
    for g1, g2 in pairs:
        rho = fock.random_density_matrix(5, rng)
        composed, direct = fock.compose_check(g1, g2, rho)
        worst = max(worst, _max_diff(composed, direct))
    return SuiteResult(
        "semigroup",
        worst < EXACT_TOL,
        worst,
        f"max composition defect {worst:.3e} (tol {EXACT_TOL:.0e})",
    )


def suite_covariance(level: str = "quick") -> SuiteResult:
    """Channel commutes with phase rotations U_theta."""
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(12):
        rho = fock.random_density_matrix(int(rng.integers(2, 6)), rng)
        theta = float(rng.uniform(0.0, 2.0 * np.pi))
        params = DephasingParams(float(rng.uniform(0.0, 3.0)))
        a = fock.apply_dephasing(fock.phase_rotate(rho, theta), params)
        b = fock.phase_rotate(fock.apply_dephasing(rho, params), theta)
        worst = max(worst, _max_diff(a, b))
    return SuiteResult(
        "covariance",
        worst < EXACT_TOL,
        worst,
        f"max commutation defect {worst:.3e} (tol {EXACT_TOL:.0e})",
    )


def suite_proposition1(level: str = "quick") -> SuiteResult:
    """Dephasing to the diagonal never lowers the coherent information."""
    rng = np.random.default_rng(505)
    n_states = 50 if level == "full" else 20
    worst = -np.inf
    for i in range(n_states):
        dim = 3 + i % 3  # N in {2, 3, 4}
        rho = fock.random_density_matrix(dim, rng)
        diag = fock.diagonal_state(rho.diagonal())
        for gamma in (0.5, 1.0):
            params = DephasingParams(gamma)
            excess = fock.coherent_information(rho, params) - fock.coherent_information(
                diag, params
            )
            worst = max(worst, excess)
    return SuiteResult(
        "proposition1_dominance",
        worst <= DOMINANCE_SLACK,
        worst,
        f"max J(rho) - J(diag rho) = {worst:.3e} (allowed {DOMINANCE_SLACK:.0e})",
    )


_SUITES = (
    suite_representation_equivalence,
    suite_replica_vs_bruteforce,
    suite_semigroup,
    suite_covariance,
    suite_proposition1,
)


def run_validation(level: str = "quick") -> list[SuiteResult]:
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    return [suite(level) for suite in _SUITES]
