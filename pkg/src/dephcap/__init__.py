"""Quantum capacity of the bosonic dephasing channel on truncated Fock spaces."""

__version__ = "0.1.0"

from .fock import (
    CoherentVector,
    DephasingParams,
    FockDensityMatrix,
    JointState,
    TruncationError,
    apply_dephasing,
    build_dilated_state,
    coherent_information,
    complementary_output,
    compose_check,
    default_env_dim,
    diagonal_state,
    dilation_oracle,
    evolve_master_equation,
    fock_state,
    kraus_apply,
    master_equation_steps,
    phase_average_oracle,
    phase_rotate,
    pure_state,
    random_density_matrix,
    vn_entropy_bits,
)
from .replica import (
    InputDistribution,
    ReplicaMatrix,
    build_replica_matrix,
    coherent_information_diagonal,
    entropy_bruteforce_oracle,
    entropy_replica,
    gram_matrix,
    gram_overlap,
    shannon_entropy,
)
from .optimize import (
    CapacityResult,
    DiscreteGaussianAnsatz,
    OptimizerConfig,
    TwoPointBound,
    ansatz_distribution,
    asymptotic_capacity,
    binary_entropy_bits,
    capacity_sweep,
    default_sigma,
    maximize_coherent_information,
    maximize_over_ansatz,
    objective_gradient,
    two_point_lower_bound,
)

__all__ = [
    "__version__",
    "CoherentVector",
    "DephasingParams",
    "FockDensityMatrix",
    "JointState",
    "TruncationError",
    "apply_dephasing",
    "build_dilated_state",
    "coherent_information",
    "complementary_output",
    "compose_check",
    "default_env_dim",
    "diagonal_state",
    "dilation_oracle",
    "evolve_master_equation",
    "fock_state",
    "kraus_apply",
    "master_equation_steps",
    "phase_average_oracle",
    "phase_rotate",
    "pure_state",
    "random_density_matrix",
    "vn_entropy_bits",
    "InputDistribution",
    "ReplicaMatrix",
    "build_replica_matrix",
    "coherent_information_diagonal",
    "entropy_bruteforce_oracle",
    "entropy_replica",
    "gram_matrix",
    "gram_overlap",
    "shannon_entropy",
    "CapacityResult",
    "DiscreteGaussianAnsatz",
    "OptimizerConfig",
    "TwoPointBound",
    "ansatz_distribution",
    "asymptotic_capacity",
    "binary_entropy_bits",
    "capacity_sweep",
    "default_sigma",
    "maximize_coherent_information",
    "maximize_over_ansatz",
    "objective_gradient",
    "two_point_lower_bound",
]
