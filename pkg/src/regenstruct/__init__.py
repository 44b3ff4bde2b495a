"""Exact regenerative partition and composition structures."""
from .core import (
    EMPTY,
    AmbiguityError,
    DomainError,
    InsufficientDataError,
    InvariantViolation,
    Partition,
    RegenError,
    ResourceError,
    ValidationError,
    delete_part,
    enumerate_compositions,
    enumerate_partitions,
    get_limits,
    make_rng,
    override_limits,
    rank,
    rising_factorial,
    set_limits,
)
from .eppf import (
    PartitionDistribution,
    TwoParamModel,
    check_consistent,
    consistency_residual,
    eppf_ewens,
    eppf_two_param,
    model_levels,
    partition_distribution,
    project_one_level,
)
from .kernels import (
    COSIZE,
    SIZE_BIASED,
    UNIFORM,
    DecrementRow,
    DeletionKernel,
    Dichotomy,
    TableKernel,
    TauKernel,
    d_from_p_q,
    kernel_value,
    positivity_dichotomy,
    q_from_p_d,
    reduces_residual,
    regen_residual,
    tau_for,
)
from .regen import (
    DecrementMatrix,
    NotRegenerative,
    Verdict,
    composition_probability,
    full_matrix,
    hypgeom_project,
    invert_p_to_q,
    matrix_levels,
    partition_law,
    partition_probability,
    regenerativity_check,
    sample_composition,
    two_param_decrement,
)
from .paintbox import (
    LEBESGUE,
    BetaComponent,
    LevyMeasureSpec,
    beta_spec,
    decrement_from_paintbox,
    dirac,
    laplace_exponent,
    phi_nr,
    sample_composition_via_paintbox,
)
from .chains import (
    ExactChain,
    FragmentedPermutation,
    exact_chain,
    pushforward_check,
    reachability_check,
    simulate_chain,
    stationary,
    step_composition,
    step_fragperm,
    verify_l1,
)

__version__ = "0.1.0"
