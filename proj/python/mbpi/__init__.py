"""Critical Markov branching processes with immigration: kernel, limits, rates and simulation."""

from ._core import (
    BranchingLaw,
    ConfigError,
    DomainError,
    ImmigrationLaw,
    ModelSpec,
    NumericError,
    PreconditionError,
    __version__,
    compute_B,
    compute_F,
    compute_P,
    compute_pi,
    compute_U,
    invariant_measure,
    list_families,
    make_stable_immigration,
    make_stable_offspring,
    rate_slope,
    run,
    simulate_pmf,
    transition_probs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
