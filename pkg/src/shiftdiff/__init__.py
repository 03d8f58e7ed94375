"""Diffusion coefficient approximations for the lifted Bernoulli shift map.

A library and CLI implementing three approximation schemes for the
parameter-dependent diffusion coefficient D(h) of a piecewise-linear
lifted doubling map, cross-validated against an exact series reference and
a Monte Carlo oracle:

- correlated random walk: truncations of the velocity-correlation sum,
- persistent random walk: one- and two-step memory chains,
- approximate Markov partitions: decay rates of lifted transition matrices.
"""

__version__ = "0.1.0"

from .correlated_walk import (
    MemorySeries,
    d_crw,
    d_exact,
    finite_convergence_order,
    memory_profile,
    memory_series,
    memory_term,
    tent,
)
from .map_core import (
    CylinderSet,
    DiffusionEstimate,
    MapParams,
    OrbitRecord,
    cylinder_intervals,
    cylinder_measures,
    exact_autocorrelation,
    itinerary_pieces,
    jump,
    orbit_mod1,
    step_lifted,
    step_mod1,
    truncated_green_kubo,
    velocity,
)
from .markov_decay import (
    LiftedPartition,
    PartitionSpec,
    TransitionMatrix,
    analytic_zeroth,
    build_transition_matrix,
    critical_partition,
    d_markov,
    decay_rate,
    is_markov,
    lift_partition,
    sector_matrix,
    spectral_summary,
)
from .mc_sim import MsdSeries, SimConfig, d_mc, simulate_msd
from .persistent_walk import (
    MemoryChain,
    OneStepProbs,
    TwoStepProbs,
    build_two_step_chain,
    chain_autocorrelation,
    d_prw0,
    d_prw1,
    d_prw2,
    one_step_probs,
    two_step_probs,
)

__all__ = [
    "__version__",
    "CylinderSet",
    "DiffusionEstimate",
    "MapParams",
    "MemoryChain",
    "MemorySeries",
    "MsdSeries",
    "OneStepProbs",
    "OrbitRecord",
    "LiftedPartition",
    "PartitionSpec",
    "SimConfig",
    "TransitionMatrix",
    "TwoStepProbs",
    "analytic_zeroth",
    "build_transition_matrix",
    "build_two_step_chain",
    "chain_autocorrelation",
    "critical_partition",
    "cylinder_intervals",
    "cylinder_measures",
    "d_crw",
    "d_exact",
    "d_markov",
    "d_mc",
    "d_prw0",
    "d_prw1",
    "d_prw2",
    "decay_rate",
    "exact_autocorrelation",
    "finite_convergence_order",
    "is_markov",
    "itinerary_pieces",
    "jump",
    "lift_partition",
    "memory_profile",
    "memory_series",
    "memory_term",
    "one_step_probs",
    "orbit_mod1",
    "sector_matrix",
    "simulate_msd",
    "spectral_summary",
    "step_lifted",
    "step_mod1",
    "tent",
    "truncated_green_kubo",
    "two_step_probs",
    "velocity",
]
