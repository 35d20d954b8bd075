"""Solvers and benchmarks for lp-norm maximization over uni-modular phases.

The package optimizes ||A exp(j*Omega)||_p for p in {1, 2, inf} with each
phase either free or confined to a B-bit lattice. The discrete inner-product
subproblem is solved exactly by a divide-and-sort sweep, p in {1, 2} by a
monotone alternating iteration with post-rounding lifting, and p = inf
exactly by one sweep per matrix row. A RIS beamforming front end maps MISO
channel instances onto the p = 2 problem.
"""

from ._version import __version__
from .core import (
    DiscretePhaseSet,
    PhaseVector,
    Rng,
    dual_exponent,
    nearest_lattice,
    norm_lp,
    normalize_p,
    sample_complex_gaussian,
    wrap_phase,
)
from .das import (
    CandidateSet,
    PolarDecomposition,
    RegionEncoding,
    build_candidates,
    das_maximize,
    encode_regions,
    per_element_best,
    polar_decompose,
)
from .errors import (
    DegenerateInputError,
    InvalidArgumentError,
    SizeLimitError,
    UnimodError,
    UnsupportedNormError,
)
from .oracle import OracleResult, exhaustive_inner, exhaustive_norm, random_search
from .ris import (
    BeamformingProblem,
    RisInstance,
    SnrValue,
    build_phi,
    build_problem,
    derotate,
    load_instance,
    save_instance,
    snr,
    solve_ris,
)
from .solver import (
    PipelineResult,
    SolveConfig,
    SolveTrace,
    continuous_phase_step,
    default_pipeline,
    deterministic_init,
    dual_witness,
    hard_round,
    lift,
    solve_continuous,
    solve_discrete,
    solve_linf,
)

__all__ = [
    "__version__",
    "BeamformingProblem", "CandidateSet", "DegenerateInputError",
    "DiscretePhaseSet", "InvalidArgumentError", "OracleResult",
    "PhaseVector", "PipelineResult", "PolarDecomposition", "RegionEncoding",
    "RisInstance", "Rng", "SizeLimitError", "SnrValue", "SolveConfig",
    "SolveTrace", "UnimodError", "UnsupportedNormError",
    "build_candidates", "build_phi", "build_problem",
    "continuous_phase_step", "das_maximize", "default_pipeline",
    "derotate", "deterministic_init", "dual_exponent", "dual_witness",
    "encode_regions", "exhaustive_inner", "exhaustive_norm", "hard_round",
    "lift", "load_instance", "nearest_lattice", "norm_lp", "normalize_p",
    "per_element_best", "polar_decompose", "random_search",
    "sample_complex_gaussian", "save_instance", "snr", "solve_continuous",
    "solve_discrete", "solve_linf", "solve_ris", "wrap_phase",
]
