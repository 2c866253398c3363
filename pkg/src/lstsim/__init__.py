"""Stabilizer-code shadow tomography simulator and error-mitigated estimator."""

from .gf2_pauli import (
    AffinePauliFactor,
    Gf2Matrix,
    ImaginaryPhaseError,
    NullSpaceTooLargeError,
    PauliOp,
    affine_product_trace,
    commutes,
    multiply,
    null_space,
)
from .tableau import IncompatibleGeneratorsError, Tableau
from .codes import (
    CodeParseError,
    InvalidCodeError,
    LogicalStatePrep,
    StabilizerCode,
    builtin_codes,
    lift_logical,
    load_code,
    prepare_logical_state,
    resolve_code,
    trivial_code,
)
from .noise import NoiseSpec, sample_pauli_frame, shot_rng
from .clifford import CliffordElement, clifford_group_order, sample_uniform_clifford
from .shadow_acquisition import (
    EnsembleFormatError,
    ShadowEnsemble,
    Snapshot,
    acquire_ensemble,
    acquire_shot,
    read_ensemble,
    write_ensemble,
)
from .lst_estimator import (
    EstimateReport,
    EstimatorConfig,
    InsufficientShotsError,
    ZeroDenominatorMeanError,
    bootstrap_std,
    empirical_variance_operator,
    fast_projected_moment_m1,
    fidelity_observable,
    lst_expectation,
    projected_moment,
    ratio_variance_approx,
    reconstruction_factors,
)

__all__ = [
    "AffinePauliFactor",
    "CliffordElement",
    "CodeParseError",
    "EnsembleFormatError",
    "EstimateReport",
    "EstimatorConfig",
    "Gf2Matrix",
    "ImaginaryPhaseError",
    "IncompatibleGeneratorsError",
    "InsufficientShotsError",
    "InvalidCodeError",
    "LogicalStatePrep",
    "NoiseSpec",
    "NullSpaceTooLargeError",
    "PauliOp",
    "ShadowEnsemble",
    "Snapshot",
    "StabilizerCode",
    "Tableau",
    "ZeroDenominatorMeanError",
    "acquire_ensemble",
    "acquire_shot",
    "affine_product_trace",
    "bootstrap_std",
    "builtin_codes",
    "clifford_group_order",
    "commutes",
    "empirical_variance_operator",
    "fast_projected_moment_m1",
    "fidelity_observable",
    "lift_logical",
    "load_code",
    "lst_expectation",
    "multiply",
    "null_space",
    "prepare_logical_state",
    "projected_moment",
    "ratio_variance_approx",
    "read_ensemble",
    "reconstruction_factors",
    "resolve_code",
    "sample_uniform_clifford",
    "sample_pauli_frame",
    "shot_rng",
    "trivial_code",
    "write_ensemble",
]
