"""Microwave parametric down-conversion in a cyclic three-level circuit-QED system.

The package covers the pipeline end to end: truncated Fock-space
operator algebra, the full qubit-resonator Hamiltonians, a numeric
adiabatic-elimination engine that reproduces the closed-form two-mode
conversion strength, closed-system dynamics validating the effective
model, and the driven-dissipative steady-state analysis (mean-field
threshold, quadrature squeezing, photon bunching) cross-checked against
a full Lindblad solver and truncated-Wigner trajectories.
"""

from .errors import (
    ConfigError,
    IntegrationFailure,
    InvalidArgumentError,
    NumericalFailure,
    StepSizeError,
    TruncationError,
)
from .fock import (
    DensityMatrix,
    HilbertSpec,
    LEVELS,
    Operator,
    StateVector,
    TwoModeSpec,
    annihilation,
    basis_state,
    commutator,
    embed,
    expectation,
    identity,
    mode_basis_state,
    number_operator,
    qubit_transition,
)
from .model import (
    EffectiveParams,
    RegimeDiagnostic,
    SystemParams,
    build_H0,
    build_HI,
    build_H_eff,
    build_H_rotating,
    effective_params,
    excitation_operator,
    mode_excitation_operator,
    reference_params,
    scaled_params,
    validate_regime,
)
from .elimination import (
    EliminationReport,
    GeneratorS,
    build_generator,
    project_effective,
    spectral_check,
)
from .dynamics import (
    DeviationSummary,
    TimeGrid,
    TimeSeries,
    conserved_excitation,
    default_transfer_grid,
    evolve,
    evolve_in_sector,
    run_full_vs_effective,
)
from .steady import (
    FluctuationReport,
    MeanField,
    ScanRow,
    fluctuation_covariance,
    linearized_g2,
    linearized_variances,
    mean_field,
    near_threshold,
    threshold_scan,
)
from .lindblad import adequate_cutoffs, lindblad_steady_state, liouvillian, steady_state
from .trajectories import default_horizon, default_step, sde_trajectories
from .config import RunConfig, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
