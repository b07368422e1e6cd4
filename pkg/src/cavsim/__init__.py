"""Semiclassical dynamics of laser-driven atoms in a lossy cavity:
self-organization, pattern seeding and pattern flipping."""

from .model import (
    MASS,
    TWO_PI,
    ObservableRecord,
    PumpSchedule,
    SimParams,
    TrajectoryState,
    bunching,
    effective_detuning,
    field_drift,
    force,
    order_parameter,
    potential,
    steady_state_field,
)
from .engine import (
    IntegratorConfig,
    ObservableSeries,
    RngStream,
    run_trajectory,
    sample_initial,
    step,
)
from .ensemble import (
    EnsembleResult,
    EnsembleSpec,
    TrajectoryFailure,
    odd_fraction,
    position_histogram,
    run_ensemble,
)

__version__ = "0.1.0"

__all__ = [
    "MASS",
    "TWO_PI",
    "EnsembleResult",
    "EnsembleSpec",
    "IntegratorConfig",
    "ObservableRecord",
    "ObservableSeries",
    "PumpSchedule",
    "RngStream",
    "SimParams",
    "TrajectoryFailure",
    "TrajectoryState",
    "bunching",
    "effective_detuning",
    "field_drift",
    "force",
    "odd_fraction",
    "order_parameter",
    "position_histogram",
    "potential",
    "run_ensemble",
    "run_trajectory",
    "sample_initial",
    "steady_state_field",
    "step",
    "__version__",
]
