"""
Package for the parallel-in-time solver (Parareal with epsilon-algorithm acceleration)
"""

__version__ = '1.0.0'

from .accel import (
    AccelSpec,
    AuxSeriesParams,
    EpsilonTable,
    accelerate_with_aux,
    epsilon_table,
    s_epsilon,
    shanks,
    vector_accelerate,
)
from .exceptions import (
    ConfigError,
    NumericalError,
    OutputError,
    PitaError,
)
from .model import LTISystem, TimeGrid, Trajectory, slice_boundaries, validate_system
from .omega import (
    OmegaSeries,
    SubdivisionSet,
    build_omega_series,
    build_psi,
    omega_error_curve,
)
from .optimize import (
    AnnealConfig,
    CalibrationResult,
    anneal_q,
    bootstrap_reference,
    objective,
    periodic_refresh,
    propagate_calibration,
)
from .parareal import (
    ClassicMode,
    DeltaSchedule,
    ParerealConfig,
    ParerealResult,
    SemiExplicitMode,
    classic_parareal,
    extrapolated_solution,
    run_parareal,
    semi_explicit_parareal,
)
from .propagators import (
    PropagatorKind,
    advance,
    closed_form_explicit,
    exact_solution,
    explicit_euler_propagate,
    explicit_euler_step,
    implicit_euler_propagate,
    implicit_euler_step,
    stability_radius,
)

__all__ = [
    'LTISystem','TimeGrid','Trajectory','slice_boundaries','validate_system',
    'PropagatorKind','advance','explicit_euler_step','explicit_euler_propagate','closed_form_explicit',
    'implicit_euler_step','implicit_euler_propagate','exact_solution','stability_radius',
    'AccelSpec','AuxSeriesParams','EpsilonTable','shanks','epsilon_table','s_epsilon',
    'accelerate_with_aux','vector_accelerate',
    'SubdivisionSet','OmegaSeries','build_psi','build_omega_series','omega_error_curve',
    'DeltaSchedule','ClassicMode','SemiExplicitMode','ParerealConfig','ParerealResult',
    'classic_parareal','semi_explicit_parareal','run_parareal','extrapolated_solution',
    'AnnealConfig','CalibrationResult','bootstrap_reference','objective','anneal_q',
    'propagate_calibration','periodic_refresh',
    'PitaError','ConfigError','NumericalError','OutputError',
]
