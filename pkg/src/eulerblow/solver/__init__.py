"""Field evolution, characteristic tracing and blow-up detection."""

from .blowup import BlowupReport, detect_blowup
from .characteristics import CharacteristicPath, interpolate_field, trace_characteristic
from .grid import FieldState, Grid, Physics, centered_difference, derived_fields
from .initial import FAMILIES, initial_data
from .scheme import SolverAbort, Trajectory, rhs, run, stable_dt, step_field

__all__ = [
    "BlowupReport", "detect_blowup", "CharacteristicPath", "interpolate_field",
    "trace_characteristic", "FieldState", "Grid", "Physics", "centered_difference",
    "derived_fields", "FAMILIES", "initial_data", "SolverAbort", "Trajectory", "rhs", "run",
    "stable_dt", "step_field",
]
