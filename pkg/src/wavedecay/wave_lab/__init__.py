"""Radial finite-difference laboratory for the semilinear wave equation."""
from .config import (CFL_BOUND, CoefficientProfile, ConfigError, Grid1D, InitialData,
                     Nonlinearity, NullConditionViolated, NullFormCoeffs, SimConfig, Window,
                     sample_null_covectors)
from .solver import (BlowupDetected, Trajectory, evolve, operator_residual,
                     operator_values, residual_norm)
from .exact import free_wave_dt_exact, free_wave_exact
from .fields import (DomainError, FieldSlice, RadialSymmetry, apply_vector_field,
                     lattice_values, null_form_eval, synthetic_trajectory)
from .traj_io import load_trajectory, save_trajectory

__all__ = [
    "CFL_BOUND", "CoefficientProfile", "ConfigError", "Grid1D", "InitialData", "Nonlinearity",
    "NullConditionViolated", "NullFormCoeffs", "SimConfig", "Window", "sample_null_covectors",
    "BlowupDetected", "Trajectory", "evolve", "operator_residual", "operator_values", "residual_norm",
    "free_wave_dt_exact", "free_wave_exact", "DomainError", "FieldSlice", "RadialSymmetry",
    "apply_vector_field", "lattice_values", "null_form_eval", "synthetic_trajectory", "load_trajectory",
    "save_trajectory",
]
