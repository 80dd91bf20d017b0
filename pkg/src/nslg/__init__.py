"""Nonstationary Laguerre-Gaussian electron packets crossing into a uniform solenoid field."""
from .constants import beta_from_kinetic_energy, diffraction_scales, field_scales
from .dynamics import (EvolutionTrace, FieldSolutionParams, OpticalState, field_optical_state,
                       field_solution_params, gouy_closed_form, integrate_optical_ode,
                       integrate_optical_ode_many, xi_diagnostics)
from .errors import DiagnosticsError, DomainError, InconsistencyError, StepSizeError
from .free_space import BeamSpec, FreeOptics, Geometry, boundary_state
from .scenarios import PRESETS, ScenarioConfig, ScenarioReport, emit, run_scenario, table1

__all__ = [
    "BeamSpec", "DiagnosticsError", "DomainError", "EvolutionTrace", "FieldSolutionParams",
    "FreeOptics", "Geometry", "InconsistencyError", "OpticalState", "PRESETS", "ScenarioConfig",
    "ScenarioReport", "StepSizeError", "beta_from_kinetic_energy", "boundary_state",
    "diffraction_scales", "emit", "field_optical_state", "field_scales", "field_solution_params",
    "gouy_closed_form", "integrate_optical_ode", "integrate_optical_ode_many", "run_scenario",
    "table1", "xi_diagnostics",
]
