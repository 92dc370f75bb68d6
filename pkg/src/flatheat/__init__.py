"""Flatness-based feedforward control of a 1-D heated rod.

Synthesizes open-loop boundary heat-flux signals that steer the far-end
temperature along a smooth prescribed transition, and verifies them by
direct finite-difference simulation of the heat equation.
"""

__version__ = "0.1.0"

from .materials import (
    BUILTIN_MATERIALS,
    MaterialProperties,
    RodGeometry,
    diffusivity,
    gamma_coefficient,
    get_material,
)
from .series import (
    EtaDiagnostics,
    InputSignal,
    eta_max_index,
    eta_sequence,
    first_subunity_index,
    input_signal,
    mu_sequence,
    r_hat_sequence,
    select_truncation,
)
from .simulate import (
    SimulationConfig,
    SimulationDivergedError,
    SimulationResult,
    energy_audit,
    semidiscretize,
    simulate,
)
from .trajectory import (
    DerivativeTable,
    QuadratureError,
    TransitionSpec,
    bump_derivatives,
    bump_integral,
    bump_value,
    inner_exponent_derivatives,
    partial_bell_two,
    reference_output,
    transition_profile,
    transition_value,
)

__all__ = [
    "BUILTIN_MATERIALS",
    "DerivativeTable",
    "EtaDiagnostics",
    "InputSignal",
    "MaterialProperties",
    "QuadratureError",
    "RodGeometry",
    "SimulationConfig",
    "SimulationDivergedError",
    "SimulationResult",
    "TransitionSpec",
    "__version__",
    "bump_derivatives",
    "bump_integral",
    "bump_value",
    "diffusivity",
    "energy_audit",
    "eta_max_index",
    "eta_sequence",
    "first_subunity_index",
    "gamma_coefficient",
    "get_material",
    "inner_exponent_derivatives",
    "input_signal",
    "mu_sequence",
    "partial_bell_two",
    "r_hat_sequence",
    "reference_output",
    "select_truncation",
    "semidiscretize",
    "simulate",
    "transition_profile",
    "transition_value",
]
