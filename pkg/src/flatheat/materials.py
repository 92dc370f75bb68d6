"""Material property records and the derived transport coefficients.

Everything downstream of the trajectory generator depends on the rod
through exactly two numbers: the diffusivity alpha = lambda/(rho*c) and
the time constant gamma = L^2/alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MaterialProperties:
    """Homogeneous solid with constant thermal properties (SI units)."""

    name: str
    conductivity: float  # lambda, W/(m K)
    density: float  # rho, kg/m^3
    specific_heat: float  # c, J/(kg K)

    def __post_init__(self) -> None:
        for label, value in (
            ("conductivity", self.conductivity),
            ("density", self.density),
            ("specific_heat", self.specific_heat),
        ):
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{label} must be a positive finite number, got {value!r}")

    @property
    def diffusivity(self) -> float:
        """alpha = lambda / (rho * c), m^2/s."""
        return self.conductivity / (self.density * self.specific_heat)

    @property
    def volumetric_heat_capacity(self) -> float:
        """rho * c, J/(m^3 K)."""
        return self.density * self.specific_heat


@dataclass(frozen=True)
class RodGeometry:
    """One-dimensional rod of length L (meters)."""

    length: float

    def __post_init__(self) -> None:
        if not (self.length > 0.0 and math.isfinite(self.length)):
            raise ValueError(f"length must be a positive finite number, got {self.length!r}")


def diffusivity(material: MaterialProperties) -> float:
    """Thermal diffusivity alpha = lambda / (rho * c)."""
    return material.diffusivity


def gamma_coefficient(material: MaterialProperties, geometry: RodGeometry) -> float:
    """Diffusion time constant gamma = L^2 / alpha (seconds).

    This is the only combination of material and geometry that the shape
    of the series coefficient sequence depends on.
    """
    return geometry.length**2 / material.diffusivity


# Reference materials for the aluminum / steel benchmark pair.
BUILTIN_MATERIALS: dict[str, MaterialProperties] = {
    "aluminum": MaterialProperties("aluminum", conductivity=237.0, density=2700.0, specific_heat=900.0),
    "steel-38Si7": MaterialProperties("steel-38Si7", conductivity=40.0, density=7800.0, specific_heat=460.0),
}


def material_from_dict(entry: dict) -> MaterialProperties:
    """Build a material from a config mapping {name, lambda, rho, c}."""
    try:
        return MaterialProperties(
            name=str(entry["name"]),
            conductivity=float(entry["lambda"]),
            density=float(entry["rho"]),
            specific_heat=float(entry["c"]),
        )
    except KeyError as exc:
        raise ValueError(f"material definition is missing key {exc.args[0]!r}") from exc


def get_material(name: str, extra: dict[str, MaterialProperties] | None = None) -> MaterialProperties:
    """Look up a material by name in the built-in registry plus `extra`."""
    if extra and name in extra:
        return extra[name]
    try:
        return BUILTIN_MATERIALS[name]
    except KeyError:
        known = sorted(BUILTIN_MATERIALS) + sorted(extra or ())
        raise KeyError(f"unknown material {name!r}; known: {', '.join(known)}") from None
