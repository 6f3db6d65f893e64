"""Closed-form parallel sections used as ground truth."""

from .cylinder import (
    CylinderHarmonicOracle,
    CylinderOracle,
    circle_family,
    cylinder_multipliers,
    cylinder_resonances,
)
from .revolution import (
    RevolutionOracle,
    RotationProfile,
    gauge_factor,
    revolution_resonances,
    to_formula_gauge,
    to_parallel_gauge,
)

__all__ = [
    "CylinderHarmonicOracle",
    "CylinderOracle",
    "RevolutionOracle",
    "RotationProfile",
    "circle_family",
    "cylinder_multipliers",
    "cylinder_resonances",
    "gauge_factor",
    "revolution_resonances",
    "to_formula_gauge",
    "to_parallel_gauge",
]
