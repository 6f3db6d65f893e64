"""Sampled conformal immersions, Gauss data and duals."""

from .grid import DomainGrid
from .immersion import (
    GaussData,
    ImmersionField,
    christoffel_dual,
    gauss_map,
    gauss_residuals,
    make_cylinder,
    make_plane,
    make_revolution,
    make_sphere,
    parallel_surface,
    wedge_residual,
)
from .models import RevolutionModel, SampledModel, SurfaceModel
from .profile import ProfileCurve, example_profile

__all__ = [
    "DomainGrid",
    "GaussData",
    "ImmersionField",
    "ProfileCurve",
    "RevolutionModel",
    "SampledModel",
    "SurfaceModel",
    "christoffel_dual",
    "example_profile",
    "gauss_map",
    "gauss_residuals",
    "make_cylinder",
    "make_plane",
    "make_revolution",
    "make_sphere",
    "parallel_surface",
    "wedge_residual",
]
