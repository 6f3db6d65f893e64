"""quatsurf: quaternionic transformations of CMC, isothermic and constrained Willmore surfaces.

The package samples conformal immersions into the quaternions on a grid,
builds the associated families of flat connections, computes parallel
sections and their monodromy, and turns sections into Darboux transforms,
simple factor dressings and associated-family members.
"""

from .connections import (
    ConformalGaussS,
    HarmonicGaussN,
    IsothermicRho,
    SectionField,
    TransportSettings,
    flatness_check,
    monodromy,
    parallel_transport,
    sweep_multipliers,
    transport_grid,
)
from .core import SpectralPoint, spectral_point_from_mu, spectral_point_from_rho
from .errors import ConfigInvalid, NumericalError, QuatsurfError
from .oracles import CylinderHarmonicOracle, CylinderOracle, RevolutionOracle
from .surfaces import (
    DomainGrid,
    ImmersionField,
    christoffel_dual,
    gauss_map,
    make_cylinder,
    make_revolution,
    make_sphere,
    parallel_surface,
)
from .transforms import (
    bianchi_common,
    calapso,
    classical_darboux_riccati,
    cmc_sfd,
    cw_darboux,
    cw_sfd,
    mu_darboux,
    rho_darboux,
    sfd_isothermic,
    sym_bobenko,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigInvalid",
    "ConformalGaussS",
    "CylinderHarmonicOracle",
    "CylinderOracle",
    "DomainGrid",
    "HarmonicGaussN",
    "ImmersionField",
    "IsothermicRho",
    "NumericalError",
    "QuatsurfError",
    "RevolutionOracle",
    "SectionField",
    "SpectralPoint",
    "TransportSettings",
    "bianchi_common",
    "calapso",
    "christoffel_dual",
    "classical_darboux_riccati",
    "cmc_sfd",
    "cw_darboux",
    "cw_sfd",
    "flatness_check",
    "gauss_map",
    "make_cylinder",
    "make_revolution",
    "make_sphere",
    "monodromy",
    "mu_darboux",
    "parallel_surface",
    "parallel_transport",
    "rho_darboux",
    "sfd_isothermic",
    "spectral_point_from_mu",
    "spectral_point_from_rho",
    "sweep_multipliers",
    "transport_grid",
    "sym_bobenko",
]
