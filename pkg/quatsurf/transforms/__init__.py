"""Darboux transforms, dressing and associated families built from parallel sections."""

from .associated import (
    AssociatedSurface,
    LimitReport,
    calapso,
    cw_assoc,
    cw_limit,
    lawson,
    limit_isothermic_family,
    sym_bobenko,
)
from .bianchi import bianchi_common
from .correspondence import (
    conformal_from_harmonic,
    cw_alpha,
    decompose_rho_section,
    isothermic_from_harmonic,
)
from .darboux import (
    classical_darboux_riccati,
    cw_darboux,
    dual_darboux,
    g_mu_darboux,
    mu_darboux,
    rho_darboux,
)
from .dressing import DressingResult, cmc_sfd, cw_sfd, sfd_isothermic, sfd_two_step
from .results import DarbouxResult, DressingMatrix

__all__ = [
    "AssociatedSurface",
    "DarbouxResult",
    "DressingMatrix",
    "DressingResult",
    "LimitReport",
    "bianchi_common",
    "calapso",
    "classical_darboux_riccati",
    "cmc_sfd",
    "conformal_from_harmonic",
    "cw_alpha",
    "cw_assoc",
    "cw_darboux",
    "cw_limit",
    "cw_sfd",
    "decompose_rho_section",
    "dual_darboux",
    "g_mu_darboux",
    "isothermic_from_harmonic",
    "lawson",
    "limit_isothermic_family",
    "mu_darboux",
    "rho_darboux",
    "sfd_isothermic",
    "sfd_two_step",
    "sym_bobenko",
]
