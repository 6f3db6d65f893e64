"""Quaternionic and complexified linear algebra."""

from .hmatrix import HMatrix2, HVector2, hmat_inv, hmat_inv_array
from .quaternion import (
    Quaternion,
    complexify,
    decomplexify,
    from_complex,
    left_matrix,
    qconj,
    qinv,
    qmul,
    qnorm,
)
from .spectral import SpectralPoint, spectral_point_from_mu, spectral_point_from_rho

__all__ = [
    "HMatrix2",
    "HVector2",
    "Quaternion",
    "SpectralPoint",
    "complexify",
    "decomplexify",
    "from_complex",
    "hmat_inv",
    "hmat_inv_array",
    "left_matrix",
    "qconj",
    "qinv",
    "qmul",
    "qnorm",
    "spectral_point_from_mu",
    "spectral_point_from_rho",
]
