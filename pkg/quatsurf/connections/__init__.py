"""Associated families of flat connections, transport and monodromy."""

from .base import Connection, ConnectionKind
from .families import (
    ConformalGaussS,
    HarmonicGaussN,
    IsothermicRho,
    dual_model,
    isothermic_connection,
    omega_eval,
)
from .flatness import FlatnessReport, flatness_check
from .monodromy import MonodromyResult, monodromy
from .sweep import SweepRow, SweepWindow, sweep_multipliers, write_sweep_csv
from .transport import (
    SectionField,
    TransportSettings,
    parallel_transport,
    transport_grid,
)

__all__ = [
    "ConformalGaussS",
    "Connection",
    "ConnectionKind",
    "FlatnessReport",
    "HarmonicGaussN",
    "IsothermicRho",
    "MonodromyResult",
    "SectionField",
    "SweepRow",
    "SweepWindow",
    "TransportSettings",
    "dual_model",
    "flatness_check",
    "isothermic_connection",
    "monodromy",
    "omega_eval",
    "parallel_transport",
    "sweep_multipliers",
    "transport_grid",
    "write_sweep_csv",
]
