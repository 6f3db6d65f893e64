"""Run configuration: models, JSON/YAML loading and schema validation.

A config file is checked twice: first against the JSON schema generated
from :class:`RunConfig`, then by pydantic itself. Both kinds of failure
surface as :class:`ConfigInvalid` carrying the offending path.
"""

import hashlib
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union, get_args

import sympy
import yaml
from jsonschema import Draft202012Validator
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from ..connections.sweep import SweepWindow
from ..connections.transport import TransportSettings
from ..errors import ConfigInvalid
from ..surfaces.grid import DomainGrid
from ..surfaces.profile import parse_profile_expr

logger = logging.getLogger(__name__)

SpectralValue = Union[float, Tuple[float, float], str]
QuaternionValue = Tuple[float, float, float, float]

SPECTRAL_NAMES: Dict[str, Any] = {
    "sqrt": sympy.sqrt,
    "exp": sympy.exp,
    "pi": sympy.pi,
    "I": sympy.I,
}

StepKind = Literal[
    "rho", "dual", "classical", "mu", "cw", "revolution", "bianchi",
    "sfd", "sfd_mu", "cw_sfd", "lawson",
]
Projection = Literal["drop_real", "drop_i", "drop_j", "drop_k", "stereographic"]
STEP_KINDS = get_args(StepKind)


def parse_spectral(value: SpectralValue) -> complex:
    """A spectral value from a number, a [re, im] pair or an expression like ``"7-4*sqrt(3)"``.

    Raises:
        ValueError: malformed value or an expression using unknown names
    """
    if isinstance(value, bool):
        raise ValueError("spectral values must be numbers, pairs or expressions")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError("spectral pairs must be [re, im]")
        return complex(float(value[0]), float(value[1]))
    try:
        expr = parse_expr(
            str(value),
            local_dict=dict(SPECTRAL_NAMES),
            global_dict={"__builtins__": {}, "Integer": sympy.Integer, "Float": sympy.Float,
                         "Rational": sympy.Rational, "Symbol": sympy.Symbol},
            transformations=standard_transformations,
        )
    except Exception as exc:
        raise ValueError(f"cannot parse spectral value {value!r}: {exc}") from exc
    if not isinstance(expr, sympy.Expr) or expr.free_symbols:
        raise ValueError(f"spectral value {value!r} must be a closed numeric expression")
    return complex(expr.evalf(17))


class ProfileConfig(BaseModel):
    """Profile (p, q) of a surface of revolution as expressions in ``x``."""

    model_config = ConfigDict(extra="forbid")

    p: str = Field("-x + x**3/3", description="Axial coordinate p(x)")
    q: str = Field("1 + x**2", description="Distance from the axis q(x)")

    @field_validator("p", "q")
    @classmethod
    def _parses(cls, value: str) -> str:
        parse_profile_expr(value)
        return value


class SurfaceConfig(BaseModel):
    """Which analytic surface to sample, and on what grid."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["cylinder", "revolution", "sphere", "plane"] = Field(
        "cylinder", description="Analytic surface model"
    )
    profile: Optional[ProfileConfig] = Field(
        None, description="Profile for kind=revolution; the built-in example when omitted"
    )
    grid: DomainGrid = Field(default_factory=DomainGrid, description="Parameter grid")
    derived: List[Literal["dual", "parallel"]] = Field(
        default_factory=list, description="Derived surfaces exported by the surface command"
    )


class SectionConfig(BaseModel):
    """Where a parallel section comes from."""

    model_config = ConfigDict(extra="forbid")

    source: Literal["oracle", "monodromy", "initial"] = Field(
        "oracle", description="Closed form, monodromy eigenvector or explicit initial value"
    )
    sign: int = Field(1, description="Branch of the closed form (+1 or -1)")
    second_sign: int = Field(1, description="Second branch for the cylinder isothermic oracle")
    index: int = Field(0, ge=0, description="Monodromy eigenvector index")
    initial: Optional[List[QuaternionValue]] = Field(
        None, description="Quaternion components at (x_min, y_min) for source=initial"
    )

    @field_validator("sign", "second_sign")
    @classmethod
    def _unit(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError("branch signs must be +1 or -1")
        return value

    @model_validator(mode="after")
    def _initial_present(self) -> "SectionConfig":
        if self.source == "initial" and not self.initial:
            raise ValueError("source=initial needs an initial value")
        return self


class TransformStep(BaseModel):
    """One entry of the transform pipeline, applied to the configured surface."""

    model_config = ConfigDict(extra="forbid")

    kind: StepKind = Field(..., description="Transform to apply")
    spectral: SpectralValue = Field(..., description="rho, r or mu, depending on kind")
    second: Optional[SpectralValue] = Field(None, description="Second spectral value (bianchi)")
    section: SectionConfig = Field(default_factory=SectionConfig, description="First section")
    second_section: Optional[SectionConfig] = Field(None, description="Second section (bianchi)")
    T0: Optional[QuaternionValue] = Field(None, description="Riccati initial value (classical)")
    cmc: bool = Field(False, description="Also report the CMC condition")
    name: Optional[str] = Field(None, description="Output file stem")
    projection: Optional[Projection] = Field(
        None, description="Overrides the output projection for this step"
    )

    @field_validator("spectral", "second")
    @classmethod
    def _spectral_parses(cls, value: Optional[SpectralValue]) -> Optional[SpectralValue]:
        if value is not None:
            parse_spectral(value)
        return value

    @model_validator(mode="after")
    def _requirements(self) -> "TransformStep":
        if self.kind == "classical" and self.T0 is None:
            raise ValueError("classical steps need T0")
        if self.kind == "bianchi" and self.second is None:
            raise ValueError("bianchi steps need a second spectral value")
        return self

    def value(self) -> complex:
        return parse_spectral(self.spectral)

    def second_value(self) -> complex:
        if self.second is None:
            raise ValueError(f"{self.kind} step has no second spectral value")
        return parse_spectral(self.second)


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    formats: List[Literal["obj", "ply"]] = Field(
        default_factory=lambda: ["obj"], description="Mesh formats to write"
    )
    projection: Projection = Field(
        "drop_real", description="R^4 -> R^3 projection of mesh vertices"
    )
    diagnostics: str = Field("diagnostics.json", description="Diagnostics file name")
    sweep_csv: str = Field("sweep.csv", description="Sweep CSV file name")
    invariants: str = Field("invariants.json", description="Invariant report file name")


class InvariantsConfig(BaseModel):
    """Settings of the invariant suite."""

    model_config = ConfigDict(extra="forbid")

    spectral_points: List[SpectralValue] = Field(
        default_factory=lambda: [[0.3, 0.2], [-2.0, 0.5], [0.7, -0.4]],
        description="Spectral values used by every check",
    )
    levels: List[int] = Field(
        default_factory=lambda: [16, 32, 64], description="Grid sizes of the flatness study"
    )
    random_samples: int = Field(1000, ge=0, description="Samples of the spectral round trip")
    negative_control: bool = Field(True, description="Include the corrupted-dual control")

    @field_validator("spectral_points")
    @classmethod
    def _points_parse(cls, values: List[SpectralValue]) -> List[SpectralValue]:
        for v in values:
            parse_spectral(v)
        return values

    def points(self) -> List[complex]:
        return [parse_spectral(v) for v in self.spectral_points]


class RunConfig(BaseModel):
    """Complete configuration of one CLI run."""

    model_config = ConfigDict(extra="forbid")

    surface: SurfaceConfig = Field(default_factory=SurfaceConfig, description="Input surface")
    dual_gauge: Literal["parallel_cmc", "isothermic_formula"] = Field(
        "parallel_cmc", description="Dual used by the isothermic family"
    )
    pipeline: List[TransformStep] = Field(default_factory=list, description="Transforms to run")
    transport: TransportSettings = Field(
        default_factory=TransportSettings, description="Integrator settings"
    )
    sweep: SweepWindow = Field(default_factory=SweepWindow, description="Spectral sweep window")
    invariants: InvariantsConfig = Field(
        default_factory=InvariantsConfig, description="Invariant suite settings"
    )
    output: OutputConfig = Field(default_factory=OutputConfig, description="Output files")
    seed: int = Field(0, description="Seed for randomized checks")


@lru_cache(maxsize=1)
def run_config_schema() -> Dict[str, Any]:
    return RunConfig.model_json_schema()


def config_from_dict(data: Any) -> RunConfig:
    """Validate a raw document and build the config.

    Raises:
        ConfigInvalid: schema or model validation failed
    """
    if not isinstance(data, dict):
        raise ConfigInvalid("config document must be a mapping")
    validator = Draft202012Validator(run_config_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        first = errors[0]
        raise ConfigInvalid(first.message, list(first.absolute_path))
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        raise ConfigInvalid(err["msg"], list(err["loc"])) from exc


def load_config(path: Union[str, Path]) -> RunConfig:
    """Load a JSON or YAML run config.

    Raises:
        ConfigInvalid: unparsable or invalid document
        OSError: the file cannot be read
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot parse {path.name}: {exc}") from exc
    config = config_from_dict(data)
    logger.debug("loaded config %s (%d pipeline steps)", path, len(config.pipeline))
    return config


def config_digest(config: RunConfig) -> str:
    """sha256 of the canonical JSON form of ``config``."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
