"""Pydantic schemas for a run of the verification driver."""

from pathlib import Path
from typing import Literal, Optional, get_args

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .params import GlueParams, RegionConstants, Tolerances

Command = Literal[
    "verify-pointwise",
    "verify-link",
    "verify-cone",
    "rates",
    "glue-scan",
    "feasibility",
    "joyce-gate",
    "all",
]
COMMANDS: tuple[str, ...] = get_args(Command)[:-1]


class RateOptions(BaseModel):
    """Which pencil to scan and over which interval of orders."""

    model_config = ConfigDict(extra="forbid")

    parity: Literal["even", "odd"] = Field(
        default="even", description="Parity of the d + d* pencil"
    )
    lower: float = Field(default=-3.5, description="Left end of the λ scan")
    upper: float = Field(default=-2.5, description="Right end of the λ scan")
    excluded: bool = Field(default=True, description="Also certify every excluded range")

    @model_validator(mode="after")
    def _ordered(self):
        if self.lower >= self.upper:
            raise ValueError(f"empty rate interval [{self.lower}, {self.upper}]")
        return self


class FeasibilityOptions(BaseModel):
    """Rates fed to the (γ, κ) feasibility solve."""

    model_config = ConfigDict(extra="forbid")

    mu: float = Field(default=1.0, gt=0, description="Smallest singular rate μ")
    nu_prime: float = Field(default=-4.0, description="Residual AC rate ν′")
    delta: float = Field(default=0.2, gt=0, description="Obstruction rate δ")
    samples: int = Field(default=101, ge=2, description="κ samples in the boundary table")
    grid: int = Field(default=100, ge=2, description="Points per axis of the dominance grid")


class GateOptions(BaseModel):
    """Constants of the perturbation-theorem hypotheses."""

    model_config = ConfigDict(extra="forbid")

    D1: float = Field(default=1.0, gt=0)
    D2: float = Field(default=1.0, gt=0)
    D3: float = Field(default=1.0, gt=0)
    kappa: Optional[float] = Field(
        default=None,
        gt=0,
        description="Torsion exponent; half the kappa bound at the configured gamma if unset",
    )
    constants: RegionConstants = Field(default_factory=RegionConstants)


class RunConfig(BaseModel):
    """Everything one invocation of the driver needs."""

    model_config = ConfigDict(extra="forbid")

    command: Command = Field(default="all", description="Suite to run, or all of them")
    link: str = Field(default="s3xs3", description="Preset name or path of a link file")
    glue: GlueParams = Field(
        default_factory=lambda: GlueParams(mu=1.0, delta=0.2, gamma=0.8),
        description="Gluing parameters for glue-scan and joyce-gate",
    )
    rates: RateOptions = Field(default_factory=RateOptions)
    feasibility: FeasibilityOptions = Field(default_factory=FeasibilityOptions)
    gate: GateOptions = Field(default_factory=GateOptions)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output_dir: Path = Field(default=Path("g2glue-out"), description="Directory for CSV artifacts")
    seed: int = Field(default=42, description="Seed of every random sample")
    workers: int = Field(default=1, ge=1, description="Threads for scans")

    @field_validator("link")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("link must name a preset or a file")
        return value.strip()

    def suites(self) -> tuple[str, ...]:
        return COMMANDS if self.command == "all" else (self.command,)
