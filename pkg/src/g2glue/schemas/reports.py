"""Pydantic schemas for verification results and numeric tables."""

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

Region = Literal["inner_K", "inner_annulus", "overlap", "outer", "total"]
NormName = Literal["c0", "l2", "l14"]


class CheckResult(BaseModel):
    """One named invariant with its measured value."""

    name: str = Field(description="Invariant being checked")
    passed: bool = Field(description="Whether the invariant holds")
    value: Optional[float] = Field(default=None, description="Measured quantity, if numeric")
    tolerance: Optional[float] = Field(default=None, description="Threshold the value is held to")
    detail: Optional[str] = Field(default=None, description="Free-text context")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{self.name}: {status}"
        if self.value is not None:
            text += f" ({self.value:.3e}"
            text += f" vs {self.tolerance:.1e})" if self.tolerance is not None else ")"
        if self.detail:
            text += f" - {self.detail}"
        return text


class Table(BaseModel):
    """A rectangular table destined for CSV."""

    name: str = Field(description="File stem of the CSV artifact")
    header: list[str] = Field(description="Column names")
    rows: list[list] = Field(default_factory=list, description="Row values")

    @model_validator(mode="after")
    def _rectangular(self):
        width = len(self.header)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(
                    f"table {self.name!r}: row of width {len(row)}, header has {width}"
                )
        return self


class SuiteReport(BaseModel):
    """Outcome of one verification suite."""

    suite: str = Field(description="Suite (subcommand) name")
    seed: int = Field(default=42, description="Seed of every random sample drawn")
    checks: list[CheckResult] = Field(default_factory=list)
    tables: list[Table] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def render(self) -> str:
        lines = [f"[{self.suite}] seed={self.seed}"]
        lines.extend(check.line() for check in self.checks)
        return "\n".join(lines)


class NormReport(BaseModel):
    """Norms of the torsion measure χ_s in one region at one scale."""

    s: float = Field(gt=0, description="Gluing scale")
    region: Region = Field(description="Region of the glued manifold")
    c0_norm: float = Field(ge=0, description="sup |χ_s|")
    l2_norm: float = Field(ge=0, description="L² norm of χ_s")
    l14_dstar_norm: float = Field(ge=0, description="L¹⁴ norm of d*χ_s")

    def norm(self, name: NormName) -> float:
        return {"c0": self.c0_norm, "l2": self.l2_norm, "l14": self.l14_dstar_norm}[name]


class FitResult(BaseModel):
    """Log-log least-squares slope of a norm against s."""

    norm: Optional[NormName] = Field(default=None, description="Which norm was fitted")
    slope: float = Field(description="Fitted exponent")
    intercept: float = Field(description="Fitted log-constant")
    width: float = Field(ge=0, description="Largest residual of the fit")
    s_min: float = Field(gt=0)
    s_max: float = Field(gt=0)
    points: int = Field(ge=2)
    shifts: int = Field(default=0, ge=0, description="Decades the window was moved toward 0")


class FeasibilityRegion(BaseModel):
    """The (γ, κ) pairs for which the three L² inequalities hold."""

    mu_min: float
    nu_prime: float
    delta: float
    kappa_max: float = Field(
        description="min(δ, μ, −(7/2+ν′)); every γ-bound lies in (0, 1) below it"
    )
    kappa_sup: float = Field(description="Supremum of κ with a nonempty γ-interval")
    empty: bool = Field(description="No κ > 0 admits a γ")
    table: list[list[float]] = Field(
        default_factory=list, description="Rows (kappa, gamma_lb_mu, gamma_lb_nu, gamma_lb_delta)"
    )


class JoyceVerdict(BaseModel):
    """Torsion bounds and the injectivity-radius and curvature models at one scale."""

    s: float
    kappa: float
    c0_ok: bool
    l2_ok: bool
    l14_ok: bool
    injectivity_radius: float
    injectivity_ok: bool
    injectivity_dominant: Region
    curvature: float
    curvature_ok: bool
    curvature_dominant: Region

    @property
    def passed(self) -> bool:
        return all(
            (self.c0_ok, self.l2_ok, self.l14_ok, self.injectivity_ok, self.curvature_ok)
        )
