"""Pydantic schemas for gluing parameters, region constants and numerical tolerances."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class GlueParams(BaseModel):
    """Rates and scales of the gluing construction at one singular point."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    mu: float = Field(gt=0, description="Rate μ of the conically singular piece")
    nu: float = Field(default=-3.0, le=-3, description="Rate ν of the asymptotically conical piece")
    nu_prime: float = Field(default=-4.0, description="Residual rate ν′ of the AC expansion")
    delta: float = Field(gt=0, description="Rate δ of the obstruction correction")
    epsilon: float = Field(default=0.5, gt=0, lt=1, description="Outer radius ε of the neck")
    R: float = Field(default=1.05, gt=1, description="Inner radius R of the AC cut-off")
    gamma: float = Field(gt=0, lt=1, description="Neck exponent γ")
    kappa: float = Field(default=0.0, ge=0, description="Torsion decay exponent κ")

    @model_validator(mode="after")
    def _delta_below_mu(self):
        if self.delta >= self.mu:
            raise ValueError(f"delta ({self.delta}) must be smaller than mu ({self.mu})")
        return self

    @model_validator(mode="after")
    def _residual_below_nu(self):
        if self.nu_prime >= self.nu:
            raise ValueError(
                f"nu_prime ({self.nu_prime}) must decay faster than the AC rate nu ({self.nu})"
            )
        return self

    @property
    def R_prime(self) -> float:
        return 2.0 * self.R

    @property
    def delta_absorbed(self) -> bool:
        """Whether δ < (1−γ)/γ, so the inner η-term is absorbed."""
        return self.delta < (1.0 - self.gamma) / self.gamma

    def admissible(self, s: float) -> bool:
        """sR′ < s^γ and 2s^γ < ε."""
        return 0 < s < 1 and s * self.R_prime < s**self.gamma and 2.0 * s**self.gamma < self.epsilon

    def max_admissible_scale(self) -> float:
        """Supremum of the admissible scales."""
        from_neck = (1.0 / self.R_prime) ** (1.0 / (1.0 - self.gamma))
        from_epsilon = (self.epsilon / 2.0) ** (1.0 / self.gamma)
        return min(from_neck, from_epsilon, 1.0)

    @classmethod
    def from_singular_rates(cls, mus: list[float], **kwargs) -> "GlueParams":
        """Several singular points share one construction; the smallest rate governs."""
        if not mus:
            raise ValueError("at least one singular rate is required")
        return cls(mu=min(mus), **kwargs)


class RegionConstants(BaseModel):
    """Constants of the injectivity-radius and curvature models, one per region."""

    model_config = ConfigDict(extra="forbid")

    injectivity_inner: float = Field(default=1.0, gt=0)
    injectivity_overlap: float = Field(default=1.0, gt=0)
    injectivity_outer: float = Field(default=1.0, gt=0)
    curvature_inner: float = Field(default=1.0, gt=0)
    curvature_overlap: float = Field(default=1.0, gt=0)
    curvature_outer: float = Field(default=1.0, gt=0)


class Tolerances(BaseModel):
    """Numerical tolerances shared by every suite."""

    model_config = ConfigDict(extra="forbid")

    projection: float = Field(default=1e-12, description="Type-projection residuals")
    newton: float = Field(default=1e-12, description="Θ⁻¹ Newton residual")
    newton_max_iter: int = Field(default=50, description="Θ⁻¹ Newton iteration cap")
    positivity: float = Field(default=1e-10, description="Smallest accepted metric eigenvalue")
    structure: float = Field(default=1e-10, description="Nearly Kähler and cone identities")
    sigma_zero: float = Field(default=1e-8, description="σ_min below which a pencil is singular")
    rate_refine: float = Field(default=1e-9, description="Localization of critical rates")
    scan_step: float = Field(default=0.01, description="λ grid step")
    quadrature_rel: float = Field(default=1e-8, description="Relative error of radial integrals")
    slope: float = Field(
        default=0.05, description="Allowed gap between fitted and predicted slopes"
    )
    max_log_power: int = Field(default=4, description="Largest log(r) power carried by cone forms")
    theta_inverse_radius: float = Field(default=1.0, description="Θ⁻¹ trust radius")

    @field_validator("*")
    @classmethod
    def _positive(cls, value, info):
        if value <= 0:
            raise ValueError(f"tolerance {info.field_name} must be positive")
        return value

    def override(self, values: Optional[dict] = None) -> "Tolerances":
        if not values:
            return self
        return Tolerances.model_validate({**self.model_dump(), **values})
