"""Pydantic schema for link-algebra input files."""

from fractions import Fraction
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

Rational = Union[str, int, float]


def parse_rational(value: Rational) -> Fraction:
    """Parse "p/q", integers or decimal strings into an exact Fraction."""
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {value!r}") from exc


class LinkFile(BaseModel):
    """A 6-dimensional coframe algebra as stored on disk."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(description="Preset or user-chosen name")
    description: Optional[str] = Field(default=None, description="Free text")
    dimension: int = Field(default=6, description="Coframe dimension; must be 6")
    basis: list[str] = Field(default_factory=list, description="Names of the coframe 1-forms")
    structure_constants: list[tuple[int, int, int, Rational]] = Field(
        default_factory=list,
        description="Triples (i, j, k, c^i_jk); the (i, k, j) entry is filled antisymmetrically",
    )
    metric: list[list[Rational]] = Field(description="Symmetric metric coefficients g_ij")
    orientation: int = Field(default=1, description="Orientation sign of the coframe")

    @field_validator("dimension")
    @classmethod
    def _six_dimensional(cls, value: int) -> int:
        if value != 6:
            raise ValueError("links are 6-dimensional")
        return value

    @field_validator("orientation")
    @classmethod
    def _sign(cls, value: int) -> int:
        if value not in (-1, 1):
            raise ValueError("orientation must be +1 or -1")
        return value

    @field_validator("structure_constants")
    @classmethod
    def _indices_in_range(cls, value):
        for i, j, k, c in value:
            if not all(0 <= idx < 6 for idx in (i, j, k)):
                raise ValueError(f"index out of range in ({i}, {j}, {k})")
            parse_rational(c)
        return value

    @field_validator("metric")
    @classmethod
    def _square(cls, value):
        if len(value) != 6 or any(len(row) != 6 for row in value):
            raise ValueError("metric must be 6x6")
        for row in value:
            for entry in row:
                parse_rational(entry)
        return value
