"""Pydantic schemas for parameters, run configuration, link files and reports."""

from .config import COMMANDS, Command, FeasibilityOptions, GateOptions, RateOptions, RunConfig
from .link import LinkFile, parse_rational
from .params import GlueParams, RegionConstants, Tolerances
from .reports import (
    CheckResult,
    FeasibilityRegion,
    FitResult,
    JoyceVerdict,
    NormName,
    NormReport,
    Region,
    SuiteReport,
    Table,
)

__all__ = [
    "COMMANDS",
    "CheckResult",
    "Command",
    "FeasibilityOptions",
    "FeasibilityRegion",
    "FitResult",
    "GateOptions",
    "GlueParams",
    "JoyceVerdict",
    "LinkFile",
    "NormName",
    "NormReport",
    "RateOptions",
    "Region",
    "RegionConstants",
    "RunConfig",
    "SuiteReport",
    "Table",
    "Tolerances",
    "parse_rational",
]
