"""Service layer: verification suites and artifact writers."""

from .artifacts import emit_csv, write_artifacts, write_report
from .suites import SUITES, require_passed, run_suites

__all__ = ["SUITES", "emit_csv", "require_passed", "run_suites", "write_artifacts", "write_report"]
