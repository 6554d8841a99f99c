"""Command-line driver: one subcommand per verification suite.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on input errors.
"""

import logging
from pathlib import Path
from typing import Any, Optional

import typer

from .config import build_config, log_level
from .errors import CheckFailure, ConfigParse, IoFailure
from .geometry.link_algebra import load_link
from .schemas.config import RunConfig
from .services.artifacts import write_artifacts
from .services.suites import require_passed, run_suites

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT_ERROR = 0, 1, 2
LINK_SUITES = {"verify-link", "verify-cone", "rates"}

app = typer.Typer(
    help="Verify the finite-dimensional core of G2 desingularization by gluing.",
    add_completion=False,
)


def run(config: RunConfig) -> int:
    """Run the configured suites, write their artifacts and return the exit code."""
    try:
        if LINK_SUITES & set(config.suites()):
            load_link(config.link)
        reports = run_suites(config.suites(), config)
        for report in reports:
            write_artifacts(config.output_dir, report)
            typer.echo(report.render())
        require_passed(reports)
    except CheckFailure as exc:
        typer.echo(f"FAIL {exc.check}: {exc}", err=True)
        return EXIT_CHECK_FAILED
    except (ConfigParse, IoFailure, ValueError) as exc:
        typer.echo(f"error: {exc}", err=True)
        return EXIT_INPUT_ERROR
    return EXIT_OK


def _execute(ctx: typer.Context, overrides: dict[str, Any]) -> None:
    options = ctx.obj or {}
    merged = {**options.get("overrides", {}), **overrides}
    try:
        config = build_config(options.get("config_file"), merged)
    except ConfigParse as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_INPUT_ERROR)
    raise typer.Exit(run(config))


@app.callback(invoke_without_command=True)
def main_callback(
    ctx: typer.Context,
    config_file: Optional[Path] = typer.Option(
        None, "--config", "-c", help="INI run configuration"
    ),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", "-o", help="CSV directory"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of every random sample"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Threads for scans"),
    level: Optional[str] = typer.Option(None, "--log-level", help="Logging level"),
    run_all: bool = typer.Option(False, "--all", help="Run every suite"),
):
    logging.basicConfig(
        level=log_level(level), format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    ctx.obj = {
        "config_file": config_file,
        "overrides": {"output_dir": output_dir, "seed": seed, "workers": workers},
    }
    if ctx.invoked_subcommand is None:
        _execute(ctx, {"command": "all" if run_all else None})


@app.command("verify-pointwise")
def verify_pointwise(ctx: typer.Context):
    """Pointwise G2 algebra: metric, type projections, J and the quadratic remainders."""
    _execute(ctx, {"command": "verify-pointwise"})


@app.command("verify-link")
def verify_link(
    ctx: typer.Context,
    link: Optional[str] = typer.Option(None, "--link", help="Preset name or link file"),
):
    """Structure constants, nearly Kähler solve and invariant spectrum."""
    _execute(ctx, {"command": "verify-link", "link": link})


@app.command("verify-cone")
def verify_cone(
    ctx: typer.Context,
    link: Optional[str] = typer.Option(None, "--link", help="Preset name or link file"),
):
    """Cone G2 structure: closedness, exact primitives and the Θ cross-check."""
    _execute(ctx, {"command": "verify-cone", "link": link})


@app.command("rates")
def rates(
    ctx: typer.Context,
    link: Optional[str] = typer.Option(None, "--link", help="Preset name or link file"),
    parity: Optional[str] = typer.Option(None, "--parity", help="even or odd"),
    lower: Optional[float] = typer.Option(None, "--from", help="Left end of the λ scan"),
    upper: Optional[float] = typer.Option(None, "--to", help="Right end of the λ scan"),
    excluded: Optional[bool] = typer.Option(
        None, "--excluded/--no-excluded", help="Certify the excluded ranges"
    ),
):
    """Critical rates of the cone pencils, excluded ranges and log chains."""
    _execute(
        ctx,
        {
            "command": "rates",
            "link": link,
            "rates": {"parity": parity, "lower": lower, "upper": upper, "excluded": excluded},
        },
    )


def _glue_overrides(**values) -> dict[str, Any]:
    return {k: v for k, v in values.items() if v is not None}


@app.command("glue-scan")
def glue_scan(
    ctx: typer.Context,
    mu: Optional[float] = typer.Option(None, "--mu"),
    nu_prime: Optional[float] = typer.Option(None, "--nu-prime"),
    delta: Optional[float] = typer.Option(None, "--delta"),
    gamma: Optional[float] = typer.Option(None, "--gamma"),
    epsilon: Optional[float] = typer.Option(None, "--epsilon"),
):
    """Norms of χ_s over scales and their fitted exponents."""
    glue = _glue_overrides(mu=mu, nu_prime=nu_prime, delta=delta, gamma=gamma, epsilon=epsilon)
    _execute(ctx, {"command": "glue-scan", "glue": glue})


@app.command("feasibility")
def feasibility(
    ctx: typer.Context,
    mu: Optional[float] = typer.Option(None, "--mu"),
    nu_prime: Optional[float] = typer.Option(None, "--nu-prime"),
    delta: Optional[float] = typer.Option(None, "--delta"),
    samples: Optional[int] = typer.Option(None, "--samples", help="κ samples in the table"),
):
    """The (γ, κ) feasibility region as boundary curves."""
    options = {"mu": mu, "nu_prime": nu_prime, "delta": delta, "samples": samples}
    _execute(ctx, {"command": "feasibility", "feasibility": options})


@app.command("joyce-gate")
def joyce_gate(
    ctx: typer.Context,
    mu: Optional[float] = typer.Option(None, "--mu"),
    nu_prime: Optional[float] = typer.Option(None, "--nu-prime"),
    delta: Optional[float] = typer.Option(None, "--delta"),
    gamma: Optional[float] = typer.Option(None, "--gamma"),
    kappa: Optional[float] = typer.Option(None, "--kappa"),
    d1: Optional[float] = typer.Option(None, "--D1"),
    d2: Optional[float] = typer.Option(None, "--D2"),
    d3: Optional[float] = typer.Option(None, "--D3"),
):
    """Torsion, injectivity-radius and curvature hypotheses below a located threshold."""
    glue = _glue_overrides(mu=mu, nu_prime=nu_prime, delta=delta, gamma=gamma)
    gate = {"kappa": kappa, "D1": d1, "D2": d2, "D3": d3}
    _execute(ctx, {"command": "joyce-gate", "glue": glue, "gate": gate})


def main() -> None:
    app()


if __name__ == "__main__":
    main()
