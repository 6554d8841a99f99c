"""MCP tool implementations for the G2 gluing verification suites."""

import asyncio
from typing import Optional

from mcp.server.fastmcp import FastMCP

from .config import build_config
from .services import suites


async def _run(suite: str, overrides: dict) -> dict:
    config = build_config(overrides={"command": suite, **overrides})
    report = await asyncio.to_thread(suites.SUITES[suite], config)
    return report.model_dump()


def register_tools(mcp: FastMCP) -> None:
    """Register all verification tools with the MCP server."""

    @mcp.tool()
    async def verify_pointwise(seed: int = 42) -> dict:
        """Check the pointwise G2 algebra at the standard 3-form.

        Use to confirm the metric of φ₀, the type decompositions of 2-, 3- and 4-forms,
        the map J, the quadratic remainders F and G, and the derivative of Θ.

        Args:
            seed: Seed of the random forms drawn for the property checks

        Returns:
            Suite report with one entry per named check
        """
        return await _run("verify-pointwise", {"seed": seed})

    @mcp.tool()
    async def verify_link(link: str = "s3xs3", seed: int = 42) -> dict:
        """Solve for a nearly Kähler structure on a link and report its invariant spectrum.

        Args:
            link: Preset name (s3xs3, abelian6) or path to a link file
            seed: Seed of the multi-start solver

        Returns:
            Suite report with structure residuals, Betti numbers and Laplacian spectrum
        """
        return await _run("verify-link", {"link": link, "seed": seed})

    @mcp.tool()
    async def verify_cone(link: str = "s3xs3", seed: int = 42) -> dict:
        """Build the cone G2 structure over a nearly Kähler link and certify it.

        Args:
            link: Preset name or path to a link file
            seed: Seed of the nearly Kähler solve

        Returns:
            Suite report covering dφ_C = 0, dψ_C = 0, *φ_C = ψ_C and the Θ cross-check
        """
        return await _run("verify-cone", {"link": link, "seed": seed})

    @mcp.tool()
    async def scan_rates(
        link: str = "s3xs3",
        parity: str = "even",
        lower: float = -3.5,
        upper: float = -2.5,
        excluded: bool = False,
    ) -> dict:
        """Find critical rates of the cone's d + d* pencil on an interval of orders.

        Use when you need the orders at which homogeneous harmonic forms exist.

        Args:
            link: Preset name or path to a link file
            parity: even or odd forms on the cone
            lower: Left end of the scan
            upper: Right end of the scan
            excluded: Also certify every excluded range (slower)

        Returns:
            Suite report with critical rates, kernel dimensions and log-chain lengths
        """
        rates = {"parity": parity, "lower": lower, "upper": upper, "excluded": excluded}
        return await _run("rates", {"link": link, "rates": rates})

    @mcp.tool()
    async def glue_scan(
        mu: float = 1.0,
        delta: float = 0.2,
        gamma: float = 0.8,
        nu_prime: float = -4.0,
    ) -> dict:
        """Scan the torsion norms of the glued structure over scales s and fit exponents.

        Args:
            mu: Rate of the conically singular piece
            delta: Rate of the obstruction correction, below mu
            gamma: Neck exponent in (0, 1)
            nu_prime: Residual rate of the asymptotically conical piece

        Returns:
            Suite report with fitted against predicted slopes and the norm table
        """
        glue = {"mu": mu, "delta": delta, "gamma": gamma, "nu_prime": nu_prime}
        return await _run("glue-scan", {"glue": glue})

    @mcp.tool()
    async def feasibility(
        mu: float = 1.0, nu_prime: float = -4.0, delta: float = 0.2, samples: int = 101
    ) -> dict:
        """Compute the (γ, κ) region where the gluing estimates close.

        Args:
            mu: Smallest singular rate
            nu_prime: Residual AC rate
            delta: Obstruction rate
            samples: Number of κ samples in the boundary table

        Returns:
            Suite report with the boundary-curve table
        """
        options = {"mu": mu, "nu_prime": nu_prime, "delta": delta, "samples": samples}
        return await _run("feasibility", {"feasibility": options})

    @mcp.tool()
    async def joyce_gate(
        mu: float = 1.0,
        delta: float = 0.2,
        gamma: float = 0.8,
        kappa: Optional[float] = None,
        D1: float = 1.0,
        D2: float = 1.0,
        D3: float = 1.0,
    ) -> dict:
        """Check the hypotheses of the perturbation theorem below a located scale s₀.

        Args:
            mu: Rate of the conically singular piece
            delta: Obstruction rate
            gamma: Neck exponent
            kappa: Torsion exponent; half the largest feasible value if omitted
            D1: Torsion constant
            D2: Injectivity-radius constant
            D3: Curvature constant

        Returns:
            Suite report with the located threshold and per-scale verdicts
        """
        glue = {"mu": mu, "delta": delta, "gamma": gamma}
        gate = {"kappa": kappa, "D1": D1, "D2": D2, "D3": D3}
        return await _run("joyce-gate", {"glue": glue, "gate": gate})
