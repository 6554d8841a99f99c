"""Tests for MCP tools."""

import pytest
from mcp.server.fastmcp import FastMCP

from g2glue.tools import register_tools

TOOL_NAMES = {
    "verify_pointwise",
    "verify_link",
    "verify_cone",
    "scan_rates",
    "glue_scan",
    "feasibility",
    "joyce_gate",
}


@pytest.fixture
def mcp() -> FastMCP:
    """A FastMCP server with every tool registered."""
    server = FastMCP("test")
    register_tools(server)
    return server


class TestRegistration:
    """Tests for tool registration."""

    def test_all_tools_registered(self, mcp):
        """Test that one tool per suite is registered."""
        assert TOOL_NAMES <= {t.name for t in mcp._tool_manager._tools.values()}


class TestFeasibilityTool:
    """Tests for the feasibility tool."""

    @pytest.mark.asyncio
    async def test_returns_report_dict(self, mcp):
        """Test that feasibility returns a passing suite report as a dict."""
        tool = mcp._tool_manager._tools["feasibility"]
        result = await tool.fn(mu=1.0, nu_prime=-4.0, delta=0.2, samples=5)
        assert result["suite"] == "feasibility"
        assert all(check["passed"] for check in result["checks"])
        assert result["tables"][0]["header"][0] == "kappa"
        assert len(result["tables"][0]["rows"]) == 5

    @pytest.mark.asyncio
    async def test_empty_region_fails(self, mcp):
        """Test that ν′ = −3.5 reports a failing nonempty check."""
        tool = mcp._tool_manager._tools["feasibility"]
        result = await tool.fn(mu=1.0, nu_prime=-3.5, delta=0.2, samples=5)
        nonempty = next(c for c in result["checks"] if c["name"] == "region nonempty")
        assert nonempty["passed"] is False
