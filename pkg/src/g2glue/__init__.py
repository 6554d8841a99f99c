"""G2 Glue MCP Server.

Verify the finite-dimensional core of G2 desingularization by gluing: pointwise G2
algebra, cone calculus over a nearly Kähler link, critical rates and gluing estimates.
"""

__version__ = "0.1.0"
