#!/usr/bin/env python3
"""
tlcalc MCP Server

Exposes diagram evaluation, normalization and the identity catalog as MCP
tools, and each catalog identity as a resource.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

try:
    from fastmcp import FastMCP
    HAS_FASTMCP = True
except ImportError:
    FastMCP = None
    HAS_FASTMCP = False

# The server runs from its own directory; make the tlcalc package importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent))

from tlcalc.config import get_settings
from tlcalc.diagram.diagram import Diagram
from tlcalc.diagram.registry import OperatorRegistry, standard_registry
from tlcalc.dsl.elaborator import compile_expression
from tlcalc.errors import TLCalcError
from tlcalc.numeric.evaluator import evaluate
from tlcalc.protocols.catalog import get_entry, list_identities
from tlcalc.protocols.catalog import verify_identity as run_identity
from tlcalc.rewrite.normalizer import normalize

logger = logging.getLogger(__name__)


class TLCalcServer:
    """MCP server wrapping the tlcalc engine"""

    def __init__(self):
        if not HAS_FASTMCP:
            raise RuntimeError("fastmcp is not installed; pip install -r requirements.txt")
        self.mcp = FastMCP(os.getenv("SERVER_NAME", "tlcalc-server"), version="1.0.0")
        self.setup_resources()
        self.setup_tools()

    def _registry(self, d: int, registry: Optional[Dict[str, Any]]) -> OperatorRegistry:
        base = standard_registry(d)
        if registry:
            return OperatorRegistry.from_dict({"d": d, **registry}, base=base)
        return base

    def evaluate_expression(self, expression: str, d: int,
                            registry: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Matrix of an expression at dimension d"""
        try:
            diagram = compile_expression(expression)
            return evaluate(diagram, d, self._registry(d, registry)).to_dict()
        except TLCalcError as e:
            logger.error(f"Error evaluating {expression!r}: {e}")
            return {"error": str(e)}

    def normalize_expression(self, expression: str, d: int = 2,
                             order_seed: Optional[int] = None) -> Dict[str, Any]:
        """Normal form and rewrite trace of an expression"""
        try:
            diagram = compile_expression(expression)
            if not isinstance(diagram, Diagram):
                return {"error": "Expected a single diagram, not a sum"}
            final, trace = normalize(diagram, self._registry(d, None), d, order_seed=order_seed)
            result = trace.to_dict()
            result["normal_form"] = str(final)
            return result
        except TLCalcError as e:
            logger.error(f"Error normalizing {expression!r}: {e}")
            return {"error": str(e)}

    def verify_identity(self, identity_id: str, d: int = 2, seed: Optional[int] = None) -> Dict[str, Any]:
        """IdentityReport of one catalog identity"""
        try:
            return run_identity(identity_id, d, seed).to_dict()
        except TLCalcError as e:
            logger.error(f"Error verifying {identity_id}: {e}")
            return {"error": str(e)}

    def describe_identity(self, identity_id: str) -> Dict[str, Any]:
        try:
            entry = get_entry(identity_id)
        except TLCalcError as e:
            return {"error": str(e)}
        return {
            "uri": f"tlcalc://identities/{identity_id}",
            "identity_id": entry.identity_id,
            "description": entry.description,
            "seeded": entry.seeded,
            "dimensions": list(entry.dimensions) if entry.dimensions else get_settings().dimensions,
        }

    def setup_resources(self):
        """Register catalog resources"""

        @self.mcp.resource("tlcalc://identities/{identity_id}")
        async def get_identity(identity_id: str) -> Dict[str, Any]:
            """Description of one catalog identity"""
            return self.describe_identity(identity_id)

    def setup_tools(self):
        """Register engine tools"""

        @self.mcp.tool()
        async def evaluate_expression(expression: str, d: int,
                                      registry: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
            """Evaluate a diagram expression to its matrix; registry adds labels in the registry file format"""
            return self.evaluate_expression(expression, d, registry)

        @self.mcp.tool()
        async def normalize_expression(expression: str, d: int = 2,
                                       order_seed: Optional[int] = None) -> Dict[str, Any]:
            """Rewrite a diagram expression to normal form"""
            return self.normalize_expression(expression, d, order_seed)

        @self.mcp.tool()
        async def verify_identity(identity_id: str, d: int = 2, seed: Optional[int] = None) -> Dict[str, Any]:
            """Check one identity from the catalog"""
            return self.verify_identity(identity_id, d, seed)

        @self.mcp.tool(name="list_identities")
        async def list_identities_tool() -> List[str]:
            """Ids of every identity in the catalog"""
            return list_identities()

    def run(self):
        logger.info("Starting tlcalc MCP server...")
        self.mcp.run()


if __name__ == "__main__":
    logging.basicConfig(level=get_settings().log_level.upper())
    server = TLCalcServer()
    server.run()
