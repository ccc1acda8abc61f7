#!/usr/bin/env python3
"""
Tests for the tlcalc MCP server

The tool bodies are plain methods on the server, so they are exercised
directly; the FastMCP wrappers only forward to them.
"""

import sys
import unittest
from pathlib import Path

# Add the server directory to the path
sys.path.insert(0, str(Path(__file__).parent))

from tlcalc_server import HAS_FASTMCP, TLCalcServer


@unittest.skipUnless(HAS_FASTMCP, "fastmcp not installed")
class TestTLCalcServer(unittest.TestCase):
    """Test TLCalcServer functionality"""

    def setUp(self):
        self.server = TLCalcServer()

    def test_server_initialization(self):
        self.assertIsNotNone(self.server.mcp)

    def test_evaluate_loop(self):
        result = self.server.evaluate_expression("cup ; cap", 3)
        self.assertNotIn("error", result)
        self.assertEqual(result["shape"], [1, 1])
        self.assertAlmostEqual(result["matrix"][0][0][0], 1.0)

    def test_evaluate_with_registry(self):
        registry = {"matrices": {"M": [[[2, 0], [0, 0]], [[0, 0], [3, 0]]]}}
        result = self.server.evaluate_expression("op(M)", 2, registry)
        self.assertEqual(result["matrix"][0][0], [2.0, 0.0])
        self.assertEqual(result["matrix"][1][1], [3.0, 0.0])

    def test_evaluate_error(self):
        result = self.server.evaluate_expression("cup ; id(1)", 2)
        self.assertIn("error", result)

    def test_normalize(self):
        result = self.server.normalize_expression("proj ; proj", 2)
        self.assertNotIn("error", result)
        self.assertIn("steps", result)
        self.assertIn("normal_form", result)

    def test_verify_identity(self):
        result = self.server.verify_identity("snake_left", 2)
        self.assertTrue(result["passed"])

    def test_verify_unknown_identity(self):
        result = self.server.verify_identity("no_such_identity", 2)
        self.assertIn("error", result)
        self.assertIn("Unknown identity", result["error"])

    def test_describe_identity(self):
        result = self.server.describe_identity("cnot")
        self.assertEqual(result["uri"], "tlcalc://identities/cnot")
        self.assertEqual(result["dimensions"], [2])
        self.assertIn("error", self.server.describe_identity("bogus"))


if __name__ == "__main__":
    unittest.main()
