"""
Tests for the command-line front end
"""

import json
import os
import sys
import unittest
from io import StringIO
from pathlib import Path
from unittest.mock import patch

# Add the parent directory to path so we can import modules
sys.path.append(str(Path(__file__).parent.parent))

from tlcalc import __version__
from tlcalc.cli import EXIT_BAD_INPUT, EXIT_FAILED, EXIT_OK, EXIT_TOO_LARGE, main, run_demo
from tlcalc.config import reset_settings
from tlcalc.errors import TLCalcError

TEST_DATA = Path(__file__).parent / "test_data"


class CLITestCase(unittest.TestCase):
    """Runs main() with stdout captured"""

    def setUp(self):
        reset_settings()

    def tearDown(self):
        reset_settings()

    def run_cli(self, *argv):
        with patch('sys.stdout', new=StringIO()) as stdout:
            code = main(list(argv))
        return code, json.loads(stdout.getvalue())


class TestEval(CLITestCase):

    def test_loop(self):
        code, payload = self.run_cli("eval", "cup ; cap", "--dim", "5")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["matrix"], [[[1.0, 0.0]]])
        self.assertEqual(payload["shape"], [1, 1])

    def test_expression_file(self):
        code, payload = self.run_cli("eval", str(TEST_DATA / "loop.tl"), "--dim", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["matrix"], [[[1.0, 0.0]]])

    def test_registry_file(self):
        code, payload = self.run_cli("eval", "op(H)", "--dim", "2", "--registry", str(TEST_DATA / "registry_d2.json"))
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(payload["matrix"][0][1][0], 0.7071067811865476, places=10)
        self.assertAlmostEqual(payload["matrix"][1][1][0], -0.7071067811865476, places=10)

    def test_protocol_fixture(self):
        code, payload = self.run_cli("eval", str(TEST_DATA / "teleport_outcome.tl"), "--dim", "2",
                                     "--registry", str(TEST_DATA / "registry_d2.json"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["shape"], [8, 4])

    def test_bad_syntax(self):
        code, payload = self.run_cli("eval", str(TEST_DATA / "bad_syntax.tl"), "--dim", "2")
        self.assertEqual(code, EXIT_BAD_INPUT)
        self.assertEqual(payload["type"], "ParseError")
        self.assertIn("line 2, column 3", payload["error"])

    def test_arity_mismatch(self):
        code, payload = self.run_cli("eval", str(TEST_DATA / "arity_mismatch.tl"), "--dim", "2")
        self.assertEqual(code, EXIT_BAD_INPUT)
        self.assertEqual(payload["type"], "ElaborationError")

    def test_unresolved_label(self):
        code, payload = self.run_cli("eval", "op(Q)", "--dim", "2")
        self.assertEqual(code, EXIT_BAD_INPUT)
        self.assertEqual(payload["type"], "UnresolvedLabelError")

    def test_missing_registry(self):
        code, payload = self.run_cli("eval", "op(H)", "--dim", "2", "--registry", "/nonexistent/registry.json")
        self.assertEqual(code, EXIT_BAD_INPUT)
        self.assertEqual(payload["type"], "RegistryError")

    def test_too_large(self):
        code, payload = self.run_cli("eval", "id(12)", "--dim", "5")
        self.assertEqual(code, EXIT_TOO_LARGE)
        self.assertEqual(payload["type"], "ProblemTooLargeError")

    def test_many_terminal_lines(self):
        expression = " * ".join(["(ket(e0) ; bra(e0))"] * 30)
        code, payload = self.run_cli("eval", expression, "--dim", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["matrix"], [[[1.0, 0.0]]])

    def test_unexpected_error(self):
        with patch("tlcalc.cli.cmd_eval", side_effect=RuntimeError("boom")):
            with patch("sys.stderr", new=StringIO()):
                code, payload = self.run_cli("eval", "cup ; cap", "--dim", "2")
        self.assertEqual(code, EXIT_BAD_INPUT)
        self.assertEqual(payload, {"error": "boom", "type": "RuntimeError"})


class TestNormalize(CLITestCase):

    def test_projector_square(self):
        code, payload = self.run_cli("normalize", "proj ; proj", "--dim", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["rule_counts"], {"loop_eliminate": 1})
        self.assertEqual(len(payload["steps"]), 1)
        self.assertIn("normal_form", payload)

    def test_order_seed(self):
        expression = "cup ; op(U2) * op(U3) ; op(U4) * id(1)"
        _, canonical = self.run_cli("normalize", expression, "--dim", "2")
        code, shuffled = self.run_cli("normalize", expression, "--dim", "2", "--order-seed", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(shuffled["final"]["strands"]), len(canonical["final"]["strands"]))
        self.assertEqual(shuffled["initial_hash"], canonical["initial_hash"])


class TestVerify(CLITestCase):

    def test_single_identity(self):
        code, payload = self.run_cli("verify", "snake_left", "--dim", "3")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(payload), 1)
        self.assertTrue(payload[0]["passed"])

    def test_all_at_one_dimension(self):
        code, payload = self.run_cli("verify", "all", "--dim", "2", "--seed", "0")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(all(r["passed"] for r in payload))
        self.assertIn("cnot", {r["identity_id"] for r in payload})

    def test_failing_tolerance(self):
        with patch.dict(os.environ, {"TLCALC_TOLERANCE": "0"}):
            reset_settings()
            code, payload = self.run_cli("verify", "teleport", "--dim", "2")
        self.assertEqual(code, EXIT_FAILED)
        self.assertFalse(payload[0]["passed"])

    def test_bad_requests(self):
        code, payload = self.run_cli("verify", "cnot", "--dim", "3")
        self.assertEqual(code, EXIT_BAD_INPUT)
        self.assertEqual(payload["type"], "ParameterRangeError")
        code, payload = self.run_cli("verify", "no_such_identity")
        self.assertEqual(code, EXIT_BAD_INPUT)
        self.assertEqual(payload["type"], "UnknownIdentityError")


class TestDemo(CLITestCase):

    def test_teleport(self):
        code, payload = self.run_cli("demo", "teleport", "--dim", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(payload["passed"])
        self.assertEqual(sorted(payload["residuals"]), ["1", "2", "3", "4"])
        self.assertGreater(len(payload["steps"]), 4)

    def test_densecode(self):
        result = run_demo("densecode", 3)
        self.assertTrue(result["passed"])
        self.assertEqual(len(result["residuals"]), 9)

    def test_swap(self):
        result = run_demo("swap", 3, seed=1)
        self.assertTrue(result["passed"])
        self.assertEqual(len(result["residuals"]), 20)
        self.assertEqual(len(run_demo("swap", 2)["residuals"]), 64)

    def test_unknown_protocol(self):
        with self.assertRaises(TLCalcError):
            run_demo("bogus", 2)


class TestArguments(unittest.TestCase):

    def test_version(self):
        with patch('sys.stdout', new=StringIO()) as stdout:
            with self.assertRaises(SystemExit) as ctx:
                main(["--version"])
        self.assertEqual(ctx.exception.code, 0)
        self.assertIn(__version__, stdout.getvalue())

    def test_missing_command(self):
        with patch('sys.stderr', new=StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                main([])
        self.assertEqual(ctx.exception.code, 2)


if __name__ == "__main__":
    unittest.main()
