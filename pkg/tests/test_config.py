"""
Tests for settings loading: yaml file first, then environment overrides
"""

import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

# Add the parent directory to path so we can import modules
sys.path.append(str(Path(__file__).parent.parent))

from tlcalc.config import ENV_OVERRIDES, Settings, get_settings, load_settings, reset_settings
from tlcalc.errors import ConfigError


class TestSettings(unittest.TestCase):
    """Test load_settings and the cached accessor"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        # Keep overrides from the surrounding environment out of the way
        self.env = patch.dict(os.environ, {name: "" for name in ENV_OVERRIDES})
        self.env.start()
        os.environ.pop("TLCALC_CONFIG", None)
        reset_settings()

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()
        reset_settings()

    def write(self, text: str) -> str:
        path = os.path.join(self.tmp.name, "tlcalc.yaml")
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_file_values(self):
        path = self.write("tolerance: 1.0e-6\ndimensions: [2, 3]\nworkers: 2\n")
        settings = load_settings(path)
        self.assertEqual(settings.tolerance, 1e-6)
        self.assertEqual(settings.dimensions, [2, 3])
        self.assertEqual(settings.workers, 2)
        self.assertEqual(settings.exact_tolerance, Settings().exact_tolerance)

    def test_environment_wins(self):
        path = self.write("tolerance: 1.0e-6\nmax_entries: 500\n")
        os.environ["TLCALC_TOLERANCE"] = "0.25"
        os.environ["LOG_LEVEL"] = "debug"
        settings = load_settings(path)
        self.assertEqual(settings.tolerance, 0.25)
        self.assertEqual(settings.max_entries, 500)
        self.assertEqual(settings.log_level, "debug")

    def test_config_path_from_environment(self):
        path = self.write("seeds_per_identity: 3\n")
        os.environ["TLCALC_CONFIG"] = path
        self.assertEqual(load_settings().seeds_per_identity, 3)

    def test_empty_file(self):
        self.assertEqual(load_settings(self.write("")), Settings())

    def test_unknown_key_warns(self):
        path = self.write("tolerance: 1.0e-8\ncolour: blue\n")
        with self.assertLogs("tlcalc.config", level="WARNING") as logs:
            settings = load_settings(path)
        self.assertEqual(settings.tolerance, 1e-8)
        self.assertTrue(any("colour" in line for line in logs.output))

    def test_errors(self):
        with self.assertRaises(ConfigError):
            load_settings(os.path.join(self.tmp.name, "missing.yaml"))
        with self.assertRaises(ConfigError):
            load_settings(self.write("tolerance: [unclosed\n"))
        with self.assertRaises(ConfigError):
            load_settings(self.write("- just\n- a list\n"))
        with self.assertRaises(ConfigError):
            load_settings(self.write("max_entries: lots\n"))
        with self.assertRaises(ConfigError):
            load_settings(self.write("tolerance: -1\n"))
        os.environ["TLCALC_MAX_ENTRIES"] = "many"
        with self.assertRaises(ConfigError):
            load_settings(self.write(""))

    def test_cached_until_reset(self):
        os.environ["TLCALC_CONFIG"] = self.write("workers: 7\n")
        first = get_settings()
        self.assertIs(get_settings(), first)
        os.environ["TLCALC_CONFIG"] = self.write("workers: 9\n")
        self.assertEqual(get_settings().workers, 7)
        reset_settings()
        self.assertEqual(get_settings().workers, 9)


if __name__ == "__main__":
    unittest.main()
