"""
Command-line tests through click's CliRunner.
"""

import json
import os
import tempfile
import unittest

import yaml
from click.testing import CliRunner

from src.bits.io import read_bits
from src.cli import cli
from src.config.manage import ConfigManager
from src.constants import EXIT_CONTRACT, EXIT_IO, EXIT_STATISTICAL, MANIFEST_SUFFIX, TOOLKIT_VERSION


class TestCli(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def invoke(self, *args: str):
        return self.runner.invoke(cli, list(args))

    def invoke_json(self, *args: str):
        result = self.invoke(*args)
        self.assertEqual(result.exit_code, 0, result.output)
        return json.loads(result.output)

    def test_toeplitz_params(self):
        report = self.invoke_json("params", "--toeplitz", "--k", "3430", "--eps-log2", "-100")
        self.assertEqual(report["m"], 3230)
        self.assertEqual(report["seed_bits"], 7325)

    def test_trevisan_params(self):
        report = self.invoke_json("params", "--trevisan", "--ni", "32768", "--nf", "16384")
        self.assertEqual((report["m_e"], report["m_d"], report["b"], report["d"]), (128, 8, 7, 458752))
        self.assertAlmostEqual(report["epsilon_log2"], -40.5)
        self.assertTrue(report["warnings"])

    def test_sizing_error_exit_code(self):
        result = self.invoke("params", "--toeplitz", "--k", "200", "--eps-log2", "-100")
        self.assertEqual(result.exit_code, EXIT_CONTRACT)
        lines = [line for line in result.output.splitlines() if line.startswith("error=")]
        self.assertEqual(len(lines), 1)
        self.assertTrue(lines[0].startswith("error=SIZING exit=2 message="))

    def test_invalid_config_file(self):
        config = self.path("bad.yml")
        with open(config, "w") as file:
            file.write("source:\n  gamma: 10\n")
        result = self.invoke("--config", config, "params")
        self.assertEqual(result.exit_code, EXIT_CONTRACT)
        self.assertIn("error=CONTRACT", result.output)

    def test_missing_input_exit_code(self):
        result = self.invoke("test", "--in", self.path("missing.bin"))
        self.assertEqual(result.exit_code, EXIT_IO)
        self.assertIn("error=IO exit=3", result.output)

    def test_entropy(self):
        report = self.invoke_json("entropy", "--length", "4096")
        self.assertAlmostEqual(report["min_entropy_bits"], 6.70, delta=0.01)
        self.assertEqual(report["block_bits"], 4096)
        self.assertAlmostEqual(report["certified_k"], 512 * report["min_entropy_bits"])

    def test_version_and_quiet(self):
        result = self.invoke("--version")
        self.assertEqual(result.exit_code, 0)
        self.assertIn(TOOLKIT_VERSION, result.output)
        report = self.invoke_json("--quiet", "params", "--k", "3430")
        self.assertEqual(report["m"], 3230)

    def test_config_is_canonical(self):
        result = self.invoke("--threads", "3", "config")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(yaml.safe_load(result.output)["threads"], 3)
        self.assertEqual(ConfigManager.parse(result.output).canonical(), result.output)

    def test_full_flow(self):
        """Test: simulate, seed, extract, then test raw and extracted streams."""
        raw, seed, out = self.path("raw.bin"), self.path("seed.bin"), self.path("out.bin")
        simulated = self.invoke_json(
            "simulate", "--out", raw, "--samples", str(1 << 17), "--classical", "sinusoidal-drift"
        )
        self.assertEqual(simulated["samples"], 1 << 17)

        seeded = self.invoke_json("seed", "--out", seed)
        self.assertEqual(seeded["bits"], read_bits(seed).length_bits)

        extracted = self.invoke_json("extract", "--in", raw, "--seed-file", seed, "--out", out)
        self.assertEqual(extracted["blocks"], 256)
        self.assertTrue(os.path.exists(out + MANIFEST_SUFFIX))

        raw_test = self.invoke_json("--alpha", "0.001", "test", "--in", raw, "--expect", "fail")
        self.assertFalse(raw_test["passed"])
        result = self.invoke("--alpha", "0.001", "test", "--in", raw, "--expect", "pass")
        self.assertEqual(result.exit_code, EXIT_STATISTICAL)
        self.assertIn("error=STATISTICAL exit=4", result.output)

        out_test = self.invoke_json("--alpha", "0.001", "test", "--in", out, "--expect", "pass")
        self.assertTrue(out_test["passed"])

        autocorr = self.invoke_json("autocorr", "--in", raw, "--mode", "samples", "--max-lag", "10")
        self.assertEqual(len(autocorr["coefficients"]), 11)
        self.assertFalse(autocorr["within_3_sigma"])

        exported = self.invoke_json("export", "--in", out, "--out", self.path("out.raw"))
        self.assertEqual(os.path.getsize(self.path("out.raw")), exported["bytes"])

    def test_raw_format_needs_whole_bytes(self):
        raw = self.path("raw.bin")
        self.invoke_json("simulate", "--out", raw, "--samples", "1024")
        # k = 3001.5 with log2(eps) = -100 gives m = 2801, not a byte multiple
        config = self._config(k=3001.5)
        self.invoke_json("--config", config, "seed", "--out", self.path("seed.bin"))
        args = ["extract", "--in", raw, "--seed-file", self.path("seed.bin"), "--out", self.path("out.raw")]
        self.assertEqual(self.invoke("--config", config, *args).exit_code, 0)
        result = self.invoke("--config", config, "--format", "raw", *args)
        self.assertEqual(result.exit_code, EXIT_IO)
        self.assertIn("error=FORMAT", result.output)

    def _config(self, **values) -> str:
        path = self.path("config.yml")
        with open(path, "w") as file:
            yaml.safe_dump(values, file)
        return path

    def test_bench(self):
        report = self.invoke_json("bench", "--toeplitz-blocks", "2", "--bench-nf", "128", "--bench-nf", "256")
        self.assertIn("cpu_count", report["host"])
        self.assertEqual(report["toeplitz"]["blocks"], 2)
        self.assertEqual([row["n_f"] for row in report["trevisan"]], [128, 256])


if __name__ == "__main__":
    unittest.main()
