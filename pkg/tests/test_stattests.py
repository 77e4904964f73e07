"""
Tests for the randomness battery and autocorrelation analysis.
"""

import os
import tempfile
import unittest

import numpy as np

from src.bits.bitvector import BitVector
from src.common.errors import ContractError
from src.stattests.autocorr import autocorrelation
from src.stattests.battery import (
    RULE_TWO_SIDED,
    battery_passed,
    block_frequency,
    chi_square_bytes,
    cumulative_sums,
    export_raw,
    ks_uniformity,
    longest_run,
    monobit,
    multi_sequence,
    proportion_bound,
    run_battery,
    runs,
)


def alternating(n: int) -> BitVector:
    return BitVector.from_numpy(np.arange(n) % 2)


class TestSingleTests(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.Generator(np.random.Philox(12345))

    def test_monobit_balanced(self):
        report = monobit(alternating(1000))
        self.assertEqual(report.p_value, 1.0)
        self.assertTrue(report.passed)

    def test_monobit_all_zeros(self):
        report = monobit(BitVector.zeros(100))
        self.assertLess(report.p_value, 1e-20)
        self.assertFalse(report.passed)

    def test_monobit_too_short(self):
        with self.assertRaises(ContractError):
            monobit(BitVector.zeros(99))

    def test_runs_alternating_fails(self):
        report = runs(alternating(10_000))
        self.assertFalse(report.passed)

    def test_runs_prerequisite(self):
        report = runs(BitVector.from_numpy(np.ones(1000)))
        self.assertEqual(report.p_value, 0.0)
        self.assertAlmostEqual(report.statistic, 0.5)

    def test_chi_square_flat_histogram(self):
        data = bytes(range(256)) * 20
        report = chi_square_bytes(data)
        self.assertEqual(report.statistic, 0.0)
        self.assertAlmostEqual(report.p_value, 1.0)

    def test_chi_square_periodic_bytes(self):
        report = chi_square_bytes(BitVector.from_bytes(b"\xaa" * 4096))
        self.assertLess(report.p_value, 0.01)
        self.assertFalse(report.passed)

    def test_chi_square_needs_bytes(self):
        with self.assertRaises(ContractError):
            chi_square_bytes(BitVector.zeros(8 * 2000 + 3))
        with self.assertRaises(ContractError):
            chi_square_bytes(b"\x00" * 10)

    def test_block_frequency_constant(self):
        report = block_frequency(BitVector.zeros(1024), 128)
        self.assertFalse(report.passed)
        with self.assertRaises(ContractError):
            block_frequency(BitVector.zeros(1024), 0)

    def test_cumulative_sums(self):
        self.assertFalse(cumulative_sums(BitVector.zeros(1000)).passed)
        self.assertTrue(cumulative_sums(alternating(1000), "backward").passed)
        with self.assertRaises(ContractError):
            cumulative_sums(alternating(1000), "sideways")

    def test_longest_run_all_ones(self):
        self.assertFalse(longest_run(BitVector.from_numpy(np.ones(6272))).passed)

    def test_random_bits_pass(self):
        bits = BitVector.random(1 << 20, self.rng)
        reports = run_battery(bits, alpha=0.001)
        self.assertEqual(
            [r.name for r in reports],
            [
                "monobit",
                "block_frequency",
                "runs",
                "cumulative_sums_forward",
                "cumulative_sums_backward",
                "longest_run",
                "chi_square_bytes",
            ],
        )
        self.assertTrue(battery_passed(reports))

    def test_battery_threads_do_not_change_reports(self):
        bits = BitVector.random(1 << 16, self.rng)
        self.assertEqual(run_battery(bits, threads=1), run_battery(bits, threads=4))

    def test_battery_alpha_range(self):
        with self.assertRaises(ContractError):
            run_battery(BitVector.zeros(1000), alpha=0.5)


class TestAggregation(unittest.TestCase):
    def test_ks_inside_band(self):
        # D is about 0.1 for n = 100, well inside [alpha, 1 - alpha]
        report = ks_uniformity(0.9 * (np.arange(100) + 0.5) / 100)
        self.assertTrue(report.passed)
        self.assertEqual(report.rule, RULE_TWO_SIDED)

    def test_ks_too_regular(self):
        """Test: an exactly even grid is rejected by the upper edge of the band."""
        self.assertFalse(ks_uniformity((np.arange(100) + 0.5) / 100).passed)

    def test_ks_clustered(self):
        self.assertFalse(ks_uniformity(np.full(100, 0.99)).passed)

    def test_proportion_bound(self):
        self.assertAlmostEqual(proportion_bound(0.01, 100), 0.9602, places=4)

    def test_multi_sequence_on_zeros(self):
        summary = multi_sequence(BitVector.zeros(8 * 1024 * 10), 10)
        monobit_row = next(row for row in summary if row["name"] == "monobit")
        self.assertEqual(monobit_row["sequences"], 10)
        self.assertEqual(monobit_row["proportion"], 0.0)
        self.assertFalse(monobit_row["proportion_passed"])

    def test_multi_sequence_needs_two(self):
        with self.assertRaises(ContractError):
            multi_sequence(BitVector.zeros(8000), 1)


class TestExportRaw(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "out.raw")

    def tearDown(self):
        self.tmp.cleanup()

    def test_one_byte(self):
        export_raw(BitVector.from_string("10100101"), self.path)
        with open(self.path, "rb") as file:
            self.assertEqual(file.read(), b"\xa5")

    def test_empty(self):
        export_raw(BitVector.empty(), self.path)
        self.assertEqual(os.path.getsize(self.path), 0)


class TestAutocorrelation(unittest.TestCase):
    def test_alternating(self):
        report = autocorrelation(np.arange(1000) % 2, 3)
        self.assertEqual(report.coefficients[0], 1.0)
        self.assertAlmostEqual(report.coefficients[1], -1.0)
        self.assertAlmostEqual(report.coefficients[2], 1.0)

    def test_iid_bits_within_bound(self):
        rng = np.random.Generator(np.random.Philox(77))
        report = autocorrelation(rng.integers(0, 2, size=1 << 20), 100)
        self.assertTrue(report.within_bound())
        self.assertEqual(report.lags, list(range(101)))
        self.assertAlmostEqual(report.theoretical_std, 1 / 1024)

    def test_constant_series(self):
        with self.assertRaises(ContractError):
            autocorrelation(np.zeros(100), 5)

    def test_short_series(self):
        with self.assertRaises(ContractError):
            autocorrelation(np.arange(5), 5)
        with self.assertRaises(ContractError):
            autocorrelation(np.arange(50), 0)


if __name__ == "__main__":
    unittest.main()
