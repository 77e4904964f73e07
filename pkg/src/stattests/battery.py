"""
A small randomness battery in the style of the public suites.

Single tests pass when p >= alpha. Aggregations of many p-values (Kolmogorov-Smirnov)
pass when alpha <= P <= 1 - alpha. Anything beyond this subset is left to the external
suites; `export_raw` writes their input.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import erfc, gammaincc, ndtr

from src.bits.bitvector import BitVector, split_blocks
from src.bits.io import write_bits
from src.common.errors import ContractError
from src.common.logging import logger
from src.constants import (
    BLOCK_FREQUENCY_DEFAULT_BLOCK,
    BLOCK_FREQUENCY_MIN_BITS,
    CHI_SQUARE_MIN_BYTES,
    CUSUM_MIN_BITS,
    DEFAULT_ALPHA,
    FORMAT_RAW,
    LONGEST_RUN_MIN_BITS,
    MONOBIT_MIN_BITS,
    RUNS_MIN_BITS,
)

RULE_ONE_SIDED = "p>=alpha"
RULE_TWO_SIDED = "alpha<=p<=1-alpha"

# (minimum n, block length M, class upper limits, class probabilities)
_LONGEST_RUN_REGIMES: Tuple[Tuple[int, int, Tuple[int, ...], Tuple[float, ...]], ...] = (
    (750000, 10000, (10, 11, 12, 13, 14, 15), (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6272, 128, (4, 5, 6, 7, 8), (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (128, 8, (1, 2, 3), (0.2148, 0.3672, 0.2305, 0.1875)),
)


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test (or one aggregation) at significance alpha."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    statistic: float
    p_value: float
    passed: bool
    alpha: float
    rule: str = RULE_ONE_SIDED

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _clip(p: float) -> float:
    return float(min(1.0, max(0.0, p)))


def _bits(bits: BitVector, minimum: int, name: str) -> np.ndarray:
    if bits.length_bits < minimum:
        raise ContractError(f"{name} needs at least {minimum} bits, got {bits.length_bits}")
    return bits.to_numpy().astype(np.int64)


def _report(name: str, statistic: float, p_value: float, alpha: float) -> TestReport:
    p = _clip(p_value)
    return TestReport(name=name, statistic=float(statistic), p_value=p, passed=p >= alpha, alpha=alpha)


def monobit(bits: BitVector, alpha: float = DEFAULT_ALPHA) -> TestReport:
    """Frequency test: p = erfc(|#ones - #zeros| / sqrt(2n))."""
    x = _bits(bits, MONOBIT_MIN_BITS, "monobit")
    n = x.size
    s_n = 2 * int(x.sum()) - n
    statistic = abs(s_n) / math.sqrt(n)
    return _report("monobit", statistic, erfc(statistic / math.sqrt(2)), alpha)


def block_frequency(
    bits: BitVector, block_len: int = BLOCK_FREQUENCY_DEFAULT_BLOCK, alpha: float = DEFAULT_ALPHA
) -> TestReport:
    """Frequency within blocks of `block_len` bits; trailing bits are ignored."""
    x = _bits(bits, BLOCK_FREQUENCY_MIN_BITS, "block_frequency")
    if block_len < 1:
        raise ContractError(f"block length must be positive, got {block_len}")
    blocks = x.size // block_len
    if blocks < 1:
        raise ContractError(f"block_frequency: {x.size} bits hold no {block_len}-bit block")
    proportions = x[: blocks * block_len].reshape(blocks, block_len).mean(axis=1)
    chi2 = 4.0 * block_len * float(((proportions - 0.5) ** 2).sum())
    return _report("block_frequency", chi2, gammaincc(blocks / 2.0, chi2 / 2.0), alpha)


def runs(bits: BitVector, alpha: float = DEFAULT_ALPHA) -> TestReport:
    """
    Runs test. When the ones proportion already fails the frequency prerequisite
    (|pi - 1/2| >= 2 / sqrt(n)) the p-value is 0.
    """
    x = _bits(bits, RUNS_MIN_BITS, "runs")
    n = x.size
    pi = x.mean()
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return _report("runs", abs(pi - 0.5), 0.0, alpha)
    v_obs = 1 + int(np.count_nonzero(x[1:] != x[:-1]))
    spread = pi * (1 - pi)
    statistic = abs(v_obs - 2 * n * spread) / (2 * math.sqrt(2 * n) * spread)
    return _report("runs", v_obs, erfc(statistic), alpha)


def _byte_values(data: Any) -> np.ndarray:
    if isinstance(data, BitVector):
        if data.length_bits % 8:
            raise ContractError(f"{data.length_bits} bits are not a whole number of bytes")
        data = data.payload
    return np.frombuffer(bytes(data), dtype=np.uint8)


def chi_square_bytes(data: Any, alpha: float = DEFAULT_ALPHA) -> TestReport:
    """Chi-square of the 256-bin byte histogram against uniform (255 degrees of freedom)."""
    values = _byte_values(data)
    if values.size < CHI_SQUARE_MIN_BYTES:
        raise ContractError(f"chi_square_bytes needs at least {CHI_SQUARE_MIN_BYTES} bytes, got {values.size}")
    counts = np.bincount(values, minlength=256).astype(np.float64)
    expected = values.size / 256.0
    chi2 = float(((counts - expected) ** 2).sum() / expected)
    return _report("chi_square_bytes", chi2, gammaincc(255 / 2.0, chi2 / 2.0), alpha)


def cumulative_sums(bits: BitVector, mode: str = "forward", alpha: float = DEFAULT_ALPHA) -> TestReport:
    """Maximal excursion of the +/-1 random walk, forward or backward."""
    if mode not in ("forward", "backward"):
        raise ContractError(f"cumulative_sums mode must be forward or backward, got {mode!r}")
    x = _bits(bits, CUSUM_MIN_BITS, "cumulative_sums")
    steps = 2 * x - 1
    if mode == "backward":
        steps = steps[::-1]
    z = int(np.abs(np.cumsum(steps)).max())
    n = x.size
    if z == 0:
        return _report(f"cumulative_sums_{mode}", 0, 1.0, alpha)
    root = math.sqrt(n)
    # Summation bounds truncate toward zero, as in the reference suite.
    k1 = np.arange(int((-n / z + 1) / 4), int((n / z - 1) / 4) + 1)
    k2 = np.arange(int((-n / z - 3) / 4), int((n / z - 1) / 4) + 1)
    total1 = float((ndtr((4 * k1 + 1) * z / root) - ndtr((4 * k1 - 1) * z / root)).sum())
    total2 = float((ndtr((4 * k2 + 3) * z / root) - ndtr((4 * k2 + 1) * z / root)).sum())
    return _report(f"cumulative_sums_{mode}", z, 1.0 - total1 + total2, alpha)


def _longest_runs_of_ones(blocks: np.ndarray) -> np.ndarray:
    rows, width = blocks.shape
    padded = np.zeros((rows, width + 2), dtype=np.int8)
    padded[:, 1:-1] = blocks
    edges = np.diff(padded.ravel())
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    longest = np.zeros(rows, dtype=np.int64)
    np.maximum.at(longest, starts // (width + 2), ends - starts)
    return longest


def longest_run(bits: BitVector, alpha: float = DEFAULT_ALPHA) -> TestReport:
    """Longest run of ones within blocks, block size chosen from the input length."""
    x = _bits(bits, LONGEST_RUN_MIN_BITS, "longest_run")
    n = x.size
    for minimum, block, limits, probs in _LONGEST_RUN_REGIMES:
        if n >= minimum:
            break
    count = n // block
    longest = _longest_runs_of_ones(x[: count * block].reshape(count, block))
    classes = np.searchsorted(np.array(limits), longest, side="left")
    observed = np.bincount(classes, minlength=len(probs)).astype(np.float64)
    expected = count * np.array(probs)
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    dof = len(probs) - 1
    return _report("longest_run", chi2, gammaincc(dof / 2.0, chi2 / 2.0), alpha)


def ks_uniformity(p_values: Sequence[float], alpha: float = DEFAULT_ALPHA) -> TestReport:
    """Kolmogorov-Smirnov test of p-values against U(0, 1); passes inside [alpha, 1 - alpha]."""
    p = np.asarray(p_values, dtype=np.float64)
    if p.size == 0:
        raise ContractError("ks_uniformity needs at least one p-value")
    result = stats.kstest(p, "uniform")
    p_value = _clip(result.pvalue)
    return TestReport(
        name="ks_uniformity",
        statistic=float(result.statistic),
        p_value=p_value,
        passed=alpha <= p_value <= 1 - alpha,
        alpha=alpha,
        rule=RULE_TWO_SIDED,
    )


def _battery_plan(bits: BitVector, alpha: float) -> List[Callable[[], TestReport]]:
    plan = [
        lambda: monobit(bits, alpha),
        lambda: block_frequency(bits, BLOCK_FREQUENCY_DEFAULT_BLOCK, alpha),
        lambda: runs(bits, alpha),
        lambda: cumulative_sums(bits, "forward", alpha),
        lambda: cumulative_sums(bits, "backward", alpha),
    ]
    if bits.length_bits >= LONGEST_RUN_MIN_BITS:
        plan.append(lambda: longest_run(bits, alpha))
    if bits.length_bits % 8 == 0 and bits.length_bits // 8 >= CHI_SQUARE_MIN_BYTES:
        plan.append(lambda: chi_square_bytes(bits, alpha))
    else:
        logger.debug(f"chi_square_bytes skipped: {bits.length_bits} bits is below {CHI_SQUARE_MIN_BYTES} whole bytes")
    return plan


def run_battery(bits: BitVector, alpha: float = DEFAULT_ALPHA, threads: int = 1) -> List[TestReport]:
    """
    Every applicable test on the same read-only bits, reported in a fixed order.
    """
    if not 0 < alpha < 0.5:
        raise ContractError(f"significance level must lie in (0, 0.5), got {alpha}")
    plan = _battery_plan(bits, alpha)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda test: test(), plan))
    else:
        reports = [test() for test in plan]
    for report in reports:
        logger.info(
            f"{report.name}: statistic={report.statistic:.6g} p={report.p_value:.6f} "
            f"{'PASS' if report.passed else 'FAIL'}"
        )
    return reports


def proportion_bound(alpha: float, sequences: int) -> float:
    """Minimum pass proportion for `sequences` sequences: (1 - a) - 3 sqrt(a (1 - a) / s)."""
    return (1 - alpha) - 3 * math.sqrt(alpha * (1 - alpha) / sequences)


def multi_sequence(
    bits: BitVector, sequences: int, alpha: float = DEFAULT_ALPHA, threads: int = 1
) -> List[Dict[str, Any]]:
    """
    Split `bits` into `sequences` equal sequences, run the battery on each, and report per
    test the pass proportion against the acceptance bound plus KS uniformity of its p-values.
    """
    if sequences < 2:
        raise ContractError(f"multi-sequence testing needs at least 2 sequences, got {sequences}")
    length = bits.length_bits // sequences
    length -= length % 8
    parts, _ = split_blocks(bits, length) if length else ([], 0)
    if len(parts) < sequences:
        raise ContractError(f"{bits.length_bits} bits cannot form {sequences} byte-aligned sequences")
    parts = parts[:sequences]

    per_test: Dict[str, List[TestReport]] = {}
    for part in parts:
        for report in run_battery(part, alpha, threads):
            per_test.setdefault(report.name, []).append(report)

    bound = proportion_bound(alpha, sequences)
    summary = []
    for name, reports in per_test.items():
        proportion = sum(r.passed for r in reports) / len(reports)
        ks = ks_uniformity([r.p_value for r in reports], alpha)
        summary.append(
            {
                "name": name,
                "sequences": len(reports),
                "proportion": proportion,
                "proportion_bound": bound,
                "proportion_passed": proportion >= bound,
                "ks_p_value": ks.p_value,
                "ks_passed": ks.passed,
            }
        )
        logger.info(
            f"{name}: {proportion:.3f} of {len(reports)} sequences pass (bound {bound:.4f}), KS p={ks.p_value:.4f}"
        )
    return summary


def battery_passed(reports: Sequence[TestReport]) -> bool:
    return all(r.passed for r in reports)


def export_raw(bits: BitVector, path: str) -> None:
    """Headerless byte stream for the external suites; lengths must be whole bytes."""
    write_bits(bits, path, FORMAT_RAW)
    logger.info(f"Exported {bits.length_bits // 8} bytes to {path}")
