"""
Min-entropy evaluation of a continuous-variable QRNG source.

Model: the measured signal is quantum Gaussian noise plus independent classical noise,
digitised by an ADC with evenly spaced bins. Only the quantum-to-classical variance ratio
gamma and the total variance enter; the classical noise distribution is never needed.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy import constants
from scipy.special import ndtr

from src.common.errors import ContractError
from src.common.logging import logger

PROBABILITY_TOLERANCE = 1e-9
PLANCK_TIMES_C = constants.h * constants.c  # J*m, ~1.98645e-25


@dataclass(frozen=True)
class SourceModel:
    """
    Physical parameters of the raw source.

    Attributes:
        gamma (float): quantum-to-classical variance ratio.
        sigma2_total (float): total signal variance (V^2).
        mean (float): signal mean (V).
        adc_bits (int): converter resolution.
        adc_min (float): lower end of the full-scale range (V).
        adc_max (float): upper end of the full-scale range (V).
    """

    gamma: float
    sigma2_total: float
    mean: float = 0.0
    adc_bits: int = 8
    adc_min: float = -1.0
    adc_max: float = 1.0

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ContractError(f"gamma must be positive, got {self.gamma}")
        if not self.sigma2_total > 0:
            raise ContractError(f"sigma2_total must be positive, got {self.sigma2_total}")
        if not 1 <= self.adc_bits <= 16:
            raise ContractError(f"adc_bits must lie in 1..16, got {self.adc_bits}")
        if not self.adc_min < self.adc_max:
            raise ContractError(f"adc range [{self.adc_min}, {self.adc_max}] is empty")

    @property
    def codes(self) -> int:
        return 1 << self.adc_bits

    @property
    def bin_width(self) -> float:
        return (self.adc_max - self.adc_min) / self.codes

    def bin_edges(self) -> np.ndarray:
        """All 2^b + 1 evenly spaced edges on [adc_min, adc_max]."""
        return np.linspace(self.adc_min, self.adc_max, self.codes + 1)

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class EntropyReport:
    """Per-sample entropy figures of a modelled source."""

    sigma2_quantum: float
    bin_probs: List[float] = field(repr=False)
    min_entropy_bits: float
    shannon_bits: float
    adc_bits: int

    def to_dict(self, include_bins: bool = False) -> Dict[str, Any]:
        out = {
            "sigma2_quantum": self.sigma2_quantum,
            "min_entropy_bits": self.min_entropy_bits,
            "shannon_bits": self.shannon_bits,
            "adc_bits": self.adc_bits,
            "max_bin_probability": max(self.bin_probs),
        }
        if include_bins:
            out["bin_probs"] = list(self.bin_probs)
        return out


def quantum_variance(model: SourceModel) -> float:
    """gamma * sigma2_total / (1 + gamma)."""
    return model.gamma * model.sigma2_total / (1.0 + model.gamma)


def bin_probabilities(model: SourceModel, variance: float) -> np.ndarray:
    """
    Probability of each ADC code for a Gaussian(mean, variance) input.

    Inner codes take the mass of [edge_j, edge_{j+1}); the two outermost codes absorb the
    tails below edge_1 and from edge_{2^b - 1} upwards (converter saturation).
    """
    if not variance > 0:
        raise ContractError(f"variance must be positive, got {variance}")
    sigma = math.sqrt(variance)
    inner_edges = model.bin_edges()[1:-1]
    z = (inner_edges - model.mean) / sigma
    cdf = np.concatenate([[0.0], ndtr(z), [1.0]])
    return np.clip(np.diff(cdf), 0.0, 1.0)


def _validate_probs(probs: Sequence[float]) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.size == 0:
        raise ContractError("probability list is empty")
    if np.any(p < 0):
        raise ContractError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > PROBABILITY_TOLERANCE:
        raise ContractError(f"probabilities sum to {p.sum():.12f}, not 1")
    return p


def min_entropy(probs: Sequence[float]) -> float:
    """-log2 of the largest probability."""
    p = _validate_probs(probs)
    return float(-math.log2(p.max()))


def shannon_entropy(probs: Sequence[float]) -> float:
    """-sum p log2 p with 0 log 0 = 0."""
    p = _validate_probs(probs)
    nz = p[p > 0]
    return float(max(0.0, -(nz * np.log2(nz)).sum()))


def photon_bound(power: float, wavelength: float, window: float) -> float:
    """
    log2 of the mean photon number in a detection window: the entropy ceiling of one sample
    for a perfect photon-number-resolving detector.
    """
    if not (power > 0 and wavelength > 0 and window > 0):
        raise ContractError("power, wavelength and window must all be positive")
    photons = power * window * wavelength / PLANCK_TIMES_C
    return math.log2(photons)


def sample_variance(samples: Sequence[int], volts_per_code: float = 1.0, offset: float = 0.0) -> Tuple[float, float]:
    """
    Unbiased mean and variance of ADC codes after the affine conversion code -> volts.
    """
    codes = np.asarray(samples, dtype=np.float64)
    if codes.size < 2:
        raise ContractError(f"need at least 2 samples, got {codes.size}")
    volts = codes * volts_per_code + offset
    return float(volts.mean()), float(volts.var(ddof=1))


def evaluate(model: SourceModel) -> EntropyReport:
    """
    Quantum variance -> ADC code distribution -> min-entropy and Shannon entropy per sample.
    """
    variance = quantum_variance(model)
    probs = bin_probabilities(model, variance)
    probs = probs / probs.sum()
    report = EntropyReport(
        sigma2_quantum=variance,
        bin_probs=[float(x) for x in probs],
        min_entropy_bits=min_entropy(probs),
        shannon_bits=shannon_entropy(probs),
        adc_bits=model.adc_bits,
    )
    logger.info(
        f"Entropy model: sigma2_quantum={variance:.6g} V^2, H_min={report.min_entropy_bits:.4f} bits, "
        f"H_shannon={report.shannon_bits:.4f} bits per {model.adc_bits}-bit sample"
    )
    return report


def certified_min_entropy(per_sample_bits: float, n_bits: int, adc_bits: int) -> float:
    """
    Min-entropy k of an n-bit input block made of n / adc_bits raw samples.
    4096 bits at 6.7 bits per 8-bit sample gives 3430.4.
    """
    if n_bits % adc_bits:
        raise ContractError(f"block of {n_bits} bits is not a whole number of {adc_bits}-bit samples")
    if not 0 <= per_sample_bits <= adc_bits:
        raise ContractError(f"per-sample min-entropy {per_sample_bits} outside [0, {adc_bits}]")
    return (n_bits // adc_bits) * per_sample_bits
