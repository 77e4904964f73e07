"""
Deterministic synthetic QRNG source.

sample = ADC(quantum + classical + mean), with the quantum and classical draws taken from
two independent Philox streams spawned from one 64-bit seed.
"""

import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.special import ndtri

from src.common.errors import ContractError, FormatError, ToolkitIOError
from src.common.io import ensure_parent_directory, load_json, save_json
from src.common.logging import logger
from src.constants import (
    CLASSICAL_CONSTANT,
    CLASSICAL_GAUSSIAN,
    CLASSICAL_KINDS,
    CLASSICAL_SINUSOIDAL,
    SIDECAR_SUFFIX,
    SIM_PRNG_ALGORITHM,
)
from src.entropy.model import SourceModel, quantum_variance

DEFAULT_DRIFT_PERIOD = 1000.0


@dataclass(frozen=True)
class SimConfig:
    """
    Attributes:
        model (SourceModel): physical source and converter.
        classical_kind (str): gaussian, sinusoidal-drift or constant.
        prng_seed (int): 64-bit seed of the generator.
        n_samples (int): number of ADC samples.
        drift_period (float): sinusoid period in samples (sinusoidal-drift only).
        drift_phase (float): sinusoid phase in radians.
        constant_level (float): classical offset in volts (constant only).
    """

    model: SourceModel
    classical_kind: str = CLASSICAL_GAUSSIAN
    prng_seed: int = 0
    n_samples: int = 1 << 20
    drift_period: float = DEFAULT_DRIFT_PERIOD
    drift_phase: float = 0.0
    constant_level: float = 0.0
    algorithm: str = field(default=SIM_PRNG_ALGORITHM, init=False)

    def __post_init__(self) -> None:
        if self.classical_kind not in CLASSICAL_KINDS:
            raise ContractError(f"classical_kind must be one of {CLASSICAL_KINDS}, got {self.classical_kind!r}")
        if not 0 <= self.prng_seed < (1 << 64):
            raise ContractError(f"prng_seed must be a 64-bit unsigned value, got {self.prng_seed}")
        if self.n_samples < 0:
            raise ContractError(f"n_samples must be >= 0, got {self.n_samples}")
        if not self.drift_period > 0:
            raise ContractError(f"drift_period must be positive, got {self.drift_period}")

    @property
    def classical_variance(self) -> float:
        """sigma2_total / (1 + gamma): the share the entropy model attributes to classical noise."""
        return self.model.sigma2_total / (1.0 + self.model.gamma)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["model"] = self.model.as_dict()
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SimConfig":
        data = dict(data)
        data.pop("algorithm", None)
        model = SourceModel(**data.pop("model"))
        return cls(model=model, **data)


def _gaussian(rng: np.random.Generator, size: int, variance: float) -> np.ndarray:
    """Inverse-CDF Gaussian draws."""
    u = rng.random(size)
    u = np.maximum(u, np.finfo(np.float64).tiny)
    return ndtri(u) * math.sqrt(variance)


def _classical(config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    n = config.n_samples
    if config.classical_kind == CLASSICAL_GAUSSIAN:
        return _gaussian(rng, n, config.classical_variance)
    if config.classical_kind == CLASSICAL_SINUSOIDAL:
        amplitude = math.sqrt(2.0 * config.classical_variance)
        t = np.arange(n, dtype=np.float64)
        return amplitude * np.sin(2.0 * math.pi * t / config.drift_period + config.drift_phase)
    if config.classical_kind == CLASSICAL_CONSTANT:
        return np.full(n, config.constant_level, dtype=np.float64)
    raise ContractError(f"unknown classical noise kind {config.classical_kind!r}")


def quantize(volts: np.ndarray, model: SourceModel) -> np.ndarray:
    """Evenly spaced ADC: code = floor((v - adc_min) / width), saturating at both ends."""
    codes = np.floor((volts - model.adc_min) / model.bin_width)
    return np.clip(codes, 0, model.codes - 1).astype(np.uint16)


def generate(config: SimConfig) -> np.ndarray:
    """ADC codes (uint16) for `config`; identical seeds give identical sequences."""
    quantum_seq, classical_seq = np.random.SeedSequence(config.prng_seed).spawn(2)
    quantum_rng = np.random.Generator(np.random.Philox(quantum_seq))
    classical_rng = np.random.Generator(np.random.Philox(classical_seq))

    quantum = _gaussian(quantum_rng, config.n_samples, quantum_variance(config.model))
    volts = quantum + _classical(config, classical_rng) + config.model.mean
    codes = quantize(volts, config.model)
    logger.info(
        f"Simulated {config.n_samples} samples ({config.classical_kind} classical noise, "
        f"{config.model.adc_bits}-bit ADC, seed={config.prng_seed})"
    )
    return codes


def _sample_dtype(adc_bits: int) -> np.dtype:
    if not 1 <= adc_bits <= 16:
        raise ContractError(f"adc_bits must lie in 1..16, got {adc_bits}")
    return np.dtype(np.uint8) if adc_bits <= 8 else np.dtype("<u2")


def write_samples(codes: np.ndarray, path: str, config: SimConfig) -> None:
    """One byte per sample up to 8 ADC bits, else two bytes little-endian; JSON sidecar alongside."""
    dtype = _sample_dtype(config.model.adc_bits)
    ensure_parent_directory(path)
    try:
        with open(path, "wb") as file:
            file.write(np.asarray(codes).astype(dtype).tobytes())
    except OSError as e:
        raise ToolkitIOError(f"cannot write samples to {path}: {e}") from e
    sidecar = config.to_dict()
    sidecar["n_samples"] = int(np.asarray(codes).size)
    save_json(path + SIDECAR_SUFFIX, sidecar)
    logger.info(f"Wrote {np.asarray(codes).size} samples to {path}")


def read_sidecar(path: str) -> SimConfig:
    """SimConfig recorded next to a sample file."""
    sidecar = path + SIDECAR_SUFFIX
    if not os.path.exists(sidecar):
        raise FormatError(f"{path}: no sidecar {sidecar}")
    try:
        return SimConfig.from_dict(load_json(sidecar))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{sidecar}: malformed sidecar: {e}") from e


def read_samples(path: str, adc_bits: Optional[int] = None) -> np.ndarray:
    """
    Load a sample file; without `adc_bits` the resolution comes from the JSON sidecar.
    """
    if adc_bits is None:
        adc_bits = read_sidecar(path).model.adc_bits
    dtype = _sample_dtype(adc_bits)
    try:
        with open(path, "rb") as file:
            data = file.read()
    except OSError as e:
        raise ToolkitIOError(f"cannot read samples from {path}: {e}") from e
    if len(data) % dtype.itemsize:
        raise FormatError(f"{path}: {len(data)} bytes is not a whole number of {dtype.itemsize}-byte samples")
    codes = np.frombuffer(data, dtype=dtype).astype(np.uint16)
    if codes.size and int(codes.max()) >> adc_bits:
        raise FormatError(f"{path}: sample value exceeds {adc_bits} bits")
    return codes
