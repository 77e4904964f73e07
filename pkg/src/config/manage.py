from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.common.errors import ContractError, ToolkitIOError
from src.common.io import ensure_parent_directory
from src.common.logging import logger
from src.constants import (
    CLASSICAL_GAUSSIAN,
    DEFAULT_ALPHA,
    DEFAULT_MAX_LAG,
    FORMAT_NATIVE,
    TOEPLITZ,
    TOEPLITZ_DEFAULT_EPS_LOG2,
    TOEPLITZ_DEFAULT_INPUT_BITS,
    TREVISAN_DEFAULT_INPUT_BITS,
    TREVISAN_DEFAULT_OUTPUT_BITS,
    TREVISAN_DEFAULT_RS_DEGREE,
)


class PipelineConfig(BaseModel):
    """
    Every knob of the postprocessing pipeline. Field constraints mirror the domain
    invariants, so an invalid file fails before any stage runs.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    # Source model (volts). gamma=10 and sigma2_total=0.1155 give about 6.7 bits per 8-bit sample.
    gamma: float = Field(10.0, gt=0)
    sigma2_total: float = Field(0.1155, gt=0)
    mean: float = 0.0
    adc_bits: int = Field(8, ge=1, le=16)
    adc_min: float = -1.0
    adc_max: float = 1.0

    # Simulator
    classical_kind: Literal["gaussian", "sinusoidal-drift", "constant"] = CLASSICAL_GAUSSIAN
    prng_seed: int = Field(20120101, ge=0, lt=1 << 64)
    n_samples: int = Field(1 << 20, ge=0)
    drift_period: float = Field(1000.0, gt=0)
    drift_phase: float = 0.0
    constant_level: float = 0.0

    # Extraction
    extractor: Literal["toeplitz", "trevisan"] = TOEPLITZ
    min_entropy_per_sample: Optional[float] = Field(None, ge=0)
    k: Optional[float] = Field(None, gt=0)
    toeplitz_eps_log2: float = Field(TOEPLITZ_DEFAULT_EPS_LOG2, le=0)
    trevisan_eps_log2: Optional[float] = Field(None, le=0)
    toeplitz_n: int = Field(TOEPLITZ_DEFAULT_INPUT_BITS, gt=0)
    trevisan_ni: int = Field(TREVISAN_DEFAULT_INPUT_BITS, gt=1)
    trevisan_nf: int = Field(TREVISAN_DEFAULT_OUTPUT_BITS, gt=0)
    trevisan_m_e: int = Field(TREVISAN_DEFAULT_RS_DEGREE, ge=1, le=128)
    blocks: Optional[int] = Field(None, ge=1)
    threads: int = Field(1, ge=1)
    accelerated: bool = True

    # Testing
    alpha: float = Field(DEFAULT_ALPHA, gt=0, lt=0.5)
    sequences: int = Field(1, ge=1)
    max_lag: int = Field(DEFAULT_MAX_LAG, ge=1)

    # Files
    format: Literal["native", "raw"] = FORMAT_NATIVE
    samples_path: str = "data/raw_samples.bin"
    seed_path: str = "data/seed.bin"
    output_path: str = "data/extracted.bin"

    @model_validator(mode="after")
    def _check_ranges(self) -> "PipelineConfig":
        if not self.adc_min < self.adc_max:
            raise ValueError(f"adc_min ({self.adc_min}) must be below adc_max ({self.adc_max})")
        if self.min_entropy_per_sample is not None and self.min_entropy_per_sample > self.adc_bits:
            raise ValueError(f"min_entropy_per_sample exceeds adc_bits={self.adc_bits}")
        return self

    def canonical(self) -> str:
        return ConfigManager.dump(self)


class ConfigManager:
    """
    Loads a flat YAML mapping into a PipelineConfig and applies overrides on top.

    Precedence: defaults < file < overrides (CLI flags).
    """

    def __init__(self, config_path: Optional[str] = None) -> None:
        self.config_path = config_path
        self.values = self._load_yaml(config_path) if config_path else {}

    @staticmethod
    def _load_yaml(filename: str) -> Dict[str, Any]:
        try:
            with open(filename, "r") as file:
                data = yaml.safe_load(file)
        except FileNotFoundError as e:
            logger.error(f"Configuration file not found: {filename}")
            raise ToolkitIOError(f"configuration file not found: {filename}") from e
        except yaml.YAMLError as e:
            logger.error(f"Error parsing YAML file '{filename}': {e}")
            raise ContractError(f"configuration file {filename} is not valid YAML: {e}") from e

        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ContractError(f"configuration file {filename} must hold a flat key: value mapping")
        nested = sorted(key for key, value in data.items() if isinstance(value, (dict, list)))
        if nested:
            raise ContractError(f"configuration keys must be scalars; nested values under {nested}")
        return data

    def build(self, overrides: Optional[Dict[str, Any]] = None) -> PipelineConfig:
        """Validate file values with the non-None overrides applied."""
        merged = dict(self.values)
        merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
        try:
            config = PipelineConfig(**merged)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
            )
            raise ContractError(f"invalid configuration: {problems}") from e
        logger.info(f"Configuration resolved from {self.config_path or 'defaults'} with {len(merged)} explicit key(s)")
        return config

    @staticmethod
    def dump(config: PipelineConfig) -> str:
        """Canonical text: every field, keys sorted; re-parsing and dumping again is byte-identical."""
        return yaml.safe_dump(config.model_dump(), sort_keys=True, default_flow_style=False)

    @staticmethod
    def parse(text: str) -> PipelineConfig:
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise ContractError("configuration text must hold a flat key: value mapping")
        try:
            return PipelineConfig(**data)
        except ValidationError as e:
            raise ContractError(f"invalid configuration: {e}") from e

    @staticmethod
    def save(config: PipelineConfig, path: str) -> None:
        ensure_parent_directory(path)
        try:
            with open(path, "w") as file:
                file.write(ConfigManager.dump(config))
        except OSError as e:
            logger.error(f"Error saving configuration: {e}")
            raise ToolkitIOError(f"cannot write configuration to {path}: {e}") from e
