import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src.bits.bitvector import BitVector, samples_to_bits
from src.bits.io import read_bits, write_bits
from src.common.errors import ContractError, StatisticalFailure
from src.common.io import sha256_bytes, sha256_file
from src.common.logging import logger
from src.config.manage import PipelineConfig
from src.constants import MANIFEST_SUFFIX, SIDECAR_SUFFIX, TOEPLITZ
from src.entropy.model import EntropyReport, SourceModel, certified_min_entropy, evaluate
from src.extractors.extractor import ExtractionResult, Extractor, log2_sum_of_copies
from src.extractors.toeplitz import ToeplitzExtractor, ToeplitzParams
from src.extractors.trevisan import TrevisanExtractor, TrevisanParams, solve_params
from src.provenance.manage import ManifestManager
from src.source.simulator import SimConfig, generate, read_samples, read_sidecar, write_samples
from src.stattests.autocorr import AutocorrReport, autocorrelation
from src.stattests.battery import TestReport, battery_passed, multi_sequence, run_battery

ExtractorParams = Union[ToeplitzParams, TrevisanParams]


def _file_entry(path: str, bits: int) -> Dict[str, Any]:
    return {"path": os.path.basename(path), "sha256": sha256_file(path), "bits": bits}


@dataclass(frozen=True)
class TestOutcome:
    """Battery results for one bitstream, single- or multi-sequence."""

    __test__ = False

    reports: List[TestReport]
    sequences: List[Dict[str, Any]]
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "tests": [r.to_dict() for r in self.reports],
            "sequences": self.sequences,
        }


class PostprocessingPipeline:
    """
    Simulate -> model entropy -> size an extractor -> extract -> test, driven by one
    PipelineConfig.
    """

    def __init__(self, config: PipelineConfig) -> None:
        self.config = config
        self._entropy: Optional[EntropyReport] = None
        logger.info(f"Postprocessing pipeline initialized ({config.extractor} extractor, threads={config.threads})")

    # ------------------------------------------------------------------ source and entropy

    def source_model(self) -> SourceModel:
        c = self.config
        return SourceModel(
            gamma=c.gamma,
            sigma2_total=c.sigma2_total,
            mean=c.mean,
            adc_bits=c.adc_bits,
            adc_min=c.adc_min,
            adc_max=c.adc_max,
        )

    def sim_config(self, n_samples: Optional[int] = None) -> SimConfig:
        c = self.config
        return SimConfig(
            model=self.source_model(),
            classical_kind=c.classical_kind,
            prng_seed=c.prng_seed,
            n_samples=c.n_samples if n_samples is None else n_samples,
            drift_period=c.drift_period,
            drift_phase=c.drift_phase,
            constant_level=c.constant_level,
        )

    def simulate(self, out_path: str, n_samples: Optional[int] = None) -> np.ndarray:
        sim = self.sim_config(n_samples)
        codes = generate(sim)
        write_samples(codes, out_path, sim)
        return codes

    def entropy_report(self) -> EntropyReport:
        if self._entropy is None:
            self._entropy = evaluate(self.source_model())
        return self._entropy

    def per_sample_min_entropy(self) -> float:
        """Configured override, else the modelled min-entropy per sample."""
        if self.config.min_entropy_per_sample is not None:
            return self.config.min_entropy_per_sample
        return self.entropy_report().min_entropy_bits

    def block_min_entropy(self, n_bits: int) -> float:
        """k for an n-bit input block: explicit k, else per-sample min-entropy times samples."""
        if self.config.k is not None:
            return self.config.k
        return certified_min_entropy(self.per_sample_min_entropy(), n_bits, self.config.adc_bits)

    # ------------------------------------------------------------------ parameters

    def params(self) -> ExtractorParams:
        c = self.config
        if c.extractor == TOEPLITZ:
            params = ToeplitzParams.from_entropy(c.toeplitz_n, self.block_min_entropy(c.toeplitz_n), c.toeplitz_eps_log2)
            logger.info(
                f"Toeplitz params: n={params.n}, m={params.m}, k={params.k:.2f}, log2(eps)={params.epsilon_log2:.2f}"
            )
            return params
        return solve_params(
            c.trevisan_ni,
            c.trevisan_nf,
            epsilon_log2=c.trevisan_eps_log2,
            k=self.block_min_entropy(c.trevisan_ni),
            m_e=c.trevisan_m_e,
        )

    def params_report(self) -> Dict[str, Any]:
        """Parameters, seed length and every sizing warning, ready for JSON."""
        params = self.params()
        report = params.as_dict()
        warnings = params.warnings() if isinstance(params, TrevisanParams) else []
        if self.config.blocks:
            total = log2_sum_of_copies(params.epsilon_log2, self.config.blocks)
            report["blocks"] = self.config.blocks
            report["epsilon_log2_total"] = total
            warnings.append(f"security budget over {self.config.blocks} blocks: log2(eps_total) = {total:.3f}")
        report["warnings"] = warnings
        return report

    def build_extractor(self, seed: BitVector, params: Optional[ExtractorParams] = None) -> Extractor:
        params = params or self.params()
        if isinstance(params, ToeplitzParams):
            return ToeplitzExtractor(params, seed, threads=self.config.threads, accelerated=self.config.accelerated)
        return TrevisanExtractor(params, seed, threads=self.config.threads)

    def make_seed(self, prng_seed: Optional[int] = None) -> BitVector:
        """
        Pseudorandom seed of the length the configured extractor needs. True seed
        randomness is the operator's responsibility.
        """
        params = self.params()
        bits = params.seed_bits
        value = self.config.prng_seed if prng_seed is None else prng_seed
        rng = np.random.Generator(np.random.Philox(value))
        logger.warning(f"Generating a {bits}-bit PSEUDOrandom seed; use a true random seed in production")
        return BitVector.random(bits, rng)

    # ------------------------------------------------------------------ data

    def load_input(self, path: str) -> BitVector:
        """
        Sample files (recognised by their JSON sidecar) become bits at adc_bits per sample,
        MSB-first; anything else is read as a bit file in the configured format.
        """
        if os.path.exists(path + SIDECAR_SUFFIX):
            adc_bits = read_sidecar(path).model.adc_bits
            codes = read_samples(path, adc_bits)
            bits = samples_to_bits(codes, adc_bits)
            logger.info(f"Loaded {codes.size} samples from {path} as {bits.length_bits} bits")
            return bits
        return read_bits(path, self.config.format)

    def load_series(self, path: str, mode: str) -> np.ndarray:
        """Values for autocorrelation: 0/1 bits, or raw sample codes."""
        if mode == "samples":
            if not os.path.exists(path + SIDECAR_SUFFIX):
                raise ContractError(f"{path} has no sample sidecar; sample-mode autocorrelation needs a sample file")
            return read_samples(path).astype(np.float64)
        return self.load_input(path).to_numpy()

    # ------------------------------------------------------------------ extraction

    def extract(
        self,
        input_path: str,
        seed_path: str,
        output_path: str,
        manifest_path: Optional[str] = None,
        progress: bool = False,
    ) -> ExtractionResult:
        """
        Run the configured extractor over the block-partitioned input, then write the
        output and its provenance manifest.
        """
        data = self.load_input(input_path)
        seed = read_bits(seed_path)
        params = self.params()
        extractor = self.build_extractor(seed, params)
        result = extractor.extract_stream(data, max_blocks=self.config.blocks, progress=progress)
        write_bits(result.output, output_path, self.config.format)

        manifest = ManifestManager()
        manifest.add_entry("extractor", extractor.name)
        manifest.add_entry("params", params.as_dict())
        manifest.add_entry("input", _file_entry(input_path, data.length_bits))
        manifest.add_entry("seed", _file_entry(seed_path, seed.length_bits))
        manifest.add_entry("block_policy", result.as_dict())
        manifest.add_entry(
            "output",
            {
                "path": os.path.basename(output_path),
                "format": self.config.format,
                "bits": result.output.length_bits,
                "sha256": sha256_bytes(result.output.payload),
            },
        )
        if isinstance(params, TrevisanParams):
            for warning in params.warnings():
                manifest.add_warning(warning)
        if result.zero_blocks:
            manifest.add_warning(
                f"degenerate input: {result.zero_blocks} all-zero block(s) map to all-zero output "
                "under a linear extractor"
            )
        if result.leftover_bits:
            manifest.add_warning(f"{result.leftover_bits} trailing input bits did not fill a block and were dropped")
        manifest.save(manifest_path or output_path + MANIFEST_SUFFIX)
        return result

    # ------------------------------------------------------------------ testing

    def test(self, bits: BitVector, sequences: Optional[int] = None, expect: Optional[str] = None) -> TestOutcome:
        """
        Battery on the whole stream, or the multi-sequence proportion rule when
        sequences > 1. With `expect`, an outcome contradicting it raises StatisticalFailure.
        """
        sequences = sequences or self.config.sequences
        alpha = self.config.alpha
        if sequences > 1:
            summary = multi_sequence(bits, sequences, alpha, self.config.threads)
            passed = all(row["proportion_passed"] for row in summary)
            outcome = TestOutcome(reports=[], sequences=summary, passed=passed)
        else:
            reports = run_battery(bits, alpha, self.config.threads)
            outcome = TestOutcome(reports=reports, sequences=[], passed=battery_passed(reports))

        if expect is not None:
            if expect not in ("pass", "fail"):
                raise ContractError(f"expected outcome must be 'pass' or 'fail', got {expect!r}")
            if outcome.passed != (expect == "pass"):
                verdict = "passed" if outcome.passed else "failed"
                raise StatisticalFailure(f"battery {verdict} but the expected outcome was {expect}")
        return outcome

    def autocorr(self, path: str, mode: str = "bits", max_lag: Optional[int] = None) -> AutocorrReport:
        if mode not in ("bits", "samples"):
            raise ContractError(f"autocorrelation mode must be bits or samples, got {mode!r}")
        return autocorrelation(self.load_series(path, mode), max_lag or self.config.max_lag)
