#!/usr/bin/env python3
"""
rxkit command line: simulate -> entropy -> params -> extract -> test -> bench.

Every command prints JSON on stdout. Failures print one line on stderr,
`error=<CODE> exit=<n> message=...`, and exit with the code of the error class.
"""

import functools
import logging
import sys
from typing import Any, Callable, Dict, Optional

import click

from src.bench import bench_toeplitz, bench_trevisan, host_profile
from src.bits.io import write_bits
from src.common.errors import ToolkitError, ToolkitIOError
from src.common.io import dump_json
from src.common.logging import logger, set_console_level
from src.config.manage import ConfigManager, PipelineConfig
from src.constants import BIT_FORMATS, DEFAULT_CONFIG_FILE, TOEPLITZ, TOOLKIT_NAME, TOOLKIT_VERSION, TREVISAN
from src.pipeline import PostprocessingPipeline
from src.stattests.battery import export_raw


def emit(data: Dict[str, Any]) -> None:
    click.echo(dump_json(data))


def fail(error: ToolkitError) -> None:
    click.echo(error.one_line(), err=True)
    sys.exit(error.exit_code)


def handle_errors(command: Callable) -> Callable:
    """Map toolkit and OS failures to their exit codes with a single-line message."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ToolkitError as e:
            logger.error(f"{command.__name__} failed: {e.message}")
            fail(e)
        except OSError as e:
            logger.error(f"{command.__name__} failed: {e}")
            fail(ToolkitIOError(str(e)))

    return wrapper


def resolve_config(ctx: click.Context, **overrides: Any) -> PipelineConfig:
    """Config file from the group, then command flags on top."""
    settings = ctx.obj
    merged = dict(settings["overrides"])
    eps_log2 = overrides.pop("eps_log2", None)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    if eps_log2 is not None:
        extractor = merged.get("extractor") or settings["manager"].values.get("extractor", TOEPLITZ)
        merged["toeplitz_eps_log2" if extractor == TOEPLITZ else "trevisan_eps_log2"] = eps_log2
    return settings["manager"].build(merged)


def extractor_options(command: Callable) -> Callable:
    """Flags shared by every command that sizes an extractor."""
    options = [
        click.option("--toeplitz", "extractor", flag_value=TOEPLITZ, default=None, help="Use the Toeplitz extractor."),
        click.option("--trevisan", "extractor", flag_value=TREVISAN, help="Use the Trevisan extractor."),
        click.option("--k", type=float, default=None, help="Min-entropy of one input block, in bits."),
        click.option("--eps-log2", type=float, default=None, help="log2 of the target error of the chosen extractor."),
        click.option("--ni", "trevisan_ni", type=int, default=None, help="Trevisan input length (power of two)."),
        click.option("--nf", "trevisan_nf", type=int, default=None, help="Trevisan output length (power of two)."),
        click.option("--blocks", type=int, default=None, help="Maximum number of input blocks."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


@click.group()
@click.version_option(TOOLKIT_VERSION, prog_name=TOOLKIT_NAME)
@click.option("--config", "config_path", default=None, help=f"Flat YAML configuration (e.g. {DEFAULT_CONFIG_FILE}).")
@click.option("--threads", type=int, default=None, help="Worker threads; never changes output bytes.")
@click.option("--format", "fmt", type=click.Choice(BIT_FORMATS), default=None, help="Bit-file format.")
@click.option("--alpha", type=float, default=None, help="Significance level of the statistical tests.")
@click.option("--quiet", is_flag=True, help="Only log warnings and errors.")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    threads: Optional[int],
    fmt: Optional[str],
    alpha: Optional[float],
    quiet: bool,
):
    """QRNG postprocessing toolkit."""
    if quiet:
        set_console_level(logging.WARNING)
    try:
        manager = ConfigManager(config_path)
    except ToolkitError as e:
        fail(e)
    ctx.obj = {"manager": manager, "overrides": {"threads": threads, "format": fmt, "alpha": alpha}}


@cli.command()
@click.option("--out", "out_path", default=None, help="Sample file to write (JSON sidecar alongside).")
@click.option("--samples", "n_samples", type=int, default=None, help="Number of ADC samples.")
@click.option("--prng-seed", type=int, default=None, help="64-bit simulator seed.")
@click.option(
    "--classical",
    "classical_kind",
    type=click.Choice(["gaussian", "sinusoidal-drift", "constant"]),
    default=None,
    help="Classical noise kind.",
)
@click.pass_context
@handle_errors
def simulate(ctx, out_path, n_samples, prng_seed, classical_kind):
    """Write simulated raw ADC samples."""
    config = resolve_config(ctx, n_samples=n_samples, prng_seed=prng_seed, classical_kind=classical_kind)
    pipeline = PostprocessingPipeline(config)
    out_path = out_path or config.samples_path
    codes = pipeline.simulate(out_path)
    emit({"path": out_path, "samples": int(codes.size), "sim": pipeline.sim_config(int(codes.size)).to_dict()})


@cli.command()
@click.option("--length", "n_bits", type=int, default=None, help="Input block length for the certified k.")
@click.option("--bins", is_flag=True, help="Include the per-code probabilities.")
@extractor_options
@click.pass_context
@handle_errors
def entropy(ctx, n_bits, bins, **options):
    """Model min-entropy per sample and the certified k of one block."""
    config = resolve_config(ctx, **options)
    pipeline = PostprocessingPipeline(config)
    if n_bits is None:
        n_bits = config.toeplitz_n if config.extractor == TOEPLITZ else config.trevisan_ni
    report = pipeline.entropy_report().to_dict(include_bins=bins)
    report["block_bits"] = n_bits
    report["certified_k"] = pipeline.block_min_entropy(n_bits)
    emit(report)


@cli.command()
@extractor_options
@click.pass_context
@handle_errors
def params(ctx, **options):
    """Solve extractor parameters and report sizing warnings."""
    config = resolve_config(ctx, **options)
    emit(PostprocessingPipeline(config).params_report())


@cli.command()
@click.option("--out", "out_path", default=None, help="Seed file to write.")
@click.option("--prng-seed", type=int, default=None, help="Seed of the pseudorandom generator.")
@extractor_options
@click.pass_context
@handle_errors
def seed(ctx, out_path, prng_seed, **options):
    """Write a pseudorandom seed of the length the extractor needs."""
    config = resolve_config(ctx, **options)
    out_path = out_path or config.seed_path
    bits = PostprocessingPipeline(config).make_seed(prng_seed)
    write_bits(bits, out_path)
    emit({"path": out_path, "bits": bits.length_bits, "extractor": config.extractor})


@cli.command()
@click.option("--in", "in_path", default=None, help="Sample file or bit file to extract from.")
@click.option("--out", "out_path", default=None, help="Output bit file; the manifest goes alongside.")
@click.option("--seed-file", default=None, help="Native bit file holding the seed.")
@click.option("--progress", is_flag=True, help="Show a progress bar.")
@extractor_options
@click.pass_context
@handle_errors
def extract(ctx, in_path, out_path, seed_file, progress, **options):
    """Run the chosen extractor and write output plus provenance manifest."""
    config = resolve_config(ctx, **options)
    in_path = in_path or config.samples_path
    out_path = out_path or config.output_path
    result = PostprocessingPipeline(config).extract(in_path, seed_file or config.seed_path, out_path, progress=progress)
    emit({"output": out_path, **result.as_dict()})


@cli.command()
@click.option("--in", "in_path", required=True, help="Bit file or sample file to test.")
@click.option("--sequences", type=int, default=None, help="Split into sequences and apply the proportion rule.")
@click.option("--expect", type=click.Choice(["pass", "fail"]), default=None, help="Exit 4 if the outcome differs.")
@click.pass_context
@handle_errors
def test(ctx, in_path, sequences, expect):
    """Run the statistical battery."""
    pipeline = PostprocessingPipeline(resolve_config(ctx, sequences=sequences))
    bits = pipeline.load_input(in_path)
    outcome = pipeline.test(bits, expect=expect)
    emit({"path": in_path, "bits": bits.length_bits, **outcome.to_dict()})


@cli.command()
@click.option("--in", "in_path", required=True, help="Bit file or sample file.")
@click.option("--mode", type=click.Choice(["bits", "samples"]), default="bits", help="Correlate bits or raw codes.")
@click.option("--max-lag", type=int, default=None, help="Largest lag to compute.")
@click.pass_context
@handle_errors
def autocorr(ctx, in_path, mode, max_lag):
    """Autocorrelation coefficients against the 1/sqrt(N) scale."""
    pipeline = PostprocessingPipeline(resolve_config(ctx, max_lag=max_lag))
    report = pipeline.autocorr(in_path, mode)
    data = report.to_dict()
    data["within_3_sigma"] = report.within_bound()
    emit(data)


@cli.command()
@click.option("--in", "in_path", required=True, help="Bit file or sample file.")
@click.option("--out", "out_path", required=True, help="Raw byte file for external test suites.")
@click.pass_context
@handle_errors
def export(ctx, in_path, out_path):
    """Write a bitstream as raw bytes for external test batteries."""
    pipeline = PostprocessingPipeline(resolve_config(ctx))
    bits = pipeline.load_input(in_path)
    export_raw(bits, out_path)
    emit({"path": out_path, "bits": bits.length_bits, "bytes": bits.length_bits // 8})


@cli.command()
@click.option("--toeplitz-blocks", type=int, default=None, help="Blocks hashed in the Toeplitz run.")
@click.option("--bench-nf", "bench_nf", type=int, multiple=True, help="Trevisan output lengths (repeatable).")
@click.option("--skip-trevisan", is_flag=True, help="Only benchmark Toeplitz.")
@extractor_options
@click.pass_context
@handle_errors
def bench(ctx, toeplitz_blocks, bench_nf, skip_trevisan, **options):
    """Throughput and GF-operation counts."""
    config = resolve_config(ctx, **options)
    toeplitz = PostprocessingPipeline(config.model_copy(update={"extractor": TOEPLITZ})).params()
    report: Dict[str, Any] = {"host": host_profile()}
    kwargs = {"blocks": toeplitz_blocks} if toeplitz_blocks else {}
    report["toeplitz"] = bench_toeplitz(toeplitz.n, toeplitz.m, **kwargs)
    if not skip_trevisan:
        kwargs = {"n_f_values": bench_nf} if bench_nf else {}
        report["trevisan"] = bench_trevisan(m_e=config.trevisan_m_e, threads=config.threads, **kwargs)
    emit(report)


@cli.command(name="config")
@click.pass_context
@handle_errors
def show_config(ctx):
    """Print the canonical merged configuration."""
    click.echo(resolve_config(ctx).canonical(), nl=False)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
