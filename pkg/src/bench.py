"""
Throughput and GF-operation profiles for both extractors.
"""

import platform
import time
from typing import Any, Dict, List, Sequence

import numpy as np
import psutil
from tqdm import tqdm

from src.bits.bitvector import BitVector
from src.common.errors import ContractError
from src.common.logging import logger
from src.constants import BENCH_DEFAULT_TOEPLITZ_BLOCKS, BENCH_DEFAULT_TREVISAN_NF, TREVISAN_DEFAULT_RS_DEGREE
from src.extractors.toeplitz import extract_fast
from src.extractors.trevisan import TrevisanParams, build_design, extract, theoretical_gf_ops
from src.fields.gf2m import GFOpCounter

BENCH_PRNG_SEED = 0x5EED


def host_profile() -> Dict[str, Any]:
    """Hardware and interpreter facts that throughput numbers depend on."""
    memory = psutil.virtual_memory()
    return {
        "cpu_count": psutil.cpu_count(logical=True),
        "cpu_count_physical": psutil.cpu_count(logical=False),
        "memory_bytes": int(memory.total),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "platform": platform.platform(aliased=True),
    }


def bench_toeplitz(n: int, m: int, blocks: int = BENCH_DEFAULT_TOEPLITZ_BLOCKS) -> Dict[str, Any]:
    """Hash `blocks` random n-bit blocks with one random seed; throughput counts output bits."""
    if blocks < 1:
        raise ContractError(f"blocks must be >= 1, got {blocks}")
    rng = np.random.Generator(np.random.Philox(BENCH_PRNG_SEED))
    seed = BitVector.random(n + m - 1, rng)
    inputs = [BitVector.random(n, rng) for _ in range(blocks)]

    start = time.perf_counter()
    for block in inputs:
        extract_fast(seed, block, m)
    seconds = time.perf_counter() - start

    row = {
        "n": n,
        "m": m,
        "blocks": blocks,
        "seconds": seconds,
        "bits_per_second": blocks * m / seconds if seconds > 0 else float("inf"),
    }
    logger.info(f"Toeplitz {n}x{m}: {blocks} blocks in {seconds:.3f} s ({row['bits_per_second']:.0f} bit/s)")
    return row


def bench_trevisan(
    n_f_values: Sequence[int] = BENCH_DEFAULT_TREVISAN_NF,
    m_e: int = TREVISAN_DEFAULT_RS_DEGREE,
    threads: int = 1,
    progress: bool = False,
) -> List[Dict[str, Any]]:
    """
    One extraction per output length with n_i = 2 * n_f, counting the field operations
    actually performed against the per-bit evaluation count.
    """
    rows = []
    rng = np.random.Generator(np.random.Philox(BENCH_PRNG_SEED))
    for n_f in tqdm(list(n_f_values), desc="trevisan", unit="n_f", disable=not progress):
        params = TrevisanParams.from_degrees(2 * n_f, n_f, m_e=m_e)
        design = build_design(params)
        message = BitVector.random(params.n_i, rng)
        seed = BitVector.random(params.d, rng)
        counter = GFOpCounter()

        start = time.perf_counter()
        extract(message, seed, params, design, threads=threads, counter=counter)
        seconds = time.perf_counter() - start

        counted = counter.multiplications
        rows.append(
            {
                "n_f": n_f,
                "n_i": params.n_i,
                "m_e": params.m_e,
                "counted_gf_ops": counted,
                "theoretical_gf_ops": theoretical_gf_ops(params),
                "ops_per_output_bit": counted / n_f,
                "seconds": seconds,
                "bits_per_second": n_f / seconds if seconds > 0 else float("inf"),
            }
        )
        logger.info(f"Trevisan n_f={n_f}: {counted} GF multiplications, {seconds:.3f} s")
    return rows
