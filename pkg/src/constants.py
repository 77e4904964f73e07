"""
Constants for the QRNG postprocessing toolkit.
Centralizes file formats, physical constants, default extractor sizes and test thresholds.
"""

# Toolkit identity
TOOLKIT_NAME = "rxkit"
TOOLKIT_VERSION = "0.3.0"

# Native bit file: magic, then unsigned 64-bit little-endian bit count, then payload
BITFILE_MAGIC = b"RXBV"
BITFILE_LENGTH_BYTES = 8
FORMAT_NATIVE = "native"
FORMAT_RAW = "raw"
BIT_FORMATS = (FORMAT_NATIVE, FORMAT_RAW)

# Exit codes
EXIT_CONTRACT = 2
EXIT_IO = 3
EXIT_STATISTICAL = 4

# File Paths
LOGS_DIR = "logs"
DEFAULT_CONFIG_FILE = "config/pipeline.yml"
SIDECAR_SUFFIX = ".json"
MANIFEST_SUFFIX = ".manifest.json"

# Physics
REFERENCE_MIN_ENTROPY_PER_SAMPLE = 6.7  # bits per 8-bit raw sample of the reference source

# Extractor names
TOEPLITZ = "toeplitz"
TREVISAN = "trevisan"
EXTRACTOR_NAMES = (TOEPLITZ, TREVISAN)

# Toeplitz defaults (4096-bit blocks at 6.7 bits/sample, eps = 2^-100)
TOEPLITZ_DEFAULT_INPUT_BITS = 4096
TOEPLITZ_DEFAULT_EPS_LOG2 = -100.0

# Trevisan defaults (speed-demo parameter set)
TREVISAN_DEFAULT_INPUT_BITS = 1 << 15
TREVISAN_DEFAULT_OUTPUT_BITS = 1 << 14
TREVISAN_DEFAULT_RS_DEGREE = 128
TREVISAN_MAX_RS_DEGREE = 128
TREVISAN_BATCH_LANES = 2048

# GF(2^m)
GF_MAX_DEGREE = 128
GF_BRUTE_FORCE_MAX_DEGREE = 16

# Statistical tests
DEFAULT_ALPHA = 0.01
MONOBIT_MIN_BITS = 100
BLOCK_FREQUENCY_MIN_BITS = 100
BLOCK_FREQUENCY_DEFAULT_BLOCK = 128
RUNS_MIN_BITS = 100
CUSUM_MIN_BITS = 100
LONGEST_RUN_MIN_BITS = 128
CHI_SQUARE_MIN_BYTES = 256 * 5
DEFAULT_MAX_LAG = 100

# Simulator
SIM_PRNG_ALGORITHM = "numpy.random.Philox"
CLASSICAL_GAUSSIAN = "gaussian"
CLASSICAL_SINUSOIDAL = "sinusoidal-drift"
CLASSICAL_CONSTANT = "constant"
CLASSICAL_KINDS = (CLASSICAL_GAUSSIAN, CLASSICAL_SINUSOIDAL, CLASSICAL_CONSTANT)

# Bench
BENCH_DEFAULT_TOEPLITZ_BLOCKS = 64
BENCH_DEFAULT_TREVISAN_NF = (1 << 10, 1 << 11, 1 << 12)
