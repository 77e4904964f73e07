"""
Toeplitz-hashing strong extractor.

An m x n Toeplitz matrix is constant along every diagonal, so n + m - 1 seed bits fix it:

    T[i][j] = seed[i - j + n - 1]

The first row read right to left is seed[0 .. n-1]; the first column is seed[n-1 .. n+m-2].
Worked example with n = 3, m = 2 and seed a0 a1 a2 a3:

    | a2 a1 a0 |
    | a3 a2 a1 |

Seed 1011 with input 111 gives rows 101 and 110, so the output is 00.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from src.bits.bitvector import BitVector
from src.common.errors import ContractError, SizingError
from src.common.logging import logger
from src.constants import TOEPLITZ
from src.entropy.distance import statistical_distance
from src.extractors.extractor import Extractor
from src.fields.gf2m import clmul_windowed

ROUNDING_SLACK = 1e-9


def output_length(k: float, epsilon_log2: float) -> int:
    """
    Output length permitted by the leftover hash lemma: floor(k + 2 * log2(eps)).

    Raises:
        SizingError: when the result is not positive.
    """
    if epsilon_log2 > 0:
        raise SizingError(f"log2(eps) must be <= 0, got {epsilon_log2}")
    m = math.floor(k + 2 * epsilon_log2 + ROUNDING_SLACK)
    if m <= 0:
        raise SizingError(
            f"insufficient min-entropy: k={k} cannot absorb 2*log2(1/eps)={-2 * epsilon_log2} (m would be {m})"
        )
    return m


def epsilon_of(k: float, m: int) -> float:
    """log2 of eps = 2^((m - k) / 2) for an m-bit output from k bits of min-entropy."""
    if m > k + ROUNDING_SLACK:
        raise SizingError(f"output length {m} exceeds min-entropy {k}")
    return min(0.0, (m - k) / 2)


@dataclass(frozen=True)
class ToeplitzParams:
    """
    Sizing of one Toeplitz extraction block.

    Attributes:
        n (int): input bits per block.
        m (int): output bits per block.
        k (float): min-entropy of one input block; fractional values are allowed.
        epsilon_log2 (float): log2 of the security parameter actually achieved.
    """

    n: int
    m: int
    k: float
    epsilon_log2: float

    def __post_init__(self) -> None:
        if not 0 < self.m <= self.n:
            raise ContractError(f"Toeplitz output length must satisfy 0 < m <= n, got m={self.m}, n={self.n}")
        if self.epsilon_log2 > 0:
            raise ContractError(f"log2(eps) must be <= 0, got {self.epsilon_log2}")
        if self.m > self.k + 2 * self.epsilon_log2 + ROUNDING_SLACK:
            raise SizingError(
                f"m={self.m} exceeds k + 2*log2(eps) = {self.k + 2 * self.epsilon_log2:.3f}"
            )

    @classmethod
    def from_entropy(cls, n: int, k: float, epsilon_log2: float) -> "ToeplitzParams":
        """Size m for a target eps, then report the eps that m actually achieves."""
        if k > n:
            raise SizingError(f"min-entropy {k} exceeds the {n}-bit block length")
        m = output_length(k, epsilon_log2)
        return cls(n=n, m=m, k=k, epsilon_log2=epsilon_of(k, m))

    @property
    def seed_bits(self) -> int:
        return self.n + self.m - 1

    def as_dict(self) -> Dict[str, Any]:
        return {
            "extractor": TOEPLITZ,
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "epsilon_log2": self.epsilon_log2,
            "seed_bits": self.seed_bits,
        }


def _check_lengths(seed: BitVector, x: BitVector, m: int) -> int:
    n = x.length_bits
    if n <= 0 or m <= 0:
        raise ContractError(f"Toeplitz extraction needs n > 0 and m > 0, got n={n}, m={m}")
    if seed.length_bits != n + m - 1:
        raise ContractError(f"seed has {seed.length_bits} bits, an {m}x{n} Toeplitz matrix needs {n + m - 1}")
    return n


def toeplitz_matrix(seed: BitVector, n: int, m: int) -> np.ndarray:
    """Explicit m x n 0/1 matrix with T[i][j] = seed[i - j + n - 1]."""
    if seed.length_bits != n + m - 1:
        raise ContractError(f"seed has {seed.length_bits} bits, expected {n + m - 1}")
    s = seed.to_numpy()
    index = np.arange(m)[:, None] - np.arange(n)[None, :] + (n - 1)
    return s[index]


def extract_naive(seed: BitVector, x: BitVector, m: int) -> BitVector:
    """Reference path: materialise the matrix and multiply over GF(2)."""
    n = _check_lengths(seed, x, m)
    matrix = toeplitz_matrix(seed, n, m)
    ones = x.to_numpy().astype(bool)
    out = matrix[:, ones].sum(axis=1, dtype=np.int64) & 1
    return BitVector.from_numpy(out.astype(np.uint8))


def extract_fast(seed: BitVector, x: BitVector, m: int) -> BitVector:
    """
    Accelerated path: the matrix-vector product is a window of the carry-less product of
    seed and input read as big-endian integers. Output bit i collects the terms of weight
    2^(n + m - 2 - i), so the window starts n - 1 bits up.
    """
    n = _check_lengths(seed, x, m)
    product = clmul_windowed(seed.to_int(), x.to_int())
    return BitVector.from_int((product >> (n - 1)) & ((1 << m) - 1), m)


def extract(seed: BitVector, x: BitVector, m: int, accelerated: bool = True) -> BitVector:
    """m-bit Toeplitz hash of `x` under `seed` (n + m - 1 bits)."""
    if accelerated:
        return extract_fast(seed, x, m)
    return extract_naive(seed, x, m)


# ---------------------------------------------------------------------- exhaustive checks


def _all_vectors(length: int):
    for value in range(1 << length):
        yield BitVector.from_int(value, length)


def collision_probability(n: int, m: int, x: BitVector, y: BitVector) -> float:
    """Fraction of all 2^(n+m-1) seeds under which x and y hash to the same output."""
    if x.length_bits != n or y.length_bits != n:
        raise ContractError(f"both inputs must have {n} bits")
    seed_bits = n + m - 1
    collisions = sum(1 for seed in _all_vectors(seed_bits) if extract_fast(seed, x, m) == extract_fast(seed, y, m))
    return collisions / (1 << seed_bits)


def is_two_universal(n: int, m: int) -> bool:
    """Exhaustive check that every pair x != y collides with probability at most 2^-m."""
    bound = 2.0**-m
    for a, b in itertools.combinations(range(1 << n), 2):
        p = collision_probability(n, m, BitVector.from_int(a, n), BitVector.from_int(b, n))
        if p > bound:
            logger.warning(f"Pair ({a:0{n}b}, {b:0{n}b}) collides with probability {p} > {bound}")
            return False
    return True


def leftover_hash_distance(n: int, m: int, support: Sequence[int]) -> float:
    """
    Exact statistical distance of (h_y(X), y) from uniform over m + d bits, with the seed y
    uniform and X uniform over the given input values.
    """
    support = sorted(set(int(v) for v in support))
    if not support:
        raise ContractError("source support is empty")
    if any(not 0 <= v < (1 << n) for v in support):
        raise ContractError(f"support values must be {n}-bit integers")
    seed_bits = n + m - 1
    joint = np.zeros((1 << seed_bits, 1 << m), dtype=np.float64)
    weight = 1.0 / (len(support) * (1 << seed_bits))
    inputs = [BitVector.from_int(v, n) for v in support]
    for s, seed in enumerate(_all_vectors(seed_bits)):
        for x in inputs:
            joint[s, extract_fast(seed, x, m).to_int()] += weight
    uniform = np.full(joint.size, 1.0 / joint.size)
    return statistical_distance(joint.ravel(), uniform)


class ToeplitzExtractor(Extractor):
    """
    Block-partitioned Toeplitz hashing: every n-bit block is hashed with the same seed.
    """

    def __init__(self, params: ToeplitzParams, seed: BitVector, threads: int = 1, accelerated: bool = True) -> None:
        self.params = params
        self.accelerated = accelerated
        super().__init__(TOEPLITZ, seed, threads)

    @property
    def input_bits(self) -> int:
        return self.params.n

    @property
    def output_bits(self) -> int:
        return self.params.m

    @property
    def seed_bits(self) -> int:
        return self.params.seed_bits

    @property
    def epsilon_log2(self) -> float:
        return self.params.epsilon_log2

    def extract_block(self, block: BitVector) -> BitVector:
        return extract(self.seed, block, self.params.m, accelerated=self.accelerated)

    def describe(self) -> Dict[str, Any]:
        out = super().describe()
        out.update(self.params.as_dict())
        out["accelerated"] = self.accelerated
        return out
