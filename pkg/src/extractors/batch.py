"""
Vectorised Reed-Solomon evaluation over GF(2^m), m <= 128, for many evaluation points.

Field elements are held as two uint64 words (lo carries x^0..x^63, hi carries x^64..x^127).
Multiplication by a per-lane constant alpha goes through per-lane nibble tables: entry
[pos][w] is alpha * w(x) * x^(4*pos), so one Horner step costs ceil(m / 4) table gathers.
"""

from typing import List, Sequence, Tuple

import numpy as np

from src.common.errors import ContractError
from src.fields.gf2m import FieldSpec

WORD_BITS = 64
MAX_DEGREE = 2 * WORD_BITS

_ONE = np.uint64(1)
_NIBBLE = np.uint64(0xF)
_ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
_FOLD_SHIFTS = (np.uint64(32), np.uint64(16), np.uint64(8), np.uint64(4), np.uint64(2), np.uint64(1))

Words = Tuple[np.ndarray, np.ndarray]


def _low_mask(bits: int) -> np.uint64:
    if bits >= WORD_BITS:
        return _ALL_ONES
    return np.uint64((1 << bits) - 1)


def split_int(value: int) -> Tuple[int, int]:
    """Python int below 2^128 as (lo, hi) word values."""
    return value & 0xFFFFFFFFFFFFFFFF, value >> WORD_BITS


def join_words(lo: np.ndarray, hi: np.ndarray) -> List[int]:
    return [int(h) << WORD_BITS | int(l) for l, h in zip(lo.tolist(), hi.tolist())]


def ints_to_words(values: Sequence[int]) -> Words:
    lo = np.fromiter((v & 0xFFFFFFFFFFFFFFFF for v in values), dtype=np.uint64, count=len(values))
    hi = np.fromiter((v >> WORD_BITS for v in values), dtype=np.uint64, count=len(values))
    return lo, hi


def bits_to_words(bits: np.ndarray) -> Words:
    """
    Rows of 0/1 values, MSB-first, as (lo, hi) integer words. Column j of a width-w row
    carries weight 2^(w - 1 - j).
    """
    bits = np.asarray(bits, dtype=np.uint64)
    rows, width = bits.shape
    if width > MAX_DEGREE:
        raise ContractError(f"rows of {width} bits do not fit in two 64-bit words")
    lo = np.zeros(rows, dtype=np.uint64)
    hi = np.zeros(rows, dtype=np.uint64)
    for j in range(width):
        power = width - 1 - j
        if power < WORD_BITS:
            lo |= bits[:, j] << np.uint64(power)
        else:
            hi |= bits[:, j] << np.uint64(power - WORD_BITS)
    return lo, hi


def parity(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Parity of every (lo, hi) pair as uint8."""
    v = lo ^ hi
    for shift in _FOLD_SHIFTS:
        v = v ^ (v >> shift)
    return (v & _ONE).astype(np.uint8)


class BatchField:
    """
    Lane-parallel arithmetic in one GF(2^m).
    """

    def __init__(self, spec: FieldSpec) -> None:
        if spec.m > MAX_DEGREE:
            raise ContractError(f"batch arithmetic supports m <= {MAX_DEGREE}, got {spec.m}")
        self.spec = spec
        self.m = spec.m
        self.positions = (self.m + 3) // 4
        poly_lo, poly_hi = split_int(spec.reduction_poly)
        self._poly_lo = np.uint64(poly_lo)
        self._poly_hi = np.uint64(poly_hi)
        self._mask_lo = _low_mask(self.m)
        self._mask_hi = _low_mask(self.m - WORD_BITS) if self.m > WORD_BITS else np.uint64(0)

    def times_x(self, lo: np.ndarray, hi: np.ndarray) -> Words:
        """Multiply every lane by x and reduce."""
        m = self.m
        if m <= WORD_BITS:
            carry = (lo >> np.uint64(m - 1)) & _ONE
            lo = (lo << _ONE) & self._mask_lo
            hi = hi.copy()
        else:
            carry = (hi >> np.uint64(m - 1 - WORD_BITS)) & _ONE
            hi = ((hi << _ONE) | (lo >> np.uint64(WORD_BITS - 1))) & self._mask_hi
            lo = lo << _ONE
        hit = carry.astype(bool)
        lo = np.where(hit, lo ^ self._poly_lo, lo)
        hi = np.where(hit, hi ^ self._poly_hi, hi)
        return lo, hi

    def nibble_tables(self, alpha_lo: np.ndarray, alpha_hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Tables of shape (positions, 16, lanes): [pos][w] = alpha * w * x^(4 pos).
        """
        lanes = alpha_lo.size
        basis_lo = np.empty((4 * self.positions, lanes), dtype=np.uint64)
        basis_hi = np.empty((4 * self.positions, lanes), dtype=np.uint64)
        lo, hi = alpha_lo.copy(), alpha_hi.copy()
        for k in range(4 * self.positions):
            basis_lo[k], basis_hi[k] = lo, hi
            lo, hi = self.times_x(lo, hi)

        table_lo = np.zeros((self.positions, 16, lanes), dtype=np.uint64)
        table_hi = np.zeros((self.positions, 16, lanes), dtype=np.uint64)
        for w in range(1, 16):
            low = w & -w
            bit = low.bit_length() - 1
            table_lo[:, w] = table_lo[:, w ^ low] ^ basis_lo[bit::4]
            table_hi[:, w] = table_hi[:, w ^ low] ^ basis_hi[bit::4]
        return table_lo, table_hi

    def mul_by_tables(self, lo: np.ndarray, hi: np.ndarray, tables: Tuple[np.ndarray, np.ndarray]) -> Words:
        """acc * alpha for every lane, alpha baked into `tables`."""
        table_lo, table_hi = tables
        lanes = lo.size
        flat_lo = table_lo.reshape(self.positions, 16 * lanes)
        flat_hi = table_hi.reshape(self.positions, 16 * lanes)
        lane_index = np.arange(lanes, dtype=np.int64)
        out_lo = np.zeros(lanes, dtype=np.uint64)
        out_hi = np.zeros(lanes, dtype=np.uint64)
        for pos in range(self.positions):
            shift = 4 * pos
            if shift < WORD_BITS:
                nib = (lo >> np.uint64(shift)) & _NIBBLE
            else:
                nib = (hi >> np.uint64(shift - WORD_BITS)) & _NIBBLE
            index = nib.astype(np.int64) * lanes + lane_index
            out_lo ^= flat_lo[pos][index]
            out_hi ^= flat_hi[pos][index]
        return out_lo, out_hi

    def horner(self, coeff_lo: np.ndarray, coeff_hi: np.ndarray, alpha_lo: np.ndarray, alpha_hi: np.ndarray) -> Words:
        """
        Evaluate one polynomial (coefficients constant term first) at every lane's alpha.
        """
        lanes = alpha_lo.size
        chunks = coeff_lo.size
        if chunks == 0:
            return np.zeros(lanes, dtype=np.uint64), np.zeros(lanes, dtype=np.uint64)
        acc_lo = np.full(lanes, coeff_lo[-1], dtype=np.uint64)
        acc_hi = np.full(lanes, coeff_hi[-1], dtype=np.uint64)
        if chunks == 1:
            return acc_lo, acc_hi
        tables = self.nibble_tables(alpha_lo, alpha_hi)
        for c in range(chunks - 2, -1, -1):
            acc_lo, acc_hi = self.mul_by_tables(acc_lo, acc_hi, tables)
            acc_lo ^= coeff_lo[c]
            acc_hi ^= coeff_hi[c]
        return acc_lo, acc_hi
