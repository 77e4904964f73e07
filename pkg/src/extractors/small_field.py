"""
Vectorised arithmetic in small fields GF(2^m_d) (m_d <= 10), used to evaluate the
weak-design polynomials for thousands of sets at once.
"""

from functools import lru_cache

import numpy as np

from src.common.errors import ContractError
from src.fields.gf2m import FieldSpec

SMALL_FIELD_MAX_DEGREE = 10


@lru_cache(maxsize=None)
def multiplication_table(m: int) -> np.ndarray:
    """
    Full q x q product table of GF(2^m) for the standard polynomial.

    Products by the basis monomials x^i come from FieldSpec.mul_reference; every other
    row is the XOR of the basis rows selected by the bits of its index.
    """
    if not 1 <= m <= SMALL_FIELD_MAX_DEGREE:
        raise ContractError(f"small-field table supports 1 <= m <= {SMALL_FIELD_MAX_DEGREE}, got {m}")
    spec = FieldSpec.standard(m)
    q = spec.order
    basis = np.array([[spec.mul_reference(1 << i, b) for b in range(q)] for i in range(m)], dtype=np.uint16)
    table = np.zeros((q, q), dtype=np.uint16)
    for a in range(1, q):
        low = a & -a
        table[a] = table[a ^ low] ^ basis[low.bit_length() - 1]
    table.setflags(write=False)
    return table


def digits(encodings: np.ndarray, q: int, count: int) -> np.ndarray:
    """
    Base-q digits (constant coefficient first) of integer polynomial encodings.
    """
    encodings = np.asarray(encodings, dtype=np.int64)
    out = np.empty((encodings.size, count), dtype=np.int64)
    rest = encodings.copy()
    for j in range(count):
        out[:, j] = rest % q
        rest //= q
    return out


def evaluate_polynomials(coeffs: np.ndarray, points: np.ndarray, m: int) -> np.ndarray:
    """
    Evaluate many polynomials over GF(2^m) at the same points.

    Args:
        coeffs (np.ndarray): (count, degree_bound) coefficients, constant first.
        points (np.ndarray): field points to evaluate at.
        m (int): field degree.

    Returns:
        np.ndarray: (count, len(points)) values.
    """
    table = multiplication_table(m)
    coeffs = np.asarray(coeffs, dtype=np.int64)
    points = np.asarray(points, dtype=np.int64)
    count, bound = coeffs.shape
    acc = np.broadcast_to(coeffs[:, bound - 1][:, None], (count, points.size)).astype(np.int64)
    xs = np.broadcast_to(points[None, :], (count, points.size))
    for j in range(bound - 2, -1, -1):
        acc = table[acc, xs].astype(np.int64) ^ coeffs[:, j][:, None]
    return acc
