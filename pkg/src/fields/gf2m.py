"""
Arithmetic in binary extension fields GF(2^m), 1 <= m <= 128.

Elements are m-bit integers read as polynomials over GF(2) (bit k is the coefficient
of x^k). A field is fixed by its reduction polynomial, stored WITHOUT the leading x^m
term so it fits in m bits: x^8 + x^4 + x^3 + x + 1 is stored as 0x1B.
"""

import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from src.common.errors import ContractError
from src.constants import GF_BRUTE_FORCE_MAX_DEGREE, GF_MAX_DEGREE

# Widely deployed polynomials (leading term omitted):
#   2: x^2+x+1   4: x^4+x+1   8: AES x^8+x^4+x^3+x+1   16: x^16+x^12+x^3+x+1
#   32: x^32+x^22+x^2+x+1   64: x^64+x^4+x^3+x+1   128: GCM x^128+x^7+x^2+x+1
STANDARD_POLYNOMIALS: Dict[int, int] = {
    2: 0x3,
    4: 0x3,
    8: 0x1B,
    16: 0x100B,
    32: 0x400007,
    64: 0x1B,
    128: 0x87,
}


def clmul(a: int, b: int) -> int:
    """Carry-less product of two non-negative integers (no reduction)."""
    if a < b:
        a, b = b, a
    result = 0
    shift = 0
    while b:
        if b & 1:
            result ^= a << shift
        b >>= 1
        shift += 1
    return result


def clmul_windowed(a: int, b: int, window_bits: int = 8) -> int:
    """
    Carry-less product of arbitrarily long integers, `window_bits` of `b` per step.

    The 2^window multiples of `a` are tabulated once, so the cost is one table build plus
    bit_length(b) / window_bits shifted XORs over machine words.
    """
    if not a or not b:
        return 0
    if a.bit_length() < b.bit_length():
        a, b = b, a
    size = 1 << window_bits
    table = [0] * size
    for w in range(1, size):
        low = w & -w
        table[w] = table[w ^ low] ^ (a << (low.bit_length() - 1))
    mask = size - 1
    product = 0
    shift = 0
    while b:
        chunk = b & mask
        if chunk:
            product ^= table[chunk] << shift
        b >>= window_bits
        shift += window_bits
    return product


def poly_mod(a: int, modulus: int) -> int:
    """Remainder of polynomial `a` modulo the full polynomial `modulus` (leading term included)."""
    degree = modulus.bit_length() - 1
    while a.bit_length() - 1 >= degree:
        a ^= modulus << (a.bit_length() - 1 - degree)
    return a


def is_irreducible(m: int, reduction_poly: int) -> bool:
    """
    Brute-force irreducibility check of x^m + reduction_poly by trial division with every
    polynomial of degree 1..m//2. Intended for m <= 16.
    """
    if m < 1:
        return False
    full = (1 << m) | reduction_poly
    if m == 1:
        return True
    if not full & 1:
        return False
    for divisor in range(2, 1 << (m // 2 + 1)):
        if poly_mod(full, divisor) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def find_irreducible(m: int) -> int:
    """Lowest reduction polynomial (leading term omitted) making x^m + p irreducible, m <= 16."""
    if not 1 <= m <= GF_BRUTE_FORCE_MAX_DEGREE:
        raise ContractError(f"brute-force polynomial search supports 1 <= m <= {GF_BRUTE_FORCE_MAX_DEGREE}")
    for candidate in range(1, 1 << m):
        if is_irreducible(m, candidate):
            return candidate
    raise ContractError(f"no irreducible polynomial of degree {m}")


def supported_degree_at_least(m: int) -> int:
    """Smallest degree >= m for which a polynomial is available without caller input."""
    if m <= GF_BRUTE_FORCE_MAX_DEGREE:
        return max(m, 1)
    for degree in sorted(STANDARD_POLYNOMIALS):
        if degree >= m:
            return degree
    raise ContractError(f"no supported field degree >= {m} (maximum {GF_MAX_DEGREE})")


@dataclass(frozen=True)
class FieldSpec:
    """
    GF(2^m) defined by x^m + reduction_poly.

    Irreducibility is verified at construction for m <= 16; larger degrees must come
    from the standard table or be supplied by the caller.
    """

    m: int
    reduction_poly: int
    _fold_shifts: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 1 <= self.m <= GF_MAX_DEGREE:
            raise ContractError(f"field degree {self.m} outside 1..{GF_MAX_DEGREE}")
        if not 0 <= self.reduction_poly < (1 << self.m):
            raise ContractError(f"reduction polynomial {self.reduction_poly:#x} does not fit in {self.m} bits")
        if self.m <= GF_BRUTE_FORCE_MAX_DEGREE and not is_irreducible(self.m, self.reduction_poly):
            raise ContractError(f"x^{self.m} + {self.reduction_poly:#x} is reducible")
        shifts = tuple(k for k in range(self.m) if (self.reduction_poly >> k) & 1)
        object.__setattr__(self, "_fold_shifts", shifts)

    @classmethod
    def standard(cls, m: int) -> "FieldSpec":
        """Field from the built-in table, or the lowest irreducible polynomial for m <= 16."""
        return _standard_spec(m)

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def mask(self) -> int:
        return (1 << self.m) - 1

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def reduce(self, product: int) -> int:
        """Fold a carry-less product of two field elements back below x^m."""
        m = self.m
        mask = self.mask
        while product >> m:
            high = product >> m
            product &= mask
            for shift in self._fold_shifts:
                product ^= high << shift
        return product

    def mul_fast(self, a: int, b: int) -> int:
        """Nibble-windowed carry-less multiply followed by sparse folding."""
        if not a or not b:
            return 0
        if a.bit_length() < b.bit_length():
            a, b = b, a
        table = _nibble_table(a)
        product = 0
        shift = 0
        while b:
            product ^= table[b & 0xF] << shift
            b >>= 4
            shift += 4
        return self.reduce(product)

    def mul_reference(self, a: int, b: int) -> int:
        """Shift-and-XOR (Russian peasant) multiplication with interleaved reduction."""
        m = self.m
        top = 1 << m
        poly = self.reduction_poly
        result = 0
        while b:
            if b & 1:
                result ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= top | poly
        return result


def _nibble_table(a: int) -> List[int]:
    table = [0] * 16
    for w in range(1, 16):
        low = w & -w
        table[w] = table[w ^ low] ^ (a << (low.bit_length() - 1))
    return table


@lru_cache(maxsize=None)
def _standard_spec(m: int) -> FieldSpec:
    if m in STANDARD_POLYNOMIALS:
        return FieldSpec(m, STANDARD_POLYNOMIALS[m])
    if m <= GF_BRUTE_FORCE_MAX_DEGREE:
        return FieldSpec(m, find_irreducible(m))
    raise ContractError(f"no built-in polynomial of degree {m}; supply one explicitly")


@dataclass(frozen=True)
class FieldElement:
    """An element of the field described by `spec`."""

    value: int
    spec: FieldSpec

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.spec.order:
            raise ContractError(f"value {self.value:#x} is not an element of GF(2^{self.spec.m})")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return gf_add(self, other)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return gf_mul(self, other)

    def __pow__(self, exponent: int) -> "FieldElement":
        return gf_pow(self, exponent)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"GF(2^{self.spec.m})({self.value:#x})"


class GFOpCounter:
    """
    Thread-safe tally of field additions and multiplications.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.additions = 0
        self.multiplications = 0

    def record(self, additions: int = 0, multiplications: int = 0) -> None:
        with self._lock:
            self.additions += additions
            self.multiplications += multiplications

    @property
    def total(self) -> int:
        return self.additions + self.multiplications

    def as_dict(self) -> Dict[str, int]:
        return {"additions": self.additions, "multiplications": self.multiplications, "total": self.total}


def _check_same_field(a: FieldElement, b: FieldElement) -> None:
    if a.spec != b.spec:
        raise ContractError(f"field mismatch: GF(2^{a.spec.m}) vs GF(2^{b.spec.m})")


def gf_add(a: FieldElement, b: FieldElement) -> FieldElement:
    """Characteristic-2 addition (XOR)."""
    _check_same_field(a, b)
    return FieldElement(a.value ^ b.value, a.spec)


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Field product via the fast path; agrees bit-exactly with `gf_mul_reference`."""
    _check_same_field(a, b)
    return FieldElement(a.spec.mul_fast(a.value, b.value), a.spec)


def gf_mul_reference(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same_field(a, b)
    return FieldElement(a.spec.mul_reference(a.value, b.value), a.spec)


def gf_pow(a: FieldElement, exponent: int) -> FieldElement:
    """Square-and-multiply exponentiation (exponent >= 0)."""
    if exponent < 0:
        raise ContractError("negative exponents need inversion, which is not provided")
    spec = a.spec
    result = 1
    base = a.value
    while exponent:
        if exponent & 1:
            result = spec.mul_fast(result, base)
        base = spec.mul_fast(base, base)
        exponent >>= 1
    return FieldElement(result, spec)


def poly_eval(
    coeffs: Sequence[FieldElement], x: FieldElement, counter: Optional[GFOpCounter] = None
) -> FieldElement:
    """
    Horner evaluation of sum(coeffs[i] * x^i), constant term first.

    An empty coefficient list evaluates to zero.
    """
    spec = x.spec
    if not coeffs:
        return FieldElement(0, spec)
    for c in coeffs:
        if c.spec != spec:
            raise ContractError(f"coefficient field GF(2^{c.spec.m}) differs from GF(2^{spec.m})")
    acc = poly_eval_int([c.value for c in coeffs], x.value, spec)
    if counter is not None:
        steps = len(coeffs) - 1
        counter.record(additions=steps, multiplications=steps)
    return FieldElement(acc, spec)


def poly_eval_int(coeffs: Sequence[int], x: int, spec: FieldSpec) -> int:
    """Integer-level Horner evaluation used on hot paths (no per-element objects)."""
    acc = 0
    if not x:
        return coeffs[0] if coeffs else 0
    mul = spec.mul_fast
    for c in reversed(coeffs):
        acc = mul(acc, x) ^ c
    return acc
