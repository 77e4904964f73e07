"""
Trevisan's extractor: a Reed-Solomon-then-Hadamard one-bit extractor applied to seed
subsets chosen by a block weak design.

Output bit i is one bit of the concatenated codeword of the input message, at the
2*m_e-bit position u = seed|S_i. The codeword (2^(2*m_e) bits) is never materialised:
u splits into alpha (first m_e bits) and r (last m_e bits), and the bit is
<RS(message)(alpha), r> over GF(2).
"""

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from src.bits.bitvector import BitVector, gather
from src.common.errors import ContractError, SizingError
from src.common.logging import logger
from src.constants import (
    TREVISAN,
    TREVISAN_BATCH_LANES,
    TREVISAN_DEFAULT_RS_DEGREE,
    TREVISAN_MAX_RS_DEGREE,
)
from src.extractors.batch import BatchField, bits_to_words, ints_to_words, parity
from src.extractors.design import WeakDesign
from src.extractors.extractor import Extractor
from src.fields.gf2m import FieldElement, FieldSpec, GFOpCounter, poly_eval, supported_degree_at_least


def _exact_log2(value: int, name: str) -> int:
    if value <= 0 or value & (value - 1):
        raise SizingError(f"{name} must be a power of two, got {value}")
    return value.bit_length() - 1


def rho(k: float, n_f: int, epsilon_log2: float, d: int) -> float:
    """
    Extraction ratio: (k - 3*log2(n_f / eps) - d - 3) / n_f. Values below 1 mean the
    output is longer than the certified extractable entropy.
    """
    if n_f <= 0:
        raise ContractError(f"n_f must be positive, got {n_f}")
    return (k - 3 * (math.log2(n_f) - epsilon_log2) - d - 3) / n_f


def _table_epsilon_log2(m_e: int, n_i: int, n_f: int) -> float:
    """log2 of sqrt(2^(4 - m_e) * n_i * n_f^2)."""
    return (4 - m_e + math.log2(n_i) + 2 * math.log2(n_f)) / 2


def _required_rs_degree(n_i: int, n_f: int, epsilon_log2: float) -> int:
    return math.ceil(math.log2(n_i) + 2 * math.log2(n_f) - 2 * epsilon_log2 + 4 - 1e-9)


@dataclass(frozen=True)
class TrevisanParams:
    """
    Sizing of one Trevisan extraction block.

    n_bar_log2 is log2 of the codeword length, 2 * m_e.
    """

    n_i: int
    n_f: int
    k: float
    epsilon_log2: float
    m_e: int
    m_d: int
    b: int
    d: int
    rho: float
    n_bar_log2: int

    @classmethod
    def from_degrees(
        cls,
        n_i: int,
        n_f: int,
        m_e: int = TREVISAN_DEFAULT_RS_DEGREE,
        k: Optional[float] = None,
        epsilon_log2: Optional[float] = None,
    ) -> "TrevisanParams":
        """
        Derive m_d, b and d from a fixed RS degree. Without eps, eps is set from
        sqrt(2^(4 - m_e) * n_i * n_f^2), which makes the codeword-length relation exact.
        """
        _exact_log2(n_i, "n_i")
        _exact_log2(n_f, "n_f")
        if n_f >= n_i:
            raise SizingError(f"output length n_f={n_f} must be shorter than the input n_i={n_i}")
        k = float(n_i) if k is None else float(k)
        if k > n_i:
            raise SizingError(f"min-entropy {k} exceeds the {n_i}-bit input")
        if n_f > k:
            raise SizingError(f"n_f={n_f} exceeds the input min-entropy k={k}")
        if not 1 <= m_e <= TREVISAN_MAX_RS_DEGREE:
            raise SizingError(f"RS field degree m_e={m_e} outside 1..{TREVISAN_MAX_RS_DEGREE}")
        if n_i > m_e * (1 << m_e):
            raise SizingError(f"a {n_i}-bit message does not fit the {1 << m_e} coefficients of GF(2^{m_e})")
        if epsilon_log2 is None:
            epsilon_log2 = _table_epsilon_log2(m_e, n_i, n_f)
            if epsilon_log2 > 0:
                raise SizingError(f"m_e={m_e} is too small for n_i={n_i}, n_f={n_f}: eps would exceed 1")
        elif _required_rs_degree(n_i, n_f, epsilon_log2) > m_e:
            raise SizingError(f"m_e={m_e} is below the degree required for log2(eps)={epsilon_log2}")

        m_d = (2 * m_e - 1).bit_length()
        b = max(1, (n_f - 1).bit_length() - m_d + 1)
        d = (1 << (2 * m_d)) * b
        return cls(
            n_i=n_i,
            n_f=n_f,
            k=k,
            epsilon_log2=epsilon_log2,
            m_e=m_e,
            m_d=m_d,
            b=b,
            d=d,
            rho=rho(k, n_f, epsilon_log2, d),
            n_bar_log2=2 * m_e,
        )

    @property
    def seed_bits(self) -> int:
        return self.d

    @property
    def chunks(self) -> int:
        """Number of RS coefficients the message splits into."""
        return -(-self.n_i // self.m_e)

    @property
    def field(self) -> FieldSpec:
        return FieldSpec.standard(self.m_e)

    def warnings(self) -> List[str]:
        out = []
        if self.rho < 1:
            out.append(
                f"extraction ratio rho={self.rho:.4f} < 1: {self.n_f} output bits exceed the certified "
                f"extractable entropy of k={self.k}"
            )
        if self.d > self.n_f:
            out.append(
                f"seed of {self.d} bits is longer than the {self.n_f}-bit output; "
                "concatenating a hashing extractor would recycle it"
            )
        return out

    def as_dict(self) -> Dict[str, Any]:
        return {
            "extractor": TREVISAN,
            "n_i": self.n_i,
            "n_f": self.n_f,
            "k": self.k,
            "epsilon_log2": self.epsilon_log2,
            "m_e": self.m_e,
            "m_d": self.m_d,
            "b": self.b,
            "d": self.d,
            "rho": self.rho,
            "n_bar_log2": self.n_bar_log2,
            "seed_bits": self.d,
        }


def solve_params(
    n_i: int,
    n_f: int,
    epsilon_log2: Optional[float] = None,
    k: Optional[float] = None,
    m_e: int = TREVISAN_DEFAULT_RS_DEGREE,
) -> TrevisanParams:
    """
    Size Trevisan's extractor.

    With eps given, m_e = ceil(log2 n_i + 2 log2 n_f - 2 log2 eps + 4), rounded up to a
    field degree with a known polynomial, and the eps that degree achieves is reported.
    Without eps, `m_e` is kept and eps follows from it.
    """
    if epsilon_log2 is not None:
        if epsilon_log2 > 0:
            raise SizingError(f"log2(eps) must be <= 0, got {epsilon_log2}")
        _exact_log2(n_i, "n_i")
        _exact_log2(n_f, "n_f")
        required = max(1, _required_rs_degree(n_i, n_f, epsilon_log2))
        if required > TREVISAN_MAX_RS_DEGREE:
            raise SizingError(
                f"log2(eps)={epsilon_log2} needs an RS field of degree {required} > {TREVISAN_MAX_RS_DEGREE}"
            )
        m_e = supported_degree_at_least(required)
        epsilon_log2 = min(epsilon_log2, _table_epsilon_log2(m_e, n_i, n_f))

    params = TrevisanParams.from_degrees(n_i, n_f, m_e=m_e, k=k, epsilon_log2=epsilon_log2)
    if _required_rs_degree(n_i, n_f, params.epsilon_log2) > params.m_e:
        raise SizingError(f"codeword-length relation does not close at m_e={params.m_e}")
    # Seed-length bound d >= (log2 n_bar)^2 * b.
    if params.d < params.n_bar_log2**2 * params.b:
        raise SizingError(f"seed length {params.d} is below (log2 n_bar)^2 * b")
    logger.info(
        f"Trevisan params: n_i={params.n_i}, n_f={params.n_f}, m_e={params.m_e}, m_d={params.m_d}, "
        f"b={params.b}, d={params.d}, log2(eps)={params.epsilon_log2:.2f}, rho={params.rho:.4f}"
    )
    for warning in params.warnings():
        logger.warning(warning)
    return params


def build_design(params: TrevisanParams) -> WeakDesign:
    return WeakDesign.from_params(params)


# ---------------------------------------------------------------------- one-bit extractor


def message_chunks(message: BitVector, m_e: int) -> List[int]:
    """
    Consecutive m_e-bit chunks of `message` (MSB-first within each), chunk 0 first; the
    final chunk is zero padded on the right.
    """
    if m_e <= 0:
        raise ContractError(f"chunk width must be positive, got {m_e}")
    count = -(-message.length_bits // m_e)
    pad = count * m_e - message.length_bits
    value = message.to_int() << pad
    mask = (1 << m_e) - 1
    return [(value >> (m_e * (count - 1 - c))) & mask for c in range(count)]


def rs_symbol(
    message: BitVector,
    alpha: FieldElement,
    field: Optional[FieldSpec] = None,
    counter: Optional[GFOpCounter] = None,
) -> FieldElement:
    """
    The message read as a polynomial over GF(2^m_e) (chunk c is the x^c coefficient),
    evaluated at alpha.
    """
    spec = alpha.spec
    if field is not None and field != spec:
        raise ContractError(f"alpha lives in GF(2^{spec.m}), the code is over GF(2^{field.m})")
    if message.length_bits > spec.m * spec.order:
        raise ContractError(f"{message.length_bits}-bit message exceeds the {spec.order} coefficients available")
    coeffs = [FieldElement(c, spec) for c in message_chunks(message, spec.m)]
    return poly_eval(coeffs, alpha, counter)


def codeword_bit(message: BitVector, u: BitVector, field: Optional[FieldSpec] = None) -> int:
    """Bit u of the concatenated RS-Hadamard codeword of `message`."""
    if u.length_bits == 0 or u.length_bits % 2:
        raise ContractError(f"codeword index must have an even, positive length, got {u.length_bits}")
    m_e = u.length_bits // 2
    spec = field or FieldSpec.standard(m_e)
    if spec.m != m_e:
        raise ContractError(f"index of {u.length_bits} bits does not address a GF(2^{spec.m}) codeword")
    value = u.to_int()
    alpha = FieldElement(value >> m_e, spec)
    r = value & spec.mask
    return (rs_symbol(message, alpha).value & r).bit_count() & 1


class RSSymbolCache:
    """
    Memo of rs_symbol per alpha for one message. Lookups are lock-free; inserts are
    insert-if-absent under a lock, so concurrent callers agree on the stored value.
    Both tallies are updated under the lock.
    """

    def __init__(self, message: BitVector, spec: FieldSpec, counter: Optional[GFOpCounter] = None) -> None:
        self.spec = spec
        self.counter = counter
        self._coeffs = [FieldElement(c, spec) for c in message_chunks(message, spec.m)]
        self._symbols: Dict[int, int] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, alpha: int) -> int:
        cached = self._symbols.get(alpha)
        if cached is not None:
            with self._lock:
                self.hits += 1
            return cached
        value = poly_eval(self._coeffs, FieldElement(alpha, self.spec), self.counter).value
        with self._lock:
            self.misses += 1
            return self._symbols.setdefault(alpha, value)

    def __len__(self) -> int:
        return len(self._symbols)


# ---------------------------------------------------------------------- extraction


def _check_lengths(message: BitVector, seed: BitVector, params: TrevisanParams, design: WeakDesign) -> None:
    if message.length_bits != params.n_i:
        raise ContractError(f"message has {message.length_bits} bits, expected n_i={params.n_i}")
    if seed.length_bits != params.d:
        raise ContractError(f"seed has {seed.length_bits} bits, expected d={params.d}")
    if design.n_f != params.n_f or design.m_e != params.m_e or design.seed_bits != params.d:
        raise ContractError("weak design was not built for these parameters")


def extract_batch(
    message: BitVector,
    seed: BitVector,
    params: TrevisanParams,
    design: WeakDesign,
    start: int,
    stop: int,
    counter: Optional[GFOpCounter] = None,
) -> np.ndarray:
    """
    Output bits [start, stop) as a uint8 array. Each distinct alpha in the range is
    evaluated once; the result equals codeword_bit per index.
    """
    _check_lengths(message, seed, params, design)
    m_e = params.m_e
    seed_bits = seed.to_numpy()
    u = seed_bits[design.index_matrix(start, stop)]
    alpha_lo, alpha_hi = bits_to_words(u[:, :m_e])
    r_lo, r_hi = bits_to_words(u[:, m_e:])

    keys = np.stack([alpha_hi, alpha_lo], axis=1)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    unique_lo, unique_hi = alpha_lo[first], alpha_hi[first]

    coeff_lo, coeff_hi = ints_to_words(message_chunks(message, m_e))
    field = BatchField(params.field)
    sym_lo, sym_hi = field.horner(coeff_lo, coeff_hi, unique_lo, unique_hi)
    if counter is not None:
        steps = max(0, coeff_lo.size - 1) * unique_lo.size
        counter.record(additions=steps, multiplications=steps)
    inverse = inverse.ravel()
    return parity(sym_lo[inverse] & r_lo, sym_hi[inverse] & r_hi)


def _ranges(total: int, lanes: int) -> List[range]:
    return [range(lo, min(lo + lanes, total)) for lo in range(0, total, lanes)]


def extract(
    message: BitVector,
    seed: BitVector,
    params: TrevisanParams,
    design: WeakDesign,
    threads: int = 1,
    batch: bool = True,
    counter: Optional[GFOpCounter] = None,
    lanes: int = TREVISAN_BATCH_LANES,
) -> BitVector:
    """
    All n_f output bits: bit i = codeword_bit(message, seed|S_i).

    Output bits are independent, so ranges of them are evaluated on a thread pool and
    reassembled in index order.
    """
    _check_lengths(message, seed, params, design)
    if threads < 1:
        raise ContractError(f"thread count must be >= 1, got {threads}")
    cache = None if batch else RSSymbolCache(message, params.field, counter)

    def work(span: range) -> np.ndarray:
        if cache is None:
            return extract_batch(message, seed, params, design, span.start, span.stop, counter)
        return _extract_scalar(cache, seed, design, params.m_e, span)

    spans = _ranges(params.n_f, lanes if batch else max(1, params.n_f // threads))
    if threads == 1 or len(spans) == 1:
        parts = [work(span) for span in spans]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, spans))
    return BitVector.from_numpy(np.concatenate(parts))


def _extract_scalar(cache: RSSymbolCache, seed: BitVector, design: WeakDesign, m_e: int, span: range) -> np.ndarray:
    out = np.empty(len(span), dtype=np.uint8)
    mask = (1 << m_e) - 1
    for pos, i in enumerate(span):
        u = gather(seed, design.indices(i)).to_int()
        out[pos] = (cache.get(u >> m_e) & u & mask).bit_count() & 1
    return out


def theoretical_gf_ops(params: TrevisanParams) -> int:
    """One field operation per RS coefficient per output bit, with no sharing across alpha."""
    return params.n_f * params.chunks


class TrevisanExtractor(Extractor):
    """
    Block-partitioned Trevisan extraction sharing one seed and one weak design; threads
    work across output bits inside each block.
    """

    parallel_blocks = False

    def __init__(
        self,
        params: TrevisanParams,
        seed: BitVector,
        threads: int = 1,
        batch: bool = True,
        counter: Optional[GFOpCounter] = None,
    ) -> None:
        self.params = params
        self.batch = batch
        self.counter = counter
        super().__init__(TREVISAN, seed, threads)
        self.design = build_design(params)

    @property
    def input_bits(self) -> int:
        return self.params.n_i

    @property
    def output_bits(self) -> int:
        return self.params.n_f

    @property
    def seed_bits(self) -> int:
        return self.params.d

    @property
    def epsilon_log2(self) -> float:
        return self.params.epsilon_log2

    def extract_block(self, block: BitVector) -> BitVector:
        return extract(block, self.seed, self.params, self.design, self.threads, self.batch, self.counter)

    def describe(self) -> Dict[str, Any]:
        out = super().describe()
        out.update(self.params.as_dict())
        out["design"] = self.design.summary()
        out["warnings"] = self.params.warnings()
        return out
