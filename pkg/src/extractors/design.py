"""
Block weak design for Trevisan's extractor.

Seed bits are split into b blocks of q^2 bits (q = 2^m_d). Block t hosts sets that are
graphs of distinct polynomials of degree < t over GF(q), restricted to the first 2*m_e
field points and offset into the block's seed segment:

    S = {(t - 1) * q^2 + x * q + p(x) : x = 0 .. 2*m_e - 1}

Worked example (q = 4, m_e = 2): the constant polynomial p = 3 in block 1 yields
S = {3, 7, 11, 15}; p(x) = 1 + x in block 2 yields S = {16 + 1, 16 + 4 + 0, 16 + 8 + 3, 16 + 12 + 2}.

Two distinct polynomials of degree < c agree on at most c - 1 points, which bounds
every same-block intersection by c - 1.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, List, Tuple

import numpy as np

from src.common.errors import ConstructionError, ContractError
from src.common.logging import logger
from src.extractors.small_field import digits, evaluate_polynomials

if TYPE_CHECKING:
    from src.extractors.trevisan import TrevisanParams


@dataclass(frozen=True)
class DesignBlock:
    """One seed block of the design."""

    t: int  # 1-based block number, also the degree bound c_t
    capacity: int
    first_output: int

    @property
    def degree_bound(self) -> int:
        return self.t

    @property
    def stop_output(self) -> int:
        return self.first_output + self.capacity


def block_capacities(q: int, n_f: int, blocks: int) -> List[int]:
    """
    Set capacities per block: min(q, n_f) for block 1 and floor(n_f / 2^(t-1)) for t >= 2,
    each also bounded by the q^t polynomials of degree < t.
    """
    capacities = []
    for t in range(1, blocks + 1):
        if t == 1:
            cap = min(q, n_f)
        else:
            cap = min(q**t, n_f >> (t - 1))
        capacities.append(cap)
    return capacities


class WeakDesign:
    """
    n_f seed-index sets of size 2*m_e, regenerated on demand from the parameters.
    """

    def __init__(self, m_e: int, m_d: int, n_f: int, blocks: int) -> None:
        self.m_e = m_e
        self.m_d = m_d
        self.n_f = n_f
        self.q = 1 << m_d
        self.set_size = 2 * m_e
        self.block_bits = self.q * self.q
        self.seed_bits = blocks * self.block_bits
        if self.set_size > self.q:
            raise ConstructionError(f"2*m_e = {self.set_size} exceeds the {self.q} points of GF(2^{m_d})")

        capacities = block_capacities(self.q, n_f, blocks)
        total = sum(capacities)
        if total < n_f:
            raise ConstructionError(
                f"design capacity {total} across {blocks} blocks is short of n_f = {n_f} by {n_f - total}"
            )

        self.blocks: List[DesignBlock] = []
        placed = 0
        for t, cap in enumerate(capacities, start=1):
            take = min(cap, n_f - placed)
            if take <= 0:
                break
            self.blocks.append(DesignBlock(t=t, capacity=take, first_output=placed))
            placed += take
        self._block_starts = np.array([blk.first_output for blk in self.blocks], dtype=np.int64)
        self._points = np.arange(self.set_size, dtype=np.int64)
        logger.info(
            f"Weak design built: n_f={n_f}, q={self.q}, set size={self.set_size}, "
            f"blocks used={len(self.blocks)}/{blocks}, capacities={[b.capacity for b in self.blocks]}"
        )

    @classmethod
    def from_params(cls, params: "TrevisanParams") -> "WeakDesign":
        return cls(params.m_e, params.m_d, params.n_f, params.b)

    # ------------------------------------------------------------------ lookup

    def locate(self, i: int) -> Tuple[DesignBlock, int]:
        """Block hosting output index `i` and the integer encoding of its polynomial."""
        if not 0 <= i < self.n_f:
            raise ContractError(f"output index {i} outside 0..{self.n_f - 1}")
        pos = int(np.searchsorted(self._block_starts, i, side="right")) - 1
        block = self.blocks[pos]
        return block, i - block.first_output

    def polynomial(self, i: int) -> List[int]:
        """Coefficients (constant first) of the polynomial behind set i."""
        block, encoding = self.locate(i)
        return [int(c) for c in digits(np.array([encoding]), self.q, block.degree_bound)[0]]

    def indices(self, i: int) -> np.ndarray:
        """Ordered seed-bit indices of set S_i."""
        return self.index_matrix(i, i + 1)[0]

    def block_values(self, block: DesignBlock, start: int = 0, stop: int = None) -> np.ndarray:
        """Polynomial values p(x) for the block's local sets [start, stop)."""
        stop = block.capacity if stop is None else stop
        encodings = np.arange(start, stop, dtype=np.int64)
        coeffs = digits(encodings, self.q, block.degree_bound)
        return evaluate_polynomials(coeffs, self._points, self.m_d)

    def index_matrix(self, start: int, stop: int) -> np.ndarray:
        """
        Seed indices of sets [start, stop) as an int64 array of shape (stop - start, 2*m_e).
        """
        if not 0 <= start <= stop <= self.n_f:
            raise ContractError(f"index range [{start}, {stop}) outside 0..{self.n_f}")
        out = np.empty((stop - start, self.set_size), dtype=np.int64)
        column_base = self._points * self.q
        for block in self.blocks:
            lo = max(start, block.first_output)
            hi = min(stop, block.stop_output)
            if lo >= hi:
                continue
            values = self.block_values(block, lo - block.first_output, hi - block.first_output)
            offset = (block.t - 1) * self.block_bits
            out[lo - start : hi - start] = offset + column_base[None, :] + values
        return out

    # ------------------------------------------------------------------ verification

    def verify_exhaustive(self) -> int:
        """
        Check the per-block overlap contract for every set:
            sum over earlier same-block sets j of 2^|S_i & S_j| <= n_f.

        Returns:
            int: the largest sum observed.

        Raises:
            ConstructionError: naming the first violating set.
        """
        worst = 0
        for block in self.blocks:
            values = self.block_values(block)
            for local in range(1, block.capacity):
                # Equal entries can only meet in the same x column.
                overlaps = (values[:local] == values[local][None, :]).sum(axis=1)
                total = int(np.sum(np.left_shift(np.int64(1), overlaps.astype(np.int64))))
                worst = max(worst, total)
                if total > self.n_f:
                    raise ConstructionError(
                        f"set {block.first_output + local} in block {block.t} has overlap sum {total} > {self.n_f}"
                    )
        return worst

    def sample_overlaps(self, pairs: int, rng: np.random.Generator) -> Dict[str, int]:
        """
        Draw random same-block pairs and compare |S_i & S_j| with the degree bound c_t - 1.
        """
        weights = np.array([blk.capacity for blk in self.blocks if blk.capacity > 1], dtype=np.float64)
        candidates = [blk for blk in self.blocks if blk.capacity > 1]
        if not candidates:
            return {"pairs": 0, "max_overlap": 0, "violations": 0}
        choice = rng.choice(len(candidates), size=pairs, p=weights / weights.sum())
        max_overlap = 0
        violations = 0
        for pos, block in enumerate(candidates):
            n = int(np.count_nonzero(choice == pos))
            if not n:
                continue
            values = self.block_values(block)
            a = rng.integers(0, block.capacity, size=n)
            b = (a + rng.integers(1, block.capacity, size=n)) % block.capacity
            overlaps = (values[a] == values[b]).sum(axis=1)
            max_overlap = max(max_overlap, int(overlaps.max()))
            violations += int(np.count_nonzero(overlaps > block.degree_bound - 1))
        return {"pairs": pairs, "max_overlap": max_overlap, "violations": violations}

    def summary(self) -> Dict[str, Any]:
        """JSON-friendly description; the index table itself is regenerated, never stored."""
        return {
            "n_f": self.n_f,
            "q": self.q,
            "set_size": self.set_size,
            "seed_bits": self.seed_bits,
            "blocks": [
                {
                    "t": blk.t,
                    "degree_bound": blk.degree_bound,
                    "capacity": blk.capacity,
                    "first_output": blk.first_output,
                }
                for blk in self.blocks
            ],
        }
