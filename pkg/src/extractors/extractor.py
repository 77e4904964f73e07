import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from tqdm import tqdm

from src.bits.bitvector import BitVector, concat_all, split_blocks
from src.common.errors import ContractError
from src.common.logging import logger


def log2_sum_of_copies(epsilon_log2: float, copies: int) -> float:
    """log2(copies * 2^epsilon_log2): security parameters add up across blocks."""
    if copies <= 0:
        return float("-inf")
    return epsilon_log2 + math.log2(copies)


@dataclass(frozen=True)
class ExtractionResult:
    """
    Output of a block-partitioned extraction run.
    """

    output: BitVector
    blocks: int
    block_input_bits: int
    block_output_bits: int
    leftover_bits: int
    zero_blocks: int
    epsilon_log2_per_block: float
    epsilon_log2_total: float

    def as_dict(self) -> Dict[str, Any]:
        return {
            "blocks": self.blocks,
            "block_input_bits": self.block_input_bits,
            "block_output_bits": self.block_output_bits,
            "leftover_bits": self.leftover_bits,
            "zero_blocks": self.zero_blocks,
            "output_bits": self.output.length_bits,
            "epsilon_log2_per_block": self.epsilon_log2_per_block,
            "epsilon_log2_total": self.epsilon_log2_total,
        }


class Extractor(ABC):
    """
    Abstract base class for seeded extractors processing fixed-size input blocks.
    Each extractor must implement `extract_block`; long inputs are split into independent
    blocks that all reuse the same seed (valid for strong extractors).
    """

    # Whether whole blocks are farmed out to worker threads (otherwise the subclass
    # parallelises inside a block).
    parallel_blocks = True

    def __init__(self, name: str, seed: BitVector, threads: int = 1) -> None:
        """
        Initializes the Extractor with a name, seed and worker count.
        """
        if threads < 1:
            raise ContractError(f"thread count must be >= 1, got {threads}")
        if seed.length_bits != self.seed_bits:
            raise ContractError(f"{name} needs a {self.seed_bits}-bit seed, got {seed.length_bits} bits")
        self.name = name
        self.seed = seed
        self.threads = threads
        logger.info(
            f"Extractor {self.name} initialized: {self.input_bits} -> {self.output_bits} bits, "
            f"seed {self.seed_bits} bits, threads={threads}."
        )

    @property
    @abstractmethod
    def input_bits(self) -> int:
        raise NotImplementedError

    @property
    @abstractmethod
    def output_bits(self) -> int:
        raise NotImplementedError

    @property
    @abstractmethod
    def seed_bits(self) -> int:
        raise NotImplementedError

    @property
    @abstractmethod
    def epsilon_log2(self) -> float:
        """log2 of the per-block security parameter."""
        raise NotImplementedError

    @abstractmethod
    def extract_block(self, block: BitVector) -> BitVector:
        """
        Abstract method mapping one `input_bits` block to `output_bits` output bits.
        """
        raise NotImplementedError(f"{self.__class__.__name__} has not implemented the 'extract_block' method.")

    def describe(self) -> Dict[str, Any]:
        return {
            "extractor": self.name,
            "input_bits": self.input_bits,
            "output_bits": self.output_bits,
            "seed_bits": self.seed_bits,
            "epsilon_log2": self.epsilon_log2,
        }

    def extract_stream(
        self, data: BitVector, max_blocks: Optional[int] = None, progress: bool = False
    ) -> ExtractionResult:
        """
        Split `data` into blocks, extract each with the shared seed and concatenate in block order.
        """
        blocks, leftover = split_blocks(data, self.input_bits)
        if max_blocks is not None:
            leftover += (len(blocks) - min(len(blocks), max_blocks)) * self.input_bits
            blocks = blocks[:max_blocks]
        if not blocks:
            raise ContractError(f"{self.name}: input of {data.length_bits} bits holds no {self.input_bits}-bit block")

        zero_blocks = sum(1 for block in blocks if block.is_zero())
        if zero_blocks:
            logger.warning(
                f"{self.name}: {zero_blocks} all-zero input block(s); a linear extractor maps them to zero output"
            )
        if leftover:
            logger.warning(f"{self.name}: {leftover} trailing input bits do not fill a block and are dropped")

        outputs = self._map_blocks(blocks, progress)
        total = log2_sum_of_copies(self.epsilon_log2, len(blocks))
        logger.info(
            f"{self.name}: extracted {len(blocks)} block(s) -> {len(blocks) * self.output_bits} bits, "
            f"total log2(eps) = {total:.3f}"
        )
        return ExtractionResult(
            output=concat_all(outputs),
            blocks=len(blocks),
            block_input_bits=self.input_bits,
            block_output_bits=self.output_bits,
            leftover_bits=leftover,
            zero_blocks=zero_blocks,
            epsilon_log2_per_block=self.epsilon_log2,
            epsilon_log2_total=total,
        )

    def _map_blocks(self, blocks: List[BitVector], progress: bool) -> List[BitVector]:
        bar = tqdm(total=len(blocks), desc=self.name, unit="block", disable=not progress)
        try:
            if self.threads == 1 or not self.parallel_blocks or len(blocks) == 1:
                outputs = []
                for block in blocks:
                    outputs.append(self.extract_block(block))
                    bar.update(1)
                return outputs
            # Executor.map yields in submission order, so output order never depends on scheduling.
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                outputs = []
                for out in pool.map(self.extract_block, blocks):
                    outputs.append(out)
                    bar.update(1)
                return outputs
        finally:
            bar.close()
