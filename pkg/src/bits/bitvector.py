"""
Packed bit sequences shared by every extractor.

Bit i of a BitVector lives in byte i // 8 at bit position 7 - (i % 8), i.e. MSB-first
inside each byte. Unused trailing bits of the last byte are always zero.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.common.errors import BitIndexError, ContractError


def _payload_size(length_bits: int) -> int:
    return (length_bits + 7) // 8


@dataclass(frozen=True)
class BitVector:
    """
    Immutable packed bit string.

    Attributes:
        length_bits (int): Number of valid bits.
        payload (bytes): ceil(length_bits / 8) bytes, MSB-first, zero padded.
    """

    length_bits: int
    payload: bytes

    def __post_init__(self) -> None:
        if self.length_bits < 0:
            raise ContractError(f"negative bit length {self.length_bits}")
        if len(self.payload) != _payload_size(self.length_bits):
            raise ContractError(
                f"payload of {len(self.payload)} bytes does not hold exactly {self.length_bits} bits"
            )
        pad = (-self.length_bits) % 8
        if pad and self.payload[-1] & ((1 << pad) - 1):
            raise ContractError("unused trailing bits of the final byte must be zero")

    # ------------------------------------------------------------------ constructors

    @classmethod
    def empty(cls) -> "BitVector":
        return cls(0, b"")

    @classmethod
    def zeros(cls, length_bits: int) -> "BitVector":
        return cls(length_bits, bytes(_payload_size(length_bits)))

    @classmethod
    def from_numpy(cls, bits: np.ndarray) -> "BitVector":
        """Build from an array of 0/1 values (any integer or bool dtype)."""
        bits = np.asarray(bits, dtype=np.uint8).ravel()
        if bits.size and int(bits.max()) > 1:
            raise ContractError("bit array may only contain 0 and 1")
        return cls(int(bits.size), np.packbits(bits).tobytes())

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        return cls.from_numpy(np.fromiter((int(b) for b in bits), dtype=np.uint8))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse a string of '0'/'1' characters; spaces and underscores are ignored."""
        cleaned = text.replace(" ", "").replace("_", "")
        if any(ch not in "01" for ch in cleaned):
            raise ContractError(f"not a bit string: {text!r}")
        return cls.from_bits(int(ch) for ch in cleaned)

    @classmethod
    def from_bytes(cls, data: bytes, length_bits: Optional[int] = None) -> "BitVector":
        """Wrap raw bytes; an explicit shorter length truncates and re-zeroes the padding."""
        if length_bits is None:
            return cls(len(data) * 8, bytes(data))
        if length_bits > len(data) * 8:
            raise ContractError(f"{len(data)} bytes cannot hold {length_bits} bits")
        return cls.from_numpy(np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:length_bits])

    @classmethod
    def from_int(cls, value: int, length_bits: int) -> "BitVector":
        """Big-endian integer: bit 0 of the vector is the most significant of `length_bits` bits."""
        if value < 0 or value >> length_bits:
            raise ContractError(f"value does not fit in {length_bits} bits")
        pad = (-length_bits) % 8
        return cls(length_bits, (value << pad).to_bytes(_payload_size(length_bits), "big"))

    @classmethod
    def random(cls, length_bits: int, rng: np.random.Generator) -> "BitVector":
        return cls.from_numpy(rng.integers(0, 2, size=length_bits, dtype=np.uint8))

    # ------------------------------------------------------------------ views

    def __len__(self) -> int:
        return self.length_bits

    def __getitem__(self, index: int) -> int:
        if not -self.length_bits <= index < self.length_bits:
            raise BitIndexError(index, self.length_bits)
        index %= self.length_bits
        return (self.payload[index >> 3] >> (7 - (index & 7))) & 1

    def to_numpy(self) -> np.ndarray:
        """0/1 uint8 array of length `length_bits`."""
        return np.unpackbits(np.frombuffer(self.payload, dtype=np.uint8))[: self.length_bits]

    def to_int(self) -> int:
        """Big-endian integer value (bit 0 most significant)."""
        pad = (-self.length_bits) % 8
        return int.from_bytes(self.payload, "big") >> pad

    def to_string(self) -> str:
        return "".join(str(b) for b in self.to_numpy())

    def count_ones(self) -> int:
        return int.from_bytes(self.payload, "big").bit_count()

    def is_zero(self) -> bool:
        return not any(self.payload)

    def slice(self, start: int, stop: int) -> "BitVector":
        if not 0 <= start <= stop <= self.length_bits:
            raise ContractError(f"slice [{start}, {stop}) outside length {self.length_bits}")
        if start % 8 == 0 and stop % 8 == 0:
            return BitVector(stop - start, self.payload[start // 8 : stop // 8])
        return BitVector.from_numpy(self.to_numpy()[start:stop])

    def xor(self, other: "BitVector") -> "BitVector":
        if self.length_bits != other.length_bits:
            raise ContractError(f"xor of lengths {self.length_bits} and {other.length_bits}")
        data = (np.frombuffer(self.payload, dtype=np.uint8) ^ np.frombuffer(other.payload, dtype=np.uint8)).tobytes()
        return BitVector(self.length_bits, data)

    def __xor__(self, other: "BitVector") -> "BitVector":
        return self.xor(other)

    def concat(self, other: "BitVector") -> "BitVector":
        if self.length_bits % 8 == 0:
            return BitVector.from_bytes(self.payload + other.payload, self.length_bits + other.length_bits)
        return BitVector.from_numpy(np.concatenate([self.to_numpy(), other.to_numpy()]))

    def __repr__(self) -> str:
        if self.length_bits <= 64:
            return f"BitVector({self.to_string() or 'empty'})"
        return f"BitVector(length_bits={self.length_bits}, head={self.payload[:8].hex()}...)"


def concat_all(vectors: Sequence[BitVector]) -> BitVector:
    """Concatenate many vectors in order."""
    if not vectors:
        return BitVector.empty()
    if all(v.length_bits % 8 == 0 for v in vectors):
        return BitVector.from_bytes(b"".join(v.payload for v in vectors))
    return BitVector.from_numpy(np.concatenate([v.to_numpy() for v in vectors]))


def gather(v: BitVector, positions: Sequence[int]) -> BitVector:
    """
    Select bits of `v` at `positions` (repeats allowed): output bit j equals v[positions[j]].

    Raises:
        BitIndexError: naming the first position outside [0, v.length_bits).
    """
    index = np.asarray(positions, dtype=np.int64).ravel()
    if index.size == 0:
        return BitVector.empty()
    bad = np.flatnonzero((index < 0) | (index >= v.length_bits))
    if bad.size:
        raise BitIndexError(int(index[bad[0]]), v.length_bits)
    return BitVector.from_numpy(v.to_numpy()[index])


def inner_product_gf2(a: BitVector, b: BitVector) -> int:
    """
    Parity of the bitwise AND of two equal-length vectors.
    """
    if a.length_bits != b.length_bits:
        raise ContractError(f"inner product of lengths {a.length_bits} and {b.length_bits}")
    overlap = int.from_bytes(a.payload, "big") & int.from_bytes(b.payload, "big")
    return overlap.bit_count() & 1


def split_blocks(v: BitVector, block_bits: int) -> Tuple[List[BitVector], int]:
    """
    Partition `v` into consecutive blocks of `block_bits` bits.

    Returns:
        (blocks, leftover): the full blocks in order and the count of trailing bits dropped.
    """
    if block_bits <= 0:
        raise ContractError(f"block size must be positive, got {block_bits}")
    count = v.length_bits // block_bits
    if block_bits % 8 == 0:
        step = block_bits // 8
        blocks = [BitVector(block_bits, v.payload[i * step : (i + 1) * step]) for i in range(count)]
    else:
        bits = v.to_numpy()
        blocks = [BitVector.from_numpy(bits[i * block_bits : (i + 1) * block_bits]) for i in range(count)]
    return blocks, v.length_bits - count * block_bits


def samples_to_bits(codes: np.ndarray, bits_per_sample: int) -> BitVector:
    """
    Serialise ADC codes as `bits_per_sample` bits each, MSB-first.
    """
    codes = np.asarray(codes, dtype=np.uint32).ravel()
    if codes.size and int(codes.max()) >> bits_per_sample:
        raise ContractError(f"sample code exceeds {bits_per_sample} bits")
    if bits_per_sample == 8:
        return BitVector.from_bytes(codes.astype(np.uint8).tobytes())
    shifts = np.arange(bits_per_sample - 1, -1, -1, dtype=np.uint32)
    bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    return BitVector.from_numpy(bits.ravel())
