"""
Bit-exact file formats.

native: b"RXBV" + uint64 little-endian bit count + payload bytes.
raw:    payload bytes only (byte-multiple lengths), the input format of external
        statistical suites such as DIEHARD, NIST STS and TestU01.
"""

import struct

from src.bits.bitvector import BitVector
from src.common.errors import ContractError, FormatError
from src.common.io import ensure_parent_directory
from src.common.logging import logger
from src.constants import BITFILE_LENGTH_BYTES, BITFILE_MAGIC, BIT_FORMATS, FORMAT_NATIVE, FORMAT_RAW

_HEADER = struct.Struct("<4sQ")


def write_bits(v: BitVector, path: str, fmt: str = FORMAT_NATIVE) -> None:
    """
    Write `v` to `path` in the native (length-carrying) or raw format.
    """
    if fmt not in BIT_FORMATS:
        raise ContractError(f"unknown bit format '{fmt}'")
    if fmt == FORMAT_RAW and v.length_bits % 8:
        raise FormatError(f"raw format needs a byte multiple, got {v.length_bits} bits")

    ensure_parent_directory(path)
    try:
        with open(path, "wb") as file:
            if fmt == FORMAT_NATIVE:
                file.write(_HEADER.pack(BITFILE_MAGIC, v.length_bits))
            file.write(v.payload)
    except OSError as e:
        logger.error(f"Failed to write bit file {path}: {e}")
        raise
    logger.info(f"Wrote {v.length_bits} bits to {path} ({fmt})")


def read_bits(path: str, fmt: str = FORMAT_NATIVE) -> BitVector:
    """
    Load a whole bit file written by `write_bits`.
    """
    if fmt not in BIT_FORMATS:
        raise ContractError(f"unknown bit format '{fmt}'")
    try:
        with open(path, "rb") as file:
            data = file.read()
    except OSError as e:
        logger.error(f"Failed to read bit file {path}: {e}")
        raise

    if fmt == FORMAT_RAW:
        return BitVector.from_bytes(data)

    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(data)} bytes)")
    magic, length_bits = _HEADER.unpack_from(data)
    if magic != BITFILE_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    payload = data[len(BITFILE_MAGIC) + BITFILE_LENGTH_BYTES :]
    expected = (length_bits + 7) // 8
    if len(payload) != expected:
        raise FormatError(f"{path}: header announces {length_bits} bits but payload has {len(payload)} bytes")
    try:
        return BitVector(length_bits, payload)
    except ContractError as e:
        raise FormatError(f"{path}: {e}") from e
