"""
Exception hierarchy shared by every toolkit module.

Each class carries a stable machine code and the exit status the CLI maps it to.
"""

from src.constants import EXIT_CONTRACT, EXIT_IO, EXIT_STATISTICAL


class ToolkitError(Exception):
    """Base class for all toolkit failures."""

    code = "TOOLKIT"
    exit_code = EXIT_CONTRACT

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def one_line(self) -> str:
        """Single machine-parseable line used by the CLI on stderr."""
        text = " ".join(self.message.split())
        return f"error={self.code} exit={self.exit_code} message={text}"


class ContractError(ToolkitError, ValueError):
    """A precondition of an operation was violated (lengths, field mismatch, ranges)."""

    code = "CONTRACT"


class SizingError(ContractError):
    """Extractor parameters cannot be sized (e.g. insufficient min-entropy)."""

    code = "SIZING"


class ConstructionError(ContractError):
    """A combinatorial object (weak design) cannot be built for the given parameters."""

    code = "CONSTRUCTION"


class BitIndexError(ContractError, IndexError):
    """A bit position lies outside a BitVector."""

    code = "INDEX"

    def __init__(self, position: int, length: int) -> None:
        super().__init__(f"bit position {position} out of range for length {length}")
        self.position = position
        self.length = length


class FormatError(ToolkitError):
    """A file does not follow the native or raw bit-file format."""

    code = "FORMAT"
    exit_code = EXIT_IO


class ToolkitIOError(ToolkitError):
    """Reading or writing a file failed."""

    code = "IO"
    exit_code = EXIT_IO


class StatisticalFailure(ToolkitError):
    """A statistical battery outcome contradicts the expected outcome."""

    code = "STATISTICAL"
    exit_code = EXIT_STATISTICAL
