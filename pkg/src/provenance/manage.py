from collections import OrderedDict
from typing import Any, Dict, List

from src.common.errors import ContractError
from src.common.io import dump_json, save_json
from src.common.logging import logger


class ManifestManager:
    """
    Ordered provenance record of one pipeline run (input and seed digests, parameters,
    block policy, warnings, output digest), written as canonical JSON.

    Only deterministic facts go in: identical inputs give a byte-identical manifest,
    whatever the thread count.

    Attributes:
        _entries (OrderedDict[str, Any]): manifest entries in insertion order.
        _warnings (List[str]): warnings raised during the run.
    """

    def __init__(self) -> None:
        self._entries: OrderedDict[str, Any] = OrderedDict()
        self._warnings: List[str] = []

    def add_entry(self, key: str, value: Any) -> None:
        """
        Record `value` under `key`, replacing an earlier value.

        Raises:
            ContractError: If key is empty or None.
        """
        if not key:
            logger.error("The manifest key provided is empty or None.")
            raise ContractError("manifest key must not be empty")
        self._entries[key] = value
        logger.debug(f"Manifest entry recorded: {key}")

    def add_warning(self, message: str) -> None:
        if message not in self._warnings:
            self._warnings.append(message)

    def get_value(self, key: str) -> Any:
        return self._entries.get(key)

    @property
    def warnings(self) -> List[str]:
        return list(self._warnings)

    def to_dict(self) -> Dict[str, Any]:
        out = dict(self._entries)
        out["warnings"] = list(self._warnings)
        return out

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    def save(self, path: str) -> None:
        save_json(path, self.to_dict())
        logger.info(
            f"Provenance manifest written to {path} ({len(self._entries)} entries, {len(self._warnings)} warnings)"
        )

    def clear(self) -> None:
        self._entries.clear()
        self._warnings.clear()
