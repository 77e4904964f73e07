import hashlib
import json
import os
from typing import Any, Dict

from src.common.logging import logger


def load_json(filename: str) -> Dict[str, Any]:
    """
    Load a JSON file and return its contents.
    """
    try:
        with open(filename, "r") as file:
            return json.load(file)
    except FileNotFoundError:
        logger.error(f"File '{filename}' not found.")
        raise
    except json.JSONDecodeError:
        logger.error(f"File '{filename}' contains invalid JSON.")
        raise


def dump_json(data: Dict[str, Any]) -> str:
    """
    Canonical JSON text (sorted keys, two-space indent) used for reports and manifests.
    """
    return json.dumps(data, indent=2, sort_keys=True)


def save_json(filename: str, data: Dict[str, Any]) -> None:
    """
    Save data to a JSON file in canonical form.
    """
    try:
        directory = os.path.dirname(filename)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(filename, "w") as file:
            file.write(dump_json(data))
            file.write("\n")
        logger.info(f"Data saved to {filename}")
    except OSError as e:
        logger.error(f"Error saving JSON file: {e}")
        raise


def ensure_directory_exists(path: str) -> None:
    """
    Ensure that the directory exists, creating it if it doesn't.
    """
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        logger.error(f"Failed to create directory at {path}: {str(e)}")
        raise


def ensure_parent_directory(path: str) -> None:
    """
    Ensure the directory holding `path` exists.
    """
    directory = os.path.dirname(path)
    if directory:
        ensure_directory_exists(directory)


def sha256_file(path: str, chunk_size: int = 1 << 20) -> str:
    """
    Hex SHA-256 digest of a file, read in chunks.
    """
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as file:
            for chunk in iter(lambda: file.read(chunk_size), b""):
                digest.update(chunk)
    except OSError as e:
        logger.error(f"Failed to digest {path}: {e}")
        raise
    return digest.hexdigest()


def sha256_bytes(data: bytes) -> str:
    """
    Hex SHA-256 digest of an in-memory byte string.
    """
    return hashlib.sha256(data).hexdigest()
