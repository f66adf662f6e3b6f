"""Deterministic fingerprints for configs, arrays and files."""

from __future__ import annotations

from collections.abc import Mapping
import hashlib
from pathlib import Path
from typing import Any

import numpy as np
import orjson


def canonical_json(payload: Mapping[str, Any]) -> bytes:
    """Sorted-key compact JSON; equal payloads always give equal bytes."""
    return orjson.dumps(
        payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
    )


def payload_hash(payload: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(payload)).hexdigest()


def array_hash(array: np.ndarray) -> str:
    """Hash of dtype, shape and little-endian contents."""
    contiguous = np.ascontiguousarray(array)
    little = contiguous.astype(contiguous.dtype.newbyteorder("<"))
    digest = hashlib.sha256()
    digest.update(little.dtype.str.encode())
    digest.update(str(little.shape).encode())
    digest.update(little.tobytes())
    return digest.hexdigest()


def file_hash(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
