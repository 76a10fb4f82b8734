"""Canonical document serialization.

Journal records and snapshots must serialize byte-identically across
runs and platforms: keys sorted, compact separators, UTF-8, sets
flattened to sorted lists, dates as ISO 8601. Replay determinism and
journal diffing both rely on this single code path.
"""

from __future__ import annotations

import dataclasses
import json
from datetime import date, datetime
from enum import Enum
from typing import Any


def to_doc(value: Any) -> Any:
    """Convert a domain value into a plain JSON-ready document."""
    if isinstance(value, Enum):  # before the scalar pass: str-backed enums
        return to_doc(value.value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, date):
        return value.isoformat()
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_doc(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_doc(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(to_doc(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [to_doc(v) for v in value]
    raise TypeError(f"cannot canonicalize {type(value).__name__}")


def canonical_dumps(doc: Any) -> str:
    return json.dumps(to_doc(doc), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_line(doc: Any) -> bytes:
    """One canonical document terminated by a newline, UTF-8 encoded."""
    return (canonical_dumps(doc) + "\n").encode("utf-8")
