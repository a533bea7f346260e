"""
JSON codec shared by all report and state files
Complex numbers are [re, im] pairs, matrices are row-major nested lists
"""

import json
from pathlib import Path
from typing import Any, List, Union

import numpy as np

from core.errors import MalformedInputError


def encode_complex(z: complex) -> List[float]:
    """Encode one complex number as [re, im]"""
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(pair: Any) -> complex:
    """Decode an [re, im] pair (a bare real number is accepted too)"""
    if isinstance(pair, (int, float)) and not isinstance(pair, bool):
        return complex(float(pair), 0.0)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise MalformedInputError(f"Expected [re, im], got {pair!r}")
    try:
        return complex(float(pair[0]), float(pair[1]))
    except (TypeError, ValueError) as e:
        raise MalformedInputError(f"Non-numeric complex entry {pair!r}") from e


def encode_array(values: np.ndarray) -> Any:
    """Encode a complex vector or matrix as nested lists of [re, im]"""
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 0:
        return encode_complex(arr.item())
    return [encode_array(row) for row in arr]


def decode_array(data: Any, shape: tuple) -> np.ndarray:
    """
    Decode nested [re, im] lists and check the expected shape

    Args:
        data: Parsed JSON value
        shape: Required numpy shape

    Returns:
        Complex array of the given shape
    """
    def walk(node: Any, depth: int) -> Any:
        if depth == len(shape):
            return decode_complex(node)
        if not isinstance(node, list) or len(node) != shape[depth]:
            raise MalformedInputError(f"Expected an array of shape {shape}")
        return [walk(child, depth + 1) for child in node]

    arr = np.array(walk(data, 0), dtype=complex).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError("Array has non-finite entries")
    return arr


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into plain JSON values"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return encode_array(value)
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return encode_complex(value)
    return value


def dumps(payload: Any) -> str:
    """Serialize deterministically (sorted keys, fixed indent, trailing newline)"""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Union[str, Path], payload: Any) -> Path:
    """Write a JSON document, creating parent directories"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps(payload), encoding="utf-8")
    return target


def read_json(path: Union[str, Path]) -> Any:
    """
    Read a JSON document

    Raises:
        MalformedInputError: missing file or invalid JSON
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise MalformedInputError(f"Cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"Invalid JSON in {path}: {e.msg}",
                                  details={"line": e.lineno, "column": e.colno}) from e
