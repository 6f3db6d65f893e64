"""JSON diagnostics: conversion of numpy and complex values, stable writing."""

import hashlib
import json
import math
from pathlib import Path
from typing import Any, List, Union

import numpy as np


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and complex numbers.

    Complex values become [re, im]; infinities and NaN become strings.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(data: Any) -> str:
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


def write_json(data: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    return path


def key_paths(data: Any, prefix: str = "") -> List[str]:
    """Sorted dotted key paths of nested dicts; list entries share one path."""
    out = []
    if isinstance(data, dict):
        for k, v in data.items():
            path = f"{prefix}.{k}" if prefix else str(k)
            out.append(path)
            out.extend(key_paths(v, path))
    elif isinstance(data, list):
        for v in data:
            out.extend(key_paths(v, prefix + "[]"))
    return sorted(set(out))


def schema_digest(data: Any) -> str:
    """sha256 of the key structure of a report, independent of its values."""
    return hashlib.sha256("\n".join(key_paths(to_jsonable(data))).encode("utf-8")).hexdigest()
