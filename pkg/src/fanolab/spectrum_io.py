"""File formats: spectrum CSV, generic column CSV, and deterministic JSON.

The spectrum format is a two-column CSV with header ``epsilon,intensity``,
``.`` decimal point, ``\\n`` line endings, and 17 significant digits so a
write/read cycle is lossless for IEEE doubles. CSV files are the
authoritative artifacts; JSON carries reports and resolved configurations
with sorted keys so repeated runs produce byte-identical files.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from .estimation import Spectrum

__all__ = [
    "SPECTRUM_HEADER",
    "format_value",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_columns_csv",
    "read_columns_csv",
    "write_json",
    "to_jsonable",
    "sha256_of_file",
]

SPECTRUM_HEADER = "epsilon,intensity"


def format_value(x: float) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def write_spectrum_csv(spec: Spectrum, path: Union[str, Path]) -> Path:
    """Write a spectrum as `epsilon,intensity` CSV with \\n line endings."""
    path = Path(path)
    lines = [SPECTRUM_HEADER]
    lines.extend(
        f"{format_value(e)},{format_value(i)}"
        for e, i in zip(spec.epsilon, spec.intensity)
    )
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")
    return path


def read_spectrum_csv(path: Union[str, Path]) -> Spectrum:
    """Read a spectrum CSV; meta records the source path and content hash."""
    path = Path(path)
    raw = path.read_bytes()
    text = raw.decode("ascii")
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip()]
    if not lines or lines[0].strip() != SPECTRUM_HEADER:
        raise ValueError(f"{path}: expected header {SPECTRUM_HEADER!r}")
    eps, inten = [], []
    for k, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}:{k}: expected 2 comma-separated values")
        eps.append(float(parts[0]))
        inten.append(float(parts[1]))
    meta = {
        "kind": "file",
        "path": str(path),
        "sha256": hashlib.sha256(raw).hexdigest(),
    }
    return Spectrum(np.asarray(eps), np.asarray(inten), meta)


def write_columns_csv(
    path: Union[str, Path],
    headers: Sequence[str],
    columns: Sequence[np.ndarray],
) -> Path:
    """Write named columns as CSV with the spectrum conventions."""
    if len(headers) != len(columns):
        raise ValueError("one header per column required")
    cols = [np.asarray(c, dtype=float) for c in columns]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("all columns must have equal length")
    if any("," in h or "\n" in h for h in headers):
        raise ValueError("headers must not contain commas or newlines")
    path = Path(path)
    lines = [",".join(headers)]
    lines.extend(
        ",".join(format_value(c[i]) for c in cols) for i in range(n)
    )
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")
    return path


def read_columns_csv(path: Union[str, Path]) -> tuple[list[str], list[np.ndarray]]:
    """Read a column CSV written by ``write_columns_csv``."""
    lines = [
        ln for ln in Path(path).read_text(encoding="ascii").split("\n") if ln.strip()
    ]
    if not lines:
        raise ValueError(f"{path}: empty file")
    headers = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    if any(len(r) != len(headers) for r in rows):
        raise ValueError(f"{path}: ragged rows")
    data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(headers)))
    return headers, [data[:, j] for j in range(len(headers))]


def to_jsonable(obj: Any) -> Any:
    """Convert nested values to strict-JSON types (NaN/inf become null)."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(obj: Any, path: Union[str, Path]) -> Path:
    """Write an object as deterministic JSON (sorted keys, strict values)."""
    path = Path(path)
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="ascii", newline="\n")
    return path


def sha256_of_file(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
