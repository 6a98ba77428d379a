"""Bit-stable artifact serialization.

All experiment outputs go through the two writers below.  JSON is emitted by
a small canonical serializer instead of ``json.dumps`` so that the byte
stream is a pure function of the data: keys sorted, floats always printed
with 17 significant digits (round-trip exact for IEEE doubles), no
locale- or platform-dependent formatting, ``\n`` newlines everywhere.  CSV
cells use the same float format.  Re-running a command with the same config
and seed must reproduce every artifact byte for byte, and these writers are
what makes that contract checkable with a plain file compare.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, InvalidParameterError

__all__ = [
    "format_float",
    "canonical_json",
    "write_json",
    "write_csv",
    "read_config",
]

_INDENT = "  "


def format_float(x: float) -> str:
    """``%.17g`` rendering of a finite float; integers keep a trailing ``.0``
    marker off (JSON numbers carry no type tag anyway)."""
    if not np.isfinite(x):
        raise InvalidParameterError(f"cannot serialize non-finite value {x!r}")
    return "%.17g" % x


def _emit(obj: Any, out: list[str], depth: int) -> None:
    pad = _INDENT * depth
    inner = _INDENT * (depth + 1)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append("null" if obj is None else ("true" if obj else "false"))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, Mapping):
        keys = sorted(obj)
        if not keys:
            out.append("{}")
            return
        out.append("{\n")
        for i, k in enumerate(keys):
            if not isinstance(k, str):
                raise InvalidParameterError("JSON object keys must be strings")
            out.append(inner + json.dumps(k, ensure_ascii=True) + ": ")
            _emit(obj[k], out, depth + 1)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(items):
            out.append(inner)
            _emit(v, out, depth + 1)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "]")
    else:
        raise InvalidParameterError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    parts: list[str] = []
    _emit(obj, parts, 0)
    return "".join(parts) + "\n"


def write_json(path: str | Path, obj: Any) -> Path:
    p = Path(path)
    p.write_text(canonical_json(obj), encoding="ascii", newline="\n")
    return p


def _cell(v: Any) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_float(float(v))


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    *,
    provenance: Mapping[str, Any] | None = None,
) -> Path:
    """Write rows under a comma-joined header.

    When ``provenance`` is given it is embedded as a single leading comment
    line ``# {...}`` (compact canonical JSON), so the CSV carries its resolved
    config and seed like every other artifact.
    """
    lines: list[str] = []
    if provenance is not None:
        blob = canonical_json(provenance).replace("\n", " ").strip()
        while "  " in blob:
            blob = blob.replace("  ", " ")
        lines.append("# " + blob)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    p = Path(path)
    p.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")
    return p


def read_config(path: str | Path) -> dict:
    """Parse a JSON config file; malformed text raises ``ConfigError``
    (a config error, never a runtime error)."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg
