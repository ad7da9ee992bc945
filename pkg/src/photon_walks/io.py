"""Readers and writers for the CSV and JSON artifact formats.

Matrix CSV files carry ``# key=value`` header lines followed by N rows of
N comma-separated values in internal site order. Floats are written with
``repr`` so files round-trip exactly and are byte-stable. In correlation
files an absent pair is ``-1``; in other matrices a not-applicable entry
is ``nan``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .correlations import CorrelationMatrix
from .errors import ValidationError
from .measurement import ABSENT, CoincidenceCounts


def fmt(x) -> str:
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _header(meta: dict) -> list[str]:
    return [f"# {k}={v}" for k, v in meta.items()]


def matrix_csv(matrix, meta: dict | None = None, absent: str | None = None) -> str:
    lines = _header(meta or {})
    for row in np.asarray(matrix, dtype=float):
        cells = [absent if (absent is not None and math.isnan(x)) else fmt(x) for x in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def vector_csv(values, meta: dict | None = None) -> str:
    lines = _header(meta or {}) + [fmt(x) for x in np.asarray(values, dtype=float)]
    return "\n".join(lines) + "\n"


def _clean(obj):
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_clean(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (float, np.floating)):
        return None if math.isnan(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def to_json(payload: dict) -> str:
    """JSON text with NaN mapped to null and stable key order."""
    return json.dumps(_clean(payload), indent=1, sort_keys=True) + "\n"


def _split(text: str):
    meta, rows = {}, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        rows.append([c.strip() for c in line.split(",")])
    return meta, rows


def _floats(rows, path) -> np.ndarray:
    try:
        return np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric entry ({exc})") from exc


def read_matrix_csv(path):
    meta, rows = _split(Path(path).read_text())
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValidationError(f"{path}: expected a square matrix")
    return meta, _floats(rows, path)


def write_gamma_csv(path, cm: CorrelationMatrix) -> None:
    Path(path).write_text(gamma_csv(cm))


def gamma_meta(cm: CorrelationMatrix) -> dict:
    pair = "" if cm.input_pair is None else f"{cm.input_pair[0]},{cm.input_pair[1]}"
    flag = {True: "true", False: "false", None: "unknown"}[cm.indistinguishable]
    return {"input": pair, "indistinguishable": flag, "source": cm.source}


def gamma_csv(cm: CorrelationMatrix) -> str:
    return matrix_csv(cm.gamma, gamma_meta(cm), absent=str(ABSENT))


def read_gamma_csv(path) -> CorrelationMatrix:
    """Load a correlation matrix; ``-1`` and ``nan`` entries are absent."""
    meta, g = read_matrix_csv(path)
    g[(g == ABSENT) | np.isnan(g)] = np.nan
    pair = None
    if meta.get("input"):
        try:
            pair = tuple(int(x) for x in meta["input"].split(","))
        except ValueError:
            raise ValidationError(f"{path}: bad input pair {meta['input']!r}") from None
    flag = {"true": True, "false": False}.get(meta.get("indistinguishable", "").lower())
    return CorrelationMatrix(g, pair, flag, meta.get("source", "measured"))


def read_vector_csv(path) -> np.ndarray:
    _, rows = _split(Path(path).read_text())
    if any(len(r) != 1 for r in rows):
        raise ValidationError(f"{path}: expected one value per line")
    return _floats(rows, path)[:, 0] if rows else np.zeros(0)


def counts_csv(counts: CoincidenceCounts) -> str:
    lines = _header({"integration_s": repr(counts.integration_s)})
    for row in counts.upper_triangle():
        lines.append(",".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def sidecar_json(counts: CoincidenceCounts) -> str:
    data = {"efficiency": counts.efficiency.tolist()}
    if counts.singles is not None:
        data["singles"] = counts.singles.tolist()
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def write_counts(path, counts: CoincidenceCounts, sidecar=None) -> None:
    Path(path).write_text(counts_csv(counts))
    if sidecar is not None:
        Path(sidecar).write_text(sidecar_json(counts))


def read_counts(path, sidecar=None) -> CoincidenceCounts:
    """Load a counts CSV (plus optional singles/efficiency sidecar JSON)."""
    meta, c = read_matrix_csv(path)
    if not np.all(c == np.round(c)):
        raise ValidationError(f"{path}: counts must be integers")
    try:
        integration = float(meta.get("integration_s", 3600.0))
    except ValueError:
        raise ValidationError(f"{path}: bad integration_s") from None
    singles = efficiency = None
    if sidecar is not None:
        try:
            extra = json.loads(Path(sidecar).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{sidecar}: invalid JSON ({exc})") from exc
        singles = extra.get("singles")
        efficiency = extra.get("efficiency")
    return CoincidenceCounts.from_raw(c.astype(np.int64), singles, efficiency, integration)
