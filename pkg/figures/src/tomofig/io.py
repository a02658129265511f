"""Schema-validated readers for the tomography toolkit's serialized outputs.

Every reader takes a path, checks the documented header/keys before
touching any values, and converts cells with errors that name the
offending column (or JSON key), the row, and the file. The renderer never
computes physics — these readers only deserialize what the simulation
side persisted.

Documented schemas (all CSV files are UTF-8, comma-separated, header row
mandatory):

- results CSV:    time, rep_id, mask, n_1..n_k, mean_S, stderr
- fit-points CSV: time, n0, rep_id, mask, mean_S, fitted_S, residual
- mutual-information CSV: time, j, mean_I, stderr
- half-chain CSV: time, mean_S, stderr
- fits JSON:      list of {L, n0, protocol, time, S0, omega, r2, rank_flag, ...}
- spectral JSON:  {protocol, L, mean_r, histogram: {bin_edges, densities},
                   references: {goe, coe, poisson}, ...}
- haar JSON:      {L, n_up, mask, n_samples, mean_entropy_bits, stderr, ...}
"""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .errors import SchemaError

_N_COLUMN = re.compile(r"^n_(\d+)$")


# ---------------------------------------------------------------------------
# CSV plumbing


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: empty file, expected a header row")
    header, body = rows[0], rows[1:]
    width = len(header)
    for i, row in enumerate(body, start=2):
        if len(row) != width:
            raise SchemaError(f"{path}: row {i} has {len(row)} cells, header has {width}")
    return header, body


def _require_columns(path: Path, header: list[str], required: tuple[str, ...]) -> None:
    for name in required:
        if name not in header:
            raise SchemaError(f"{path}: missing column '{name}' (header: {', '.join(header)})")
    seen = set()
    for name in header:
        if name in seen:
            raise SchemaError(f"{path}: duplicate column '{name}'")
        seen.add(name)


def _numeric_column(path: Path, header: list[str], body: list[list[str]],
                    name: str) -> np.ndarray:
    idx = header.index(name)
    values = np.empty(len(body))
    for i, row in enumerate(body):
        try:
            values[i] = float(row[idx])
        except ValueError as exc:
            raise SchemaError(
                f"{path}: column '{name}' row {i + 2}: cannot parse {row[idx]!r} "
                f"as a number") from exc
    return values


def _load_columns(path: str | Path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    path = Path(path)
    header, body = _read_rows(path)
    _require_columns(path, header, required)
    if not body:
        raise SchemaError(f"{path}: no data rows")
    return {name: _numeric_column(path, header, body, name) for name in required}


def load_results(path: str | Path) -> dict[str, np.ndarray]:
    """Per-representative entropy table; returns the fixed columns plus the
    bond-count matrix under key ``"n"`` (columns n_1..n_k in order)."""
    path = Path(path)
    header, body = _read_rows(path)
    _require_columns(path, header, ("time", "rep_id", "mask", "mean_S", "stderr"))
    orders = sorted(int(m.group(1)) for name in header if (m := _N_COLUMN.match(name)))
    if not orders:
        raise SchemaError(f"{path}: missing column 'n_1' (no bond-count columns at all)")
    if orders != list(range(1, len(orders) + 1)):
        raise SchemaError(f"{path}: bond-count columns must be contiguous n_1..n_k, "
                          f"found {', '.join(f'n_{j}' for j in orders)}")
    if not body:
        raise SchemaError(f"{path}: no data rows")
    table = {name: _numeric_column(path, header, body, name)
             for name in ("time", "rep_id", "mask", "mean_S", "stderr")}
    table["n"] = np.column_stack(
        [_numeric_column(path, header, body, f"n_{j}") for j in orders])
    return table


def load_fit_points(path: str | Path) -> dict[str, np.ndarray]:
    return _load_columns(path, ("time", "n0", "rep_id", "mask",
                                "mean_S", "fitted_S", "residual"))


def load_mutual_information(path: str | Path) -> dict[str, np.ndarray]:
    return _load_columns(path, ("time", "j", "mean_I", "stderr"))


def load_half_chain(path: str | Path) -> dict[str, np.ndarray]:
    return _load_columns(path, ("time", "mean_S", "stderr"))


# ---------------------------------------------------------------------------
# JSON plumbing


def _read_json(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc


def _require_key(path: Path, mapping, key: str, context: str = ""):
    where = f"{context}." if context else ""
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaError(f"{path}: missing key '{where}{key}'")
    return mapping[key]


def _as_float(path: Path, value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}: key '{key}': expected a number, got {value!r}")
    return float(value)


def _as_float_list(path: Path, value, key: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise SchemaError(f"{path}: key '{key}': expected a non-empty list of numbers")
    return np.array([_as_float(path, x, f"{key}[{i}]") for i, x in enumerate(value)])


def load_fits(path: str | Path) -> list[dict]:
    """Bond-tension fit records: one dict per (time, n0) slice with keys
    L, n0, protocol, time, S0, omega (list, one tension per bond distance),
    and r2."""
    path = Path(path)
    payload = _read_json(path)
    if not isinstance(payload, list) or not payload:
        raise SchemaError(f"{path}: expected a non-empty list of fit records")
    records = []
    for i, raw in enumerate(payload):
        context = f"[{i}]"
        record = {
            "L": int(_as_float(path, _require_key(path, raw, "L", context), f"{context}.L")),
            "n0": int(_as_float(path, _require_key(path, raw, "n0", context), f"{context}.n0")),
            "protocol": str(_require_key(path, raw, "protocol", context)),
            "time": _as_float(path, _require_key(path, raw, "time", context), f"{context}.time"),
            "S0": _as_float(path, _require_key(path, raw, "S0", context), f"{context}.S0"),
            "omega": _as_float_list(path, _require_key(path, raw, "omega", context),
                                    f"{context}.omega"),
            "r2": _as_float(path, _require_key(path, raw, "r2", context), f"{context}.r2"),
        }
        records.append(record)
    return records


def load_spectral(path: str | Path) -> dict:
    """Gap-ratio diagnostics: histogram plus pooled mean and the
    GOE/COE/Poisson reference means."""
    path = Path(path)
    payload = _read_json(path)
    histogram = _require_key(path, payload, "histogram")
    edges = _as_float_list(path, _require_key(path, histogram, "bin_edges", "histogram"),
                           "histogram.bin_edges")
    densities = _as_float_list(path, _require_key(path, histogram, "densities", "histogram"),
                               "histogram.densities")
    if len(edges) != len(densities) + 1:
        raise SchemaError(f"{path}: histogram.bin_edges must have exactly one more entry "
                          f"than histogram.densities ({len(edges)} vs {len(densities)})")
    references = _require_key(path, payload, "references")
    return {
        "protocol": str(_require_key(path, payload, "protocol")),
        "L": int(_as_float(path, _require_key(path, payload, "L"), "L")),
        "mean_r": _as_float(path, _require_key(path, payload, "mean_r"), "mean_r"),
        "bin_edges": edges,
        "densities": densities,
        "references": {name: _as_float(path, _require_key(path, references, name, "references"),
                                       f"references.{name}")
                       for name in ("goe", "coe", "poisson")},
    }


def load_haar(path: str | Path) -> dict:
    """Monte Carlo Haar reference entropy for one cut."""
    path = Path(path)
    payload = _read_json(path)
    return {
        "L": int(_as_float(path, _require_key(path, payload, "L"), "L")),
        "n_samples": int(_as_float(path, _require_key(path, payload, "n_samples"),
                                   "n_samples")),
        "mean_entropy_bits": _as_float(path, _require_key(path, payload, "mean_entropy_bits"),
                                       "mean_entropy_bits"),
        "stderr": _as_float(path, _require_key(path, payload, "stderr"), "stderr"),
    }
