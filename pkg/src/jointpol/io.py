"""File formats: count-table CSV, correlations/design JSON, JSON reports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .core import DEFAULT_CONVENTION, BlochDirection
from .design import OUTCOMES, WAVEPLATE_TOL, JointMeasurementDesign, WaveplateSetting, filter_projection
from .errors import FormatError, JointPolError
from .simulator import CountTable
from .states import InputCorrelations

HEADERS = tuple(o.header for o in OUTCOMES)  # "(+1,+1)", "(+1,-1)", "(-1,+1)", "(-1,-1)"
CORNER = "outcome1\\outcome2"

BUNDLED = {
    "counts": "table3_counts.csv",
    "correlations": "input_correlations.json",
    "design": "paper_design.json",
    "waveplates": "paper_waveplates.json",
}


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("jointpol") / "data" / BUNDLED[name]))


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def format_counts_csv(table: CountTable) -> str:
    buf = io.StringIO()
    for key, value in table.metadata.items():
        buf.write(f"# {key}: {value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([CORNER, *HEADERS])
    for head, row in zip(HEADERS, table.counts):
        w.writerow([head, *(int(v) for v in row)])
    return buf.getvalue()


def write_counts_csv(table: CountTable, path) -> None:
    Path(path).write_text(format_counts_csv(table), encoding="utf-8")


def parse_counts_csv(text: str) -> CountTable:
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                meta[key.strip()] = _coerce(value.strip())
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if len(rows) != 5:
        raise FormatError(f"count CSV needs a header row and 4 data rows, found {len(rows)} rows")
    if tuple(rows[0][1:]) != HEADERS or len(rows[0]) != 5:
        raise FormatError(f"column headers must be {list(HEADERS)}, got {rows[0][1:]}")
    counts = []
    for head, row in zip(HEADERS, rows[1:]):
        if len(row) != 5 or row[0] != head:
            raise FormatError(f"row {row[:1]} malformed; expected header {head!r} and 4 counts")
        try:
            values = [int(v) for v in row[1:]]
        except ValueError as exc:
            raise FormatError(f"non-integer count in row {head}: {exc}") from None
        if any(v < 0 for v in values):
            raise FormatError(f"negative count in row {head}")
        counts.append(values)
    return CountTable(np.array(counts, dtype=np.int64), meta)


def read_counts_csv(path) -> CountTable:
    return parse_counts_csv(_read_text(path))


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def _load_json(path) -> dict:
    text = _read_text(path)
    if not text.strip():
        raise FormatError(f"{path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be an object")
    return data


def read_correlations(path) -> InputCorrelations:
    data = _load_json(path)
    try:
        kwargs = {"c_xx": float(data["c_xx"]), "c_yy": float(data["c_yy"])}
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: c_xx and c_yy are required numbers ({exc})") from None
    for key in ("c_zz", "se_xx", "se_yy", "se_zz"):
        if data.get(key) is not None:
            try:
                kwargs[key] = float(data[key])
            except (TypeError, ValueError):
                raise FormatError(f"{path}: {key} must be a number") from None
    return InputCorrelations(**kwargs)


def read_design(path, convention: str | None = None) -> tuple[JointMeasurementDesign, dict]:
    """Load a design file.

    Returns the design and info: ``source`` ("bloch" or "waveplates"),
    ``tol`` for validation, the ``convention`` used and the raw plate
    settings when given.
    """
    data = _load_json(path)
    outcomes = data.get("outcomes")
    if not isinstance(outcomes, list) or len(outcomes) != 4:
        raise FormatError(f"{path}: 'outcomes' must list exactly four entries")
    by_label = {}
    for entry in outcomes:
        if not isinstance(entry, dict) or entry.get("label") not in ("a", "b", "c", "d"):
            raise FormatError(f"{path}: every outcome needs a label among a, b, c, d")
        by_label[entry["label"]] = entry
    if sorted(by_label) != ["a", "b", "c", "d"]:
        raise FormatError(f"{path}: labels must be exactly a, b, c, d")
    convention = convention or data.get("convention") or DEFAULT_CONVENTION

    ordered = [by_label[o.label] for o in OUTCOMES]
    try:
        if all("theta_B" in e and "phi_B" in e for e in ordered):
            dirs = [BlochDirection(float(e["theta_B"]), float(e["phi_B"])) for e in ordered]
            info = {"source": "bloch", "tol": 1e-10, "convention": convention, "waveplates": None}
        elif all("theta_H" in e and "theta_Q" in e for e in ordered):
            settings = [WaveplateSetting(float(e["theta_H"]), float(e["theta_Q"])) for e in ordered]
            dirs = [filter_projection(s, convention) for s in settings]
            info = {"source": "waveplates", "tol": WAVEPLATE_TOL, "convention": convention,
                    "waveplates": settings}
        else:
            raise FormatError(f"{path}: each outcome needs (theta_B, phi_B) or (theta_H, theta_Q)")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, JointPolError):
            raise
        raise FormatError(f"{path}: bad angle value ({exc})") from None
    return JointMeasurementDesign(tuple(dirs)), info


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)
