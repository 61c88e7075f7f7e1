"""Canonical, byte-stable serialization for experiment outputs.

JSON records use sorted keys and floats normalized to 10 significant digits;
CSV cells format floats the same way.  Reruns of an identical config must
produce identical bytes, so nothing time- or machine-dependent belongs here.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence


def _normalize(obj):
    if isinstance(obj, float):
        return float(f"{obj:.10g}")
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, set):
        return sorted(_normalize(v) for v in obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_normalize(obj), sort_keys=True, separators=(",", ":"))


def fmt_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    if value is None:
        return ""
    return str(value)


def write_jsonl(records: Iterable[dict], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for rec in records:
            fh.write(canonical_json(rec) + "\n")


def write_csv(rows: Sequence[dict], fieldnames: Sequence[str], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(fmt_cell(row.get(k)) for k in fieldnames) + "\n")
