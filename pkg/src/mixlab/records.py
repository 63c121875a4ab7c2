"""Result records and their deterministic CSV / JSON serializations.

A record is a flat table plus a flat metadata mapping.  Serialization is
fully determined by the record contents: floats are written with 17
significant digits (which round-trips doubles exactly), metadata keys
are sorted, and nothing time- or host-dependent is ever emitted, so
rerunning an experiment with the same config and seed reproduces the
output byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class ResultRecord:
    """One experiment's output: metadata plus a column-labeled table."""

    experiment: str
    meta: dict[str, Any] = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)


def config_hash(normalized: dict) -> str:
    """Short stable digest of a normalized config mapping."""
    blob = json.dumps(normalized, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def format_cell(value: Any) -> str:
    """Canonical text for one CSV cell (None becomes the empty cell)."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def to_csv_text(record: ResultRecord) -> str:
    buf = io.StringIO()
    for key in sorted(record.meta):
        buf.write(f"# {key}={format_cell(record.meta[key])}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(record.columns)
    for row in record.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def to_json_text(record: ResultRecord) -> str:
    payload = {
        "experiment": record.experiment,
        "meta": record.meta,
        "columns": record.columns,
        "rows": [list(row) for row in record.rows],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def render(record: ResultRecord, fmt: str) -> str:
    if fmt == "csv":
        return to_csv_text(record)
    if fmt == "json":
        return to_json_text(record)
    raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def write_record(record: ResultRecord, out: str | None, fmt: str) -> None:
    """Write to a file, or stdout when no path is given."""
    text = render(record, fmt)
    if out is None:
        import sys

        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
