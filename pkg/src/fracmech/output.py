"""Result tables and their CSV/JSON emission."""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

__all__ = ["Table", "emit_results", "read_results", "SWEEP_COLUMNS", "DISPERSION_COLUMNS", "LATTICE_COLUMNS"]

SWEEP_COLUMNS = ("alpha1", "alpha2", "lf", "lstar", "quantity", "value", "baseline", "ratio", "n_elem_or_grid", "runtime_s")
DISPERSION_COLUMNS = ("k", "ReZ", "ImZ", "b_bar", "phi", "stable", "causal")
LATTICE_COLUMNS = ("l_star", "n", "horizon_particles", "lattice_energy", "continuum_energy", "error")

DETERMINISM_NOTE = (
    "No random numbers are used; identical configurations give identical tables. "
    "runtime_s is wall time and is written as 0 when output.timing is false."
)


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[dict[str, Any]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)  # shortest round-trip representation
    return str(v)


def _csv_text(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(row[c]) for c in table.columns])
    return buf.getvalue()


def _json_text(table: Table) -> str:
    from . import __version__

    meta = {"version": __version__, "determinism": DETERMINISM_NOTE, **table.metadata}
    rows = [{c: r[c] for c in table.columns} for r in table.rows]
    doc = {"columns": list(table.columns), "rows": rows, "metadata": meta}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def emit_results(table: Table, fmt: str = "csv", path: str | Path | None = None) -> str:
    """Write ``table`` as CSV or JSON to ``path`` (stdout when ``None``)."""
    if fmt == "csv":
        text = _csv_text(table)
    elif fmt == "json":
        text = _json_text(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def read_results(path: str | Path) -> Table:
    """Re-read a JSON table written by :func:`emit_results`."""
    doc = json.loads(Path(path).read_text())
    return Table(tuple(doc["columns"]), doc["rows"], doc.get("metadata", {}))
