"""CSV result tables.

Layout: one header row naming the columns, data rows, then footer lines
starting with ``#`` holding ``key=value`` metadata.  Floats are written with
``repr`` so they round-trip exactly; the body is byte-stable for a given seed
(only the ``wall_time`` footer changes between runs).
"""
from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(list(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else repr(v))
    try:
        import numpy as np

        if isinstance(v, np.integer):
            return str(int(v))
        if isinstance(v, np.floating):
            return _fmt(float(v))
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def render(table: ResultTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    for k, v in table.meta.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    return buf.getvalue()


def body(text: str) -> str:
    """Everything except the footer metadata."""
    return "".join(l for l in text.splitlines(keepends=True) if not l.startswith("#"))


def write_table(table: ResultTable, path) -> None:
    text = render(table)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _parse(cell: str):
    if cell == "":
        return None
    if cell in ("true", "false"):
        return cell == "true"
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_table(path) -> ResultTable:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    meta = {}
    data = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = _parse(value)
        elif line.strip():
            data.append(line)
    reader = csv.reader(data)
    try:
        columns = next(reader)
    except StopIteration:
        raise ValueError(f"{path}: empty table") from None
    rows = [[_parse(c) for c in r] for r in reader]
    return ResultTable(columns, rows, meta)


def write_plot_data(path, columns, rows) -> None:
    """Whitespace-separated columns with a ``#`` header, for gnuplot and friends."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + " ".join(columns) + "\n")
        for r in rows:
            fh.write(" ".join(_fmt(float(v)) for v in r) + "\n")
