"""Output tables with exact CSV and JSON round-trips.

Floats are written with ``repr``, which Python guarantees to read back to
the identical value.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

__all__ = ["OutputTable", "read_csv", "read_json"]


@dataclass
class OutputTable:
    columns: list[str]
    rows: list[list[float]]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")
        self.rows = [[float(x) for x in row] for row in self.rows]
        if any(all(math.isnan(x) for x in row) for row in self.rows):
            raise ValueError("all-NaN row")
        if "pole" not in self.columns and any(math.isnan(x) for row in self.rows for x in row):
            raise ValueError("NaN cells need a pole column")

    def column(self, name: str) -> list[float]:
        j = self.columns.index(name)
        return [row[j] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k in sorted(self.metadata):
            buf.write(f"# {k}: {self.metadata[k]}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(repr(x) for x in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        tree = {"metadata": dict(sorted(self.metadata.items())), "columns": self.columns, "rows": self.rows}
        return json.dumps(tree, indent=1) + "\n"

    def dump(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def read_csv(text: str) -> OutputTable:
    meta: dict[str, str] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition(": ")
        meta[key] = value
        i += 1
    columns = lines[i].split(",")
    rows = [[float(x) for x in line.split(",")] for line in lines[i + 1 :] if line]
    return OutputTable(columns, rows, meta)


def read_json(text: str) -> OutputTable:
    tree = json.loads(text)
    return OutputTable(tree["columns"], tree["rows"], tree["metadata"])
