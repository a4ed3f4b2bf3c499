"""Result tables and their CSV / plot-script emitters."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CclError


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def sorted(self, *keys: str) -> "Table":
        idx = [self.columns.index(k) for k in keys]
        return Table(list(self.columns), sorted(self.rows, key=lambda r: tuple(r[i] for i in idx)))

    def __len__(self):
        return len(self.rows)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def emit_csv(table: Table, path) -> Path:
    """Header row plus one line per row; floats use shortest round-trip repr,
    None becomes an empty cell."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(table.columns) + "\n")
            for row in table.rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise CclError(f"cannot write {path}: {exc}") from exc
    return path


def emit_plot_script(path, title: str, csv_name: str, plots: list[tuple[str, str, str]],
                     xlabel: str, ylabel: str, image: str | None = None) -> Path:
    """Write a gnuplot command file that plots columns of ``csv_name``.

    ``plots`` holds ``(x, y, label)`` triples. Plain names are resolved
    against the CSV header; entries starting with "(" are passed through as
    gnuplot using-expressions, e.g. to filter rows by mode.
    """
    path = Path(path)
    image = image or Path(path).stem + "_gnuplot.png"
    lines = [
        f"# gnuplot -c {path.name}",
        "set datafile separator ','",
        "set terminal pngcairo size 900,500",
        f"set output '{image}'",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    def ref(col):
        return col if col.startswith("(") else f"'{col}'"

    parts = [f"'{csv_name}' using {ref(x)}:{ref(y)} with lines title '{label}'" for x, y, label in plots]
    lines.append("plot " + ", \\\n     ".join(parts))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CclError(f"cannot write {path}: {exc}") from exc
    return path
