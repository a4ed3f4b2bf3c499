"""Run records and output writing."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CclError
from .config import ExperimentConfig
from .tables import Table, emit_csv


@dataclass
class RunRecord:
    config: ExperimentConfig
    tables: dict[str, Table] = field(default_factory=dict)
    wall_clock: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.config.seed


def write_record(record: RunRecord, out_dir, plots: bool = True) -> list[Path]:
    """CSV tables, gnuplot scripts, PNG figures and a run.json snapshot.

    CSVs contain only result rows, so repeated runs give identical bytes;
    the wall-clock time lives in run.json.
    """
    out = Path(out_dir)
    prefix = record.config.file_prefix()
    written = [emit_csv(t, out / f"{prefix}_{name}.csv") for name, t in record.tables.items()]
    from . import plotting

    written += plotting.write_scripts(record, out)
    if plots:
        written += plotting.render(record, out)
    meta = {"config": record.config.snapshot(), "seed": record.seed,
            "wall_clock_s": round(record.wall_clock, 3), "files": sorted(p.name for p in written)}
    try:
        path = out / f"{prefix}_run.json"
        path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CclError(f"cannot write {out}: {exc}") from exc
    return written + [path]
