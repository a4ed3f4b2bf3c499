"""Figures: gnuplot command files plus matplotlib PNGs rendered next to the CSVs."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .tables import Table, emit_plot_script


def _where(col: str, value, target: str) -> str:
    if isinstance(value, str):
        return f"(strcol('{col}') eq \"{value}\" ? column('{target}') : NaN)"
    return f"(column('{col}') == {value!r} ? column('{target}') : NaN)"


def _groups(table: Table, *keys: str) -> list[tuple]:
    idx = [table.columns.index(k) for k in keys]
    return sorted({tuple(r[i] for i in idx) for r in table.rows})


def write_scripts(record, out: Path) -> list[Path]:
    cfg = record.config
    prefix = cfg.file_prefix()
    out = Path(out)
    if cfg.experiment == "interpolate":
        groups = _groups(record.tables["period"], "t1", "mode")
        plots = [(_where("t1", t1, "lambda_start"), _where("mode", mode, "period"), f"T1={t1} {mode}")
                 for t1, mode in groups]
        # a NaN in either coordinate drops the row, so x filters t1 and y filters mode
        return [emit_plot_script(out / f"{prefix}_period.gp", "Output period during interpolation",
                                 f"{prefix}_period.csv", plots, "lambda", "period"),
                emit_plot_script(out / f"{prefix}_output.gp", "Autonomous output",
                                 f"{prefix}_output.csv",
                                 [(_where("t1", t1, "k"), _where("mode", mode, "y"), f"T1={t1} {mode}")
                                  for t1, mode in groups], "k", "y")]
    if cfg.experiment == "degrade":
        modes = [m for (m,) in _groups(record.tables["summary"], "mode")]
        return [emit_plot_script(out / f"{prefix}_failure.gp", "Failure rate versus removed neurons",
                                 f"{prefix}_summary.csv",
                                 [("k_removed", _where("mode", m, "failure_rate"), m) for m in modes],
                                 "removed neurons", "failure rate"),
                emit_plot_script(out / f"{prefix}_nrmse.gp", "NRMSE over jointly non-failing trials",
                                 f"{prefix}_summary.csv",
                                 [("k_removed", _where("mode", m, "mean_nrmse"), m) for m in modes],
                                 "removed neurons", "NRMSE")]
    cols = [c for c in record.tables["nrmse"].columns if c.startswith("nrmse_")]
    return [emit_plot_script(out / f"{prefix}_nrmse.gp", "NRMSE per layer", f"{prefix}_nrmse.csv",
                             [("layer", c, c[6:]) for c in cols], "layer", "NRMSE"),
            emit_plot_script(out / f"{prefix}_series.gp", "Layer outputs", f"{prefix}_series.csv",
                             [("k", c, c) for c in record.tables["series"].columns[1:]], "k", "value")]


def _rows(table: Table, **match) -> np.ndarray:
    idx = {k: table.columns.index(k) for k in match}
    return [r for r in table.rows if all(r[i] == match[k] for k, i in idx.items())]


def render(record, out: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cfg = record.config
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.file_prefix()}.png"
    if cfg.experiment == "interpolate":
        per = record.tables["period"]
        groups = _groups(per, "t1", "mode")
        fig, axes = plt.subplots(2, 1, figsize=(9, 7))
        c = per.columns
        for t1, mode in groups:
            rows = _rows(per, t1=t1, mode=mode)
            ks = [r[c.index("k_start")] for r in rows]
            axes[0].plot(ks, [r[c.index("period")] for r in rows], label=f"T1={t1} {mode}")
            axes[1].plot(ks, [r[c.index("amplitude")] for r in rows], label=f"T1={t1} {mode}")
        axes[0].set_ylabel("period")
        axes[1].set_ylabel("amplitude")
        axes[1].set_xlabel("step k (lambda = min(1, rate k))")
        axes[0].legend(fontsize=7)
    elif cfg.experiment == "degrade":
        s = record.tables["summary"]
        c = s.columns
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        for (mode,) in _groups(s, "mode"):
            rows = _rows(s, mode=mode)
            k = [r[c.index("k_removed")] for r in rows]
            axes[0].plot(k, [r[c.index("failure_rate")] for r in rows], "o-", label=mode)
            axes[1].plot(k, [np.nan if r[c.index("mean_nrmse")] is None else r[c.index("mean_nrmse")]
                             for r in rows], "o-", label=mode)
        axes[0].set_ylabel("failure rate")
        axes[1].set_ylabel("mean NRMSE (jointly non-failing)")
        for ax in axes:
            ax.set_xlabel("removed neurons")
            ax.legend()
    else:
        t = record.tables["nrmse"]
        series = record.tables["series"]
        fig, axes = plt.subplots(1, 2, figsize=(11, 4))
        layers = t.column("layer")
        for col in t.columns[2:]:
            axes[0].plot(layers, t.column(col), "o-", label=col[6:])
        axes[0].set_xlabel("layer")
        axes[0].set_ylabel("NRMSE")
        axes[0].legend()
        n = min(100, len(series))
        tail = series.rows[-n:]
        for j, col in enumerate(series.columns[1:], start=1):
            if col.startswith("u_") or col.endswith(f"layer{cfg.layers}"):
                axes[1].plot([r[0] for r in tail], [r[j] for r in tail], label=col)
        axes[1].set_xlabel("k")
        axes[1].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return [path]
