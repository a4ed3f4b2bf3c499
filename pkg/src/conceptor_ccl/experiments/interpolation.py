"""Morphing between two sine attractors by moving the conceptor target."""
from __future__ import annotations

import math
import time

import numpy as np

from ..conceptor import conceptor_from_states
from ..errors import CclError
from ..kernels import MERGED, STATIC, TWO_STEP, ClosedLoop
from ..metrics import detect_failure, estimate_period
from ..reservoir import fit_readout, harvest, init_reservoir
from ..signals import gen_sine
from .config import ExperimentConfig
from .record import RunRecord
from .tables import Table

OUTPUT_COLUMNS = ["seed", "t1", "mode", "k", "lambda", "y"]
PERIOD_COLUMNS = ["seed", "t1", "mode", "k_start", "lambda_start", "lambda_end", "period",
                  "amplitude", "pc1_variance", "collapsed"]


def train_pair(cfg: ExperimentConfig, t1: float):
    """Reservoir, joint readout and the two pattern conceptors for (t0, t1)."""
    p = init_reservoir(cfg.n, cfg.alpha, cfg.rho, cfg.rho_in, cfg.rho_b, 1, cfg.seed)
    length = cfg.washout + cfg.train_length + 1
    s0, y0 = harvest(p, gen_sine(cfg.t0, length), cfg.washout)
    s1, y1 = harvest(p, gen_sine(t1, length), cfg.washout)
    readout = fit_readout(np.hstack([s0, s1]), np.vstack([y0.data, y1.data]), cfg.ridge_reg)
    c0 = conceptor_from_states(s0, cfg.aperture)
    c1 = conceptor_from_states(s1, cfg.aperture)
    return p, readout, c0, c1, s0[:, -1].copy()


def _modes(cfg: ExperimentConfig) -> list[str]:
    return ["static", "ccl"] if cfg.mode == "both" else [cfg.mode]


def total_steps(cfg: ExperimentConfig) -> int:
    return int(math.ceil(1.0 / cfg.lambda_rate)) + cfg.tail


def run_single(cfg: ExperimentConfig, t1: float, mode: str, output: Table, period: Table) -> None:
    p, readout, c0, c1, x0 = train_pair(cfg, t1)
    kind = STATIC if mode == "static" else (MERGED if cfg.ccl_form == "merged" else TWO_STEP)
    loop = ClosedLoop(p, readout, x0, c0.c, c1.c, cfg.lambda_rate, kind,
                      cfg.eta, cfg.aperture, cfg.beta, c_init=c0.c)
    total = total_steps(cfg)
    k = 0
    while k < total:
        steps = min(cfg.period_window, total - k)
        try:
            ys, xs = loop.run(steps)
        except FloatingPointError as exc:
            raise CclError(f"{mode} run with t1={t1} diverged ({exc}); try a smaller eta") from exc
        y = ys[:, 0]
        for i in range(0, steps, cfg.output_stride):
            kk = k + i
            output.add(cfg.seed, t1, mode, kk, min(1.0, cfg.lambda_rate * kk), float(y[i]))
        if steps >= 3:
            trace = estimate_period(y, steps)
            per, amp = float(trace.period[0]), float(trace.amplitude[0])
            verdict = detect_failure(xs.T, cfg.threshold)
            period.add(cfg.seed, t1, mode, k, min(1.0, cfg.lambda_rate * k),
                       min(1.0, cfg.lambda_rate * (k + steps - 1)), per, amp,
                       verdict.pc1_variance, bool(math.isnan(per) or verdict.failed))
        k += steps


def run_interpolation(cfg: ExperimentConfig) -> RunRecord:
    cfg.validate()
    start = time.perf_counter()
    output, period = Table(list(OUTPUT_COLUMNS)), Table(list(PERIOD_COLUMNS))
    for t1 in cfg.t1:
        for mode in _modes(cfg):
            run_single(cfg, t1, mode, output, period)
    tables = {"output": output.sorted("t1", "mode", "k"), "period": period.sorted("t1", "mode", "k_start")}
    return RunRecord(cfg, tables, time.perf_counter() - start)
