"""Neuron removal trials with a static versus an adaptive conceptor."""
from __future__ import annotations

import time

import numpy as np

from ..conceptor import conceptor_from_states, load_conceptor
from ..errors import DimensionMismatch
from ..kernels import MERGED, STATIC, ClosedLoop
from ..metrics import best_shift_nrmse, detect_failure, estimate_period
from ..numkernel import make_rng, pca
from ..reservoir import fit_readout, harvest, init_reservoir
from ..signals import gen_multivar_cycle, load_csv, standardize
from .config import ExperimentConfig
from .record import RunRecord
from .tables import Table

TRIAL_COLUMNS = ["seed", "k_removed", "trial", "mode", "failed", "pc1_variance", "pc1_ratio", "nrmse"]
SUMMARY_COLUMNS = ["k_removed", "mode", "trials", "failures", "failure_rate", "jointly_ok", "mean_nrmse"]


def training_series(cfg: ExperimentConfig):
    if cfg.data_csv:
        u = load_csv(cfg.data_csv)
        return standardize(u) if cfg.standardize else u
    return gen_multivar_cycle(cfg.channels, cfg.period, cfg.washout + cfg.train_length + 1, cfg.seed)


def trial_mask(n: int, k: int, seed: int, trial: int) -> np.ndarray:
    """First k entries of a permutation seeded by seed ^ trial, so masks
    for increasing k are nested."""
    return np.sort(make_rng(seed ^ trial).permutation(n)[:k])


def train(cfg: ExperimentConfig):
    u = training_series(cfg)
    p = init_reservoir(cfg.n, cfg.alpha, cfg.rho, cfg.rho_in, cfg.rho_b, u.channels, cfg.seed)
    states, targets = harvest(p, u, cfg.washout)
    readout = fit_readout(states, targets, cfg.ridge_reg)
    if cfg.target_csv:
        c_target = load_conceptor(cfg.target_csv)
        if c_target.n != cfg.n:
            raise DimensionMismatch(f"target conceptor is {c_target.n}-dimensional, n={cfg.n}")
    else:
        c_target = conceptor_from_states(states, cfg.aperture)
    return p, readout, c_target, states[:, -1].copy()


def run_degradation(cfg: ExperimentConfig) -> RunRecord:
    cfg.validate()
    start = time.perf_counter()
    p, readout, c_target, x0 = train(cfg)
    ct = c_target.c
    horizon = cfg.transient + cfg.eval_steps

    base = ClosedLoop(p, readout, x0, ct, mode=STATIC)
    # the baseline runs one extra evaluation window so shifted segments exist
    yb, xb = base.run(horizon + cfg.eval_steps)
    yb = yb[cfg.transient:]
    base_var = detect_failure(xb[cfg.transient:horizon].T, cfg.threshold).pc1_variance
    pc1 = pca(yb[:cfg.eval_steps]).project(yb, 1)[:, 0]
    base_period = float(np.nanmean(estimate_period(pc1[:cfg.eval_steps], cfg.eval_steps).period))
    cycle = int(round(base_period)) if np.isfinite(base_period) else cfg.eval_steps // 2
    window = min(cfg.nrmse_cycles * cycle, cfg.eval_steps)

    modes = ["static", "ccl"] if cfg.mode == "both" else [cfg.mode]
    trials = Table(list(TRIAL_COLUMNS))
    summary = Table(list(SUMMARY_COLUMNS))
    for k_removed in cfg.k_list:
        results = {}
        for trial in range(cfg.trials):
            mask = trial_mask(cfg.n, k_removed, cfg.seed, trial)
            for mode in modes:
                kind = STATIC if mode == "static" else MERGED
                loop = ClosedLoop(p, readout, x0, ct, mode=kind, eta=cfg.eta, gamma=cfg.aperture,
                                  beta=cfg.beta, clamp=mask)
                try:
                    ys, xs = loop.run(horizon)
                except FloatingPointError:
                    results[trial, mode] = (True, float("nan"), None)
                    continue
                verdict = detect_failure(xs[cfg.transient:].T, cfg.threshold)
                err = None
                if not verdict.failed:
                    _, err = best_shift_nrmse(ys[cfg.transient:cfg.transient + window], yb, cycle)
                results[trial, mode] = (verdict.failed, verdict.pc1_variance, err)
        for trial in range(cfg.trials):
            joint = all(not results[trial, m][0] for m in modes)
            for mode in modes:
                failed, var, err = results[trial, mode]
                trials.add(cfg.seed, k_removed, trial, mode, failed, var, var / base_var,
                           err if joint else None)
        for mode in modes:
            rows = [results[t, mode] for t in range(cfg.trials)]
            joint = [t for t in range(cfg.trials) if all(not results[t, m][0] for m in modes)]
            fails = sum(r[0] for r in rows)
            mean = float(np.mean([results[t, mode][2] for t in joint])) if joint else None
            summary.add(k_removed, mode, cfg.trials, fails, fails / cfg.trials, len(joint), mean)
    tables = {"trials": trials.sorted("k_removed", "trial", "mode"),
              "summary": summary.sorted("k_removed", "mode")}
    extras = {"baseline_period": base_period, "baseline_pc1_variance": base_var, "nrmse_window": window}
    return RunRecord(cfg, tables, time.perf_counter() - start, extras)
