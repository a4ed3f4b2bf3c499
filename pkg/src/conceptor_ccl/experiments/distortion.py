"""Layered random-feature-conceptor equalisation of a scaled input."""
from __future__ import annotations

import time

import numpy as np

from ..metrics import best_shift_nrmse
from ..rfc import Hierarchy, hierarchy_step, rfc_init, train_layer
from ..signals import DistortionSpec, distort, gen_two_sine
from .config import ExperimentConfig
from .record import RunRecord
from .tables import Table


def run_hierarchy(h: Hierarchy, inputs: np.ndarray) -> np.ndarray:
    """Outputs as steps x layers x channels."""
    return np.stack([hierarchy_step(h, u) for u in inputs])


def run_distortion(cfg: ExperimentConfig) -> RunRecord:
    cfg.validate()
    start = time.perf_counter()
    weights = rfc_init(cfg.n, cfg.n_rfc, cfg.rho, cfg.rho_in, cfg.rho_b, 1, cfg.seed)
    clean_train = gen_two_sine(cfg.train_length + 1, cfg.periods).data
    c_target, readout = train_layer(weights, clean_train, cfg.aperture, cfg.ridge_reg, cfg.washout)

    max_shift = cfg.layers + 2
    clean = gen_two_sine(cfg.steps + max_shift, cfg.periods)
    driven = distort(clean.slice(0, cfg.steps), DistortionSpec(cfg.gain, cfg.offset, cfg.onset)).data

    conditions = {"ccl": True, "static": False}
    if cfg.mode != "both":
        conditions = {cfg.mode: conditions[cfg.mode]}
    outputs, errors = {}, {}
    first = cfg.steps - cfg.eval_steps
    for name, adapt in conditions.items():
        h = Hierarchy.build(weights, readout, c_target, cfg.layers, cfg.eta, cfg.beta, adapt)
        outputs[name] = run_hierarchy(h, driven)
        errors[name] = [best_shift_nrmse(outputs[name][first:, i], clean.data[first:], max_shift)[1]
                        for i in range(cfg.layers)]

    names = list(conditions)
    nrmse_table = Table(["seed", "layer"] + [f"nrmse_{n}" for n in names])
    for i in range(cfg.layers):
        nrmse_table.add(cfg.seed, i + 1, *(errors[n][i] for n in names))
    series = Table(["k", "u_clean", "u_distorted"]
                   + [f"{n}_layer{i + 1}" for n in names for i in range(cfg.layers)])
    for k in range(cfg.steps):
        series.add(k, float(clean.data[k, 0]), float(driven[k, 0]),
                   *(float(outputs[n][k, i, 0]) for n in names for i in range(cfg.layers)))
    return RunRecord(cfg, {"nrmse": nrmse_table, "series": series}, time.perf_counter() - start)
