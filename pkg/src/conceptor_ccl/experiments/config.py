"""Experiment configuration: defaults, INI-style loading and validation."""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError

EXPERIMENTS = ("interpolate", "degrade", "distort")
MODES = ("static", "ccl", "both")

# Per-experiment hyperparameter defaults.
DEFAULTS = {
    "interpolate": dict(rho=1.6, rho_in=1.0, rho_b=1.0, alpha=0.75, ridge_reg=1e-4, aperture=25.0,
                        n=256, eta=0.2 / 256, beta=2.5e-5),
    "degrade": dict(rho=0.749, rho_in=1.149, rho_b=1.5, alpha=0.988, ridge_reg=1000.0, aperture=31.6,
                    n=1500, eta=0.001, beta=0.7),
    "distort": dict(rho=0.9, rho_in=0.9, rho_b=0.2, alpha=1.0, ridge_reg=0.01, aperture=8.0,
                    n=50, eta=0.8, beta=4e-3, n_rfc=200),
}


@dataclass
class ExperimentConfig:
    experiment: str = "interpolate"
    seed: int = 0
    out: str = "results"
    mode: str = "both"
    # network
    n: int = 256
    alpha: float = 0.75
    rho: float = 1.6
    rho_in: float = 1.0
    rho_b: float = 1.0
    ridge_reg: float = 1e-4
    aperture: float = 25.0
    eta: float = 0.2 / 256
    beta: float = 2.5e-5
    n_rfc: int = 200
    washout: int = 100
    train_length: int = 1500
    # interpolate
    t0: float = 20.0
    t1: list = field(default_factory=lambda: [25.0, 30.0, 35.0])
    lambda_rate: float = 1e-5
    tail: int = 200_000
    period_window: int = 1000
    output_stride: int = 10
    ccl_form: str = "merged"
    prefix: str = ""
    # degrade
    k_list: list = field(default_factory=lambda: [100, 200, 300, 400, 500, 600, 700])
    trials: int = 10
    threshold: float = 1.0
    channels: int = 10
    period: float = 40.0
    transient: int = 200
    eval_steps: int = 600
    nrmse_cycles: int = 1
    data_csv: str = ""
    standardize: bool = False
    target_csv: str = ""
    # distort
    layers: int = 4
    gain: float = 0.3
    offset: float = 0.0
    onset: int = 0
    steps: int = 4000
    periods: list = field(default_factory=lambda: [7.0, 21.0])

    @classmethod
    def for_experiment(cls, experiment: str, **overrides) -> "ExperimentConfig":
        if experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
        cfg = cls(experiment=experiment)
        for key, value in DEFAULTS[experiment].items():
            setattr(cfg, key, value)
        if experiment == "distort":
            cfg.train_length = 3000
            cfg.eval_steps = 1000
        for key, value in overrides.items():
            if not hasattr(cfg, key):
                raise ConfigError(key, "unknown configuration key")
            setattr(cfg, key, value)
        return cfg

    def file_prefix(self) -> str:
        return self.prefix or {"interpolate": "fig3", "degrade": "fig5", "distort": "fig6"}[self.experiment]

    def snapshot(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> "ExperimentConfig":
        """Check every field; raises ConfigError naming the first bad one."""
        def need(ok, name, msg):
            if not ok:
                raise ConfigError(name, msg)

        need(self.experiment in EXPERIMENTS, "experiment", f"must be one of {EXPERIMENTS}")
        need(self.mode in MODES, "mode", f"must be one of {MODES}")
        need(0 <= self.seed < 2 ** 64, "seed", "must be an unsigned 64-bit integer")
        need(self.n >= 1, "n", "must be >= 1")
        need(0 < self.alpha <= 1, "alpha", "must lie in (0, 1]")
        need(self.rho > 0, "rho", "must be positive")
        need(self.rho_in >= 0, "rho_in", "must be >= 0")
        need(self.rho_b >= 0, "rho_b", "must be >= 0")
        need(self.ridge_reg >= 0, "ridge_reg", "must be >= 0")
        need(self.aperture > 0, "aperture", "must be positive")
        need(self.eta > 0, "eta", "must be positive")
        need(self.beta >= 0, "beta", "must be >= 0")
        need(self.washout >= 0, "washout", "must be >= 0")
        need(self.train_length >= 2, "train_length", "must be >= 2")
        if self.experiment == "interpolate":
            need(self.t0 > 0, "t0", "must be positive")
            need(len(self.t1) > 0 and all(t >= self.t0 for t in self.t1), "t1",
                 "must be a non-empty list of periods >= t0")
            need(0 < self.lambda_rate <= 1, "lambda_rate", "must lie in (0, 1]")
            need(self.tail >= 0, "tail", "must be >= 0")
            need(self.period_window >= 3, "period_window", "must be >= 3")
            need(self.output_stride >= 1, "output_stride", "must be >= 1")
            need(self.ccl_form in ("merged", "two_step"), "ccl_form", "must be 'merged' or 'two_step'")
        elif self.experiment == "degrade":
            need(len(self.k_list) > 0 and all(0 <= k <= self.n for k in self.k_list), "k_list",
                 f"entries must lie in [0, n={self.n}]")
            need(self.trials >= 1, "trials", "must be >= 1")
            need(self.threshold >= 0, "threshold", "must be >= 0")
            need(self.channels >= 1, "channels", "must be >= 1")
            need(self.period > 0, "period", "must be positive")
            need(self.transient >= 0, "transient", "must be >= 0")
            need(self.eval_steps >= 2, "eval_steps", "must be >= 2")
            need(self.nrmse_cycles >= 1, "nrmse_cycles", "must be >= 1")
            need(not self.data_csv or Path(self.data_csv).is_file(), "data_csv", "file not found")
            need(not self.target_csv or Path(self.target_csv).is_file(), "target_csv", "file not found")
        else:
            need(self.n_rfc >= self.n, "n_rfc", "must be >= n")
            need(self.layers >= 1, "layers", "must be >= 1")
            need(self.onset >= 0, "onset", "must be >= 0")
            need(self.steps > self.eval_steps + 1, "steps", "must exceed eval_steps + 1")
            need(self.eval_steps >= 2, "eval_steps", "must be >= 2")
            need(len(self.periods) > 0 and all(p > 0 for p in self.periods), "periods",
                 "must be a non-empty list of positive periods")
        return self


def _coerce(name: str, raw: str, template):
    try:
        if isinstance(template, bool):
            low = raw.strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return low in ("1", "true", "yes")
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
        if isinstance(template, list):
            kind = int if name == "k_list" else float
            return [kind(v) for v in raw.replace(",", " ").split()]
        return raw.strip()
    except ValueError:
        raise ConfigError(name, f"cannot parse value {raw!r}") from None


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    """Read a key=value file with an optional ``[common]`` section and one
    section per experiment. Keys in the experiment section win over common."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError("config", str(exc)) from exc

    sections = [s for s in parser.sections() if s in EXPERIMENTS]
    if experiment is None:
        if len(sections) != 1:
            raise ConfigError("experiment", "config must contain exactly one experiment section "
                                            "unless a subcommand selects one")
        experiment = sections[0]
    cfg = ExperimentConfig.for_experiment(experiment)
    for section in ("common", experiment):
        if not parser.has_section(section):
            continue
        for key, raw in parser.items(section):
            if not hasattr(cfg, key) or key == "experiment":
                raise ConfigError(key, f"unknown configuration key in [{section}]")
            setattr(cfg, key, _coerce(key, raw, getattr(cfg, key)))
    return cfg
