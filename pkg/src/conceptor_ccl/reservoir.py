"""Leaky tanh reservoir: initialisation, driven and autonomous stepping,
state harvesting and neuron clamping."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, InvalidParam, SeriesTooShort
from .numkernel import make_rng, ridge_solve, scale_to_spectral_radius
from .signals import TimeSeries


@dataclass(frozen=True)
class ReservoirParams:
    w: np.ndarray
    w_in: np.ndarray
    bias: np.ndarray
    alpha: float
    rho: float
    rho_in: float
    rho_b: float
    seed: int | None = None

    def __post_init__(self):
        n = self.w.shape[0]
        if self.w.shape != (n, n):
            raise DimensionMismatch("w must be square")
        if self.w_in.ndim != 2 or self.w_in.shape[0] != n:
            raise DimensionMismatch("w_in must have shape (n, m_in)")
        if self.bias.shape != (n,):
            raise DimensionMismatch("bias must have shape (n,)")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidParam("alpha must lie in [0, 1]")
        for a in (self.w, self.w_in, self.bias):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def m_in(self) -> int:
        return self.w_in.shape[1]


@dataclass
class ReservoirState:
    x: np.ndarray
    k: int = 0

    @classmethod
    def zeros(cls, n: int) -> "ReservoirState":
        return cls(np.zeros(n), 0)


@dataclass(frozen=True)
class DegradationMask:
    clamped: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __post_init__(self):
        idx = np.asarray(self.clamped, dtype=int).ravel()
        if len(np.unique(idx)) != len(idx):
            raise InvalidParam("clamped indices must be unique")
        object.__setattr__(self, "clamped", np.sort(idx))

    @property
    def count(self) -> int:
        return len(self.clamped)

    @classmethod
    def random(cls, n: int, count: int, rng: np.random.Generator) -> "DegradationMask":
        if not 0 <= count <= n:
            raise InvalidParam(f"cannot clamp {count} of {n} neurons")
        return cls(rng.choice(n, size=count, replace=False))

    def check(self, n: int) -> None:
        if self.count and (self.clamped[0] < 0 or self.clamped[-1] >= n):
            raise IndexOutOfRange(f"mask indices must lie in [0, {n})")


@dataclass(frozen=True)
class Readout:
    w_out: np.ndarray
    reg: float

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.w_out @ x

    @property
    def m_out(self) -> int:
        return self.w_out.shape[0]


def init_reservoir(n: int, alpha: float, rho: float, rho_in: float, rho_b: float,
                   m_in: int = 1, seed: int = 0) -> ReservoirParams:
    """Dense i.i.d. standard-normal W rescaled to spectral radius ``rho``;
    W_in and b standard normal times ``rho_in`` and ``rho_b``."""
    if n < 1 or m_in < 1:
        raise InvalidParam("n and m_in must be >= 1")
    if not 0 < alpha <= 1:
        raise InvalidParam("alpha must lie in (0, 1]")
    if not rho > 0:
        raise InvalidParam("rho must be positive")
    rng = make_rng(seed)
    w = scale_to_spectral_radius(rng.standard_normal((n, n)), rho)
    w_in = rho_in * rng.standard_normal((n, m_in))
    bias = rho_b * rng.standard_normal(n)
    return ReservoirParams(w=w, w_in=w_in, bias=bias, alpha=alpha, rho=rho,
                           rho_in=rho_in, rho_b=rho_b, seed=seed)


def _leaky_update(p: ReservoirParams, x: np.ndarray, drive: np.ndarray) -> np.ndarray:
    return (1 - p.alpha) * x + p.alpha * np.tanh(p.w @ x + drive + p.bias)


def drive_step(p: ReservoirParams, s: ReservoirState, u) -> ReservoirState:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (p.m_in,):
        raise DimensionMismatch(f"input has shape {u.shape}, expected ({p.m_in},)")
    return ReservoirState(_leaky_update(p, s.x, p.w_in @ u), s.k + 1)


def run_driven(p: ReservoirParams, inputs: np.ndarray, x0: np.ndarray | None = None) -> np.ndarray:
    """Drive from ``x0`` (default zero) and return all states x(1) .. x(L) as L x N."""
    inputs = np.asarray(inputs, dtype=float).reshape(len(inputs), -1)
    if inputs.shape[1] != p.m_in:
        raise DimensionMismatch(f"inputs have {inputs.shape[1]} channels, expected {p.m_in}")
    x = np.zeros(p.n) if x0 is None else np.array(x0, dtype=float)
    drives = inputs @ p.w_in.T
    out = np.empty((len(inputs), p.n))
    for k, d in enumerate(drives):
        x = _leaky_update(p, x, d)
        out[k] = x
    return out


def harvest(p: ReservoirParams, u_series: TimeSeries, washout: int = 100):
    """Collect states paired with one-step-ahead targets.

    Starting from x = 0 the reservoir is driven by u(0) .. u(L-2). The state
    reached after consuming u(k) is paired with u(k+1); the first ``washout``
    pairs are dropped. Returns ``(states, targets)`` with states N x L' and
    targets a TimeSeries of length L'.
    """
    length = u_series.length
    if washout < 0 or length <= washout + 1:
        raise SeriesTooShort(f"series of length {length} too short for washout {washout}")
    u = u_series.data
    states = run_driven(p, u[:-1])
    return states[washout:].T, TimeSeries(u[washout + 1:], u_series.labels)


def fit_readout(states: np.ndarray, targets: TimeSeries | np.ndarray, reg: float) -> Readout:
    """Ridge readout from N x L states to L x M targets."""
    y = targets.data if isinstance(targets, TimeSeries) else np.asarray(targets)
    return Readout(ridge_solve(states, y.T, reg), reg)


def autonomous_step(p: ReservoirParams, s: ReservoirState, r: Readout, c=None):
    """One closed-loop step; returns ``(next_state, y)`` where y = W_out x(k)
    is read from the pre-update state and fed back as input."""
    if r.w_out.shape != (p.m_in, p.n):
        raise DimensionMismatch(f"readout shape {r.w_out.shape} cannot close the loop "
                                f"for n={p.n}, m_in={p.m_in}")
    y = r.w_out @ s.x
    x = _leaky_update(p, s.x, p.w_in @ y)
    if c is not None:
        x = np.asarray(getattr(c, "c", c)) @ x
    return ReservoirState(x, s.k + 1), y


def apply_degradation(s: ReservoirState, m: DegradationMask) -> ReservoirState:
    m.check(len(s.x))
    if not m.count:
        return s
    x = np.array(s.x)
    x[m.clamped] = 0.0
    return ReservoirState(x, s.k)


def save_params(p: ReservoirParams, path) -> None:
    """Store params as .npz (per-array header with dims, row-major float64)."""
    np.savez(Path(path), w=p.w, w_in=p.w_in, bias=p.bias,
             scalars=np.array([p.alpha, p.rho, p.rho_in, p.rho_b]),
             seed=np.array([0 if p.seed is None else p.seed], dtype=np.uint64),
             has_seed=np.array([p.seed is not None]))


def load_params(path) -> ReservoirParams:
    with np.load(Path(path)) as f:
        alpha, rho, rho_in, rho_b = (float(v) for v in f["scalars"])
        seed = int(f["seed"][0]) if bool(f["has_seed"][0]) else None
        return ReservoirParams(w=f["w"].copy(), w_in=f["w_in"].copy(), bias=f["bias"].copy(),
                               alpha=alpha, rho=rho, rho_in=rho_in, rho_b=rho_b, seed=seed)
