"""Matrix conceptors: batch computation, online autoconceptor, the conceptor
control loop (two-step and merged forms) and linear interpolation."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from .errors import CclError, DimensionMismatch, InvalidAperture, InvalidParam, LambdaOutOfRange
from .reservoir import ReservoirParams, ReservoirState, _leaky_update


@dataclass(frozen=True)
class Conceptor:
    c: np.ndarray
    aperture: float

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DimensionMismatch(f"conceptor must be square, got {c.shape}")
        if not self.aperture > 0:
            raise InvalidAperture("aperture must be positive")
        if c.size and np.max(np.abs(c - c.T)) > 1e-8 * max(1.0, np.max(np.abs(c))):
            raise InvalidParam("conceptor matrix must be symmetric")
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @classmethod
    def identity(cls, n: int, aperture: float = 1.0) -> "Conceptor":
        return cls(np.eye(n), aperture)

    @classmethod
    def zeros(cls, n: int, aperture: float = 1.0) -> "Conceptor":
        return cls(np.zeros((n, n)), aperture)

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.c)

    def __matmul__(self, x):
        return self.c @ x


@dataclass(frozen=True)
class CclParams:
    eta: float
    beta: float
    gamma: float
    target: Conceptor

    def __post_init__(self):
        if not self.eta > 0:
            raise InvalidParam("eta must be positive")
        if self.beta < 0:
            raise InvalidParam("beta must be >= 0")
        if not self.gamma > 0:
            raise InvalidAperture("gamma must be positive")


@dataclass(frozen=True)
class InterpolationSchedule:
    """lambda(k) = min(1, rate * k) between two endpoint conceptors."""

    c0: Conceptor
    c1: Conceptor
    rate: float = 1e-5

    def lam(self, k: int) -> float:
        return min(1.0, self.rate * k)

    def target(self, k: int) -> Conceptor:
        return interpolate_conceptors(self.c0, self.c1, self.lam(k))


def _sym(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + c.T)


def conceptor_from_correlation(r: np.ndarray, gamma: float) -> Conceptor:
    """C = R (R + gamma^-2 I)^-1, evaluated in the eigenbasis of R."""
    if not gamma > 0:
        raise InvalidAperture("aperture must be positive")
    s, u = linalg.eigh(_sym(np.asarray(r, dtype=float)))
    s = np.clip(s, 0.0, None)
    return Conceptor(_sym((u * (s / (s + gamma ** -2))) @ u.T), gamma)


def conceptor_from_states(states: np.ndarray, gamma: float) -> Conceptor:
    """Batch conceptor of N x L state matrix with R = X X^T / L."""
    x = np.asarray(states, dtype=float)
    if x.ndim != 2 or x.shape[1] < 1:
        raise InvalidParam("states must be N x L with L >= 1")
    return conceptor_from_correlation(x @ x.T / x.shape[1], gamma)


def constrained_step(p: ReservoirParams, s: ReservoirState, u, c: Conceptor) -> ReservoirState:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (p.m_in,) or c.n != p.n:
        raise DimensionMismatch("input or conceptor dimension does not match reservoir")
    return ReservoirState(c.c @ _leaky_update(p, s.x, p.w_in @ u), s.k + 1)


def _auto_increment(c: np.ndarray, x: np.ndarray, eta: float, gamma: float) -> np.ndarray:
    return eta * (np.outer(x - c @ x, x) - gamma ** -2 * c)


def autoconceptor_step(c: Conceptor, x, eta: float, gamma: float) -> Conceptor:
    """C += eta ((x - C x) x^T - gamma^-2 C), then symmetrised."""
    x = np.asarray(x, dtype=float)
    if x.shape != (c.n,):
        raise DimensionMismatch(f"state has shape {x.shape}, expected ({c.n},)")
    return Conceptor(_sym(c.c + _auto_increment(c.c, x, eta, gamma)), gamma)


def ccl_step(c: Conceptor, x, params: CclParams) -> tuple[Conceptor, Conceptor]:
    """Two-step control loop: online estimate, then a linear push to the target.

    Returns ``(c_next, c_adapt)``; the caller applies ``c_adapt``.
    """
    c_next = autoconceptor_step(c, x, params.eta, params.gamma)
    c_adapt = c_next.c - params.beta * (c_next.c - params.target.c)
    return c_next, Conceptor(c_adapt, params.gamma)


def merged_ccl_step(c_adapt: Conceptor, x, params: CclParams) -> Conceptor:
    """Single-conceptor loop: estimation and target feedback in one recursion."""
    x = np.asarray(x, dtype=float)
    if x.shape != (c_adapt.n,):
        raise DimensionMismatch(f"state has shape {x.shape}, expected ({c_adapt.n},)")
    c = c_adapt.c
    nxt = c + _auto_increment(c, x, params.eta, params.gamma) - params.beta * (c - params.target.c)
    return Conceptor(_sym(nxt), params.gamma)


def interpolate_conceptors(c0: Conceptor, c1: Conceptor, lam: float) -> Conceptor:
    """(1 - lam) C0 + lam C1; lam = 0 gives C0."""
    if not 0.0 <= lam <= 1.0:
        raise LambdaOutOfRange(f"lambda={lam} outside [0, 1]")
    if c0.n != c1.n:
        raise DimensionMismatch("conceptors differ in size")
    if c0.aperture != c1.aperture:
        raise InvalidParam("conceptors differ in aperture")
    return Conceptor((1.0 - lam) * c0.c + lam * c1.c, c0.aperture)


def save_conceptor(c: Conceptor, path) -> None:
    """CSV with a ``#conceptor,N,gamma`` header line, then N rows of float64."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"#conceptor,{c.n},{c.aperture!r}\n")
        for row in c.c:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_conceptor(path) -> Conceptor:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CclError(f"cannot read {path}: {exc}") from exc
    head = lines[0].split(",") if lines else []
    if len(head) != 3 or head[0] != "#conceptor":
        raise InvalidParam(f"{path}: missing '#conceptor,N,gamma' header")
    n, gamma = int(head[1]), float(head[2])
    c = np.array([[float(v) for v in line.split(",")] for line in lines[1:] if line])
    if c.shape != (n, n):
        raise DimensionMismatch(f"{path}: header says N={n} but matrix is {c.shape}")
    return Conceptor(c, gamma)
