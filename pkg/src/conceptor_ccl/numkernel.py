"""Numeric substrate: spectral radius scaling, PCA, ridge regression, RNG."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateInput, NotSquare, SingularSystem, ZeroSpectralRadius


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the stream depends only on ``seed``, not the platform."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def spectral_radius(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    return float(np.max(np.abs(linalg.eigvals(m))))


def scale_to_spectral_radius(m: np.ndarray, target: float) -> np.ndarray:
    """Return ``m * target / rho(m)``."""
    rho = spectral_radius(m)
    if rho <= np.finfo(float).tiny or not np.isfinite(rho):
        raise ZeroSpectralRadius("matrix has zero spectral radius")
    if target <= 0:
        raise ValueError("target spectral radius must be positive")
    return np.asarray(m, dtype=float) * (target / rho)


@dataclass(frozen=True)
class PcaResult:
    components: np.ndarray  # columns are principal axes
    variances: np.ndarray
    mean: np.ndarray

    def project(self, data: np.ndarray, k: int | None = None) -> np.ndarray:
        comps = self.components if k is None else self.components[:, :k]
        return (np.asarray(data) - self.mean) @ comps


def pca(states: np.ndarray) -> PcaResult:
    """PCA of ``states`` (L samples x N features) via the sample covariance.

    Variances use the 1/L normalisation, so they sum to the total variance
    ``np.var(states, axis=0).sum()``.
    """
    x = np.asarray(states, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise DegenerateInput("PCA needs at least two samples")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / x.shape[0]
    evals, evecs = linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    return PcaResult(components=evecs[:, order], variances=evals, mean=mean)


def ridge_solve(x: np.ndarray, y: np.ndarray, reg: float) -> np.ndarray:
    """Solve ``W = Y X^T (X X^T + reg I)^-1`` for X (N x L), Y (M x L)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"X has {x.shape[1]} samples but Y has {y.shape[1]}")
    if reg < 0:
        raise ValueError("reg must be nonnegative")
    a = x @ x.T + reg * np.eye(x.shape[0])
    rhs = x @ y.T
    try:
        w_t = linalg.cho_solve(linalg.cho_factor(a), rhs)
    except linalg.LinAlgError:
        if reg > 0:
            raise
        raise SingularSystem("X X^T is singular and reg = 0") from None
    if reg == 0 and np.linalg.cond(a) > 1e14:
        raise SingularSystem("X X^T is numerically singular and reg = 0")
    return w_t.T
