"""NRMSE, phase alignment, period/amplitude tracking and the PC-variance
failure detector."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotSingleChannel, SeriesTooShort, ShapeMismatch, ZeroVarianceTarget
from .numkernel import pca
from .signals import TimeSeries


def _as_2d(a) -> np.ndarray:
    a = a.data if isinstance(a, TimeSeries) else np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def nrmse(pred, target) -> float:
    """Channel-averaged sqrt(MSE / var(target))."""
    p, t = _as_2d(pred), _as_2d(target)
    if p.shape != t.shape:
        raise ShapeMismatch(f"pred {p.shape} vs target {t.shape}")
    var = t.var(axis=0)
    if np.any(var <= 0):
        raise ZeroVarianceTarget("target has a constant channel")
    return float(np.mean(np.sqrt(np.mean((p - t) ** 2, axis=0) / var)))


def _overlap(p: np.ndarray, t: np.ndarray, lag: int):
    # pred(n) ~ target(n - lag)
    if lag >= 0:
        return p[lag:], t[:len(t) - lag]
    return p[:len(p) + lag], t[-lag:]


def phase_align(pred, target, max_lag: int):
    """Integer lag in [-max_lag, max_lag] at which pred best matches target.

    A positive lag means pred is delayed relative to target. The score is the
    channel-averaged Pearson correlation over the overlap; ties go to the
    smallest |lag|. Returns ``(lag, aligned_pred, aligned_target)``.
    """
    p, t = _as_2d(pred), _as_2d(target)
    if p.shape[1] != t.shape[1]:
        raise ShapeMismatch("pred and target differ in channel count")
    n = min(len(p), len(t))
    if max_lag < 0 or n - max_lag < 2:
        raise SeriesTooShort(f"need more than {max_lag + 1} samples for max_lag={max_lag}")
    p, t = p[:n], t[:n]
    best_lag, best = 0, -np.inf
    for lag in sorted(range(-max_lag, max_lag + 1), key=lambda v: (abs(v), v)):
        score = _mean_corr(*_overlap(p, t, lag))
        if score > best + 1e-12:
            best_lag, best = lag, score
    a, b = _overlap(p, t, best_lag)
    return best_lag, a, b


@dataclass(frozen=True)
class PeriodTrace:
    """Windowed period and amplitude; NaN marks windows without a defined period."""

    start: np.ndarray
    period: np.ndarray
    amplitude: np.ndarray
    window: int

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.period)


def _upward_crossings(u: np.ndarray) -> np.ndarray:
    """Sub-sample positions where ``u`` crosses zero going up."""
    a, b = u[:-1], u[1:]
    idx = np.nonzero((a < 0) & (b >= 0))[0]
    return idx + a[idx] / (a[idx] - b[idx])


def estimate_period(u, window: int, step: int | None = None, min_amplitude: float = 1e-6) -> PeriodTrace:
    """Mean spacing of upward zero crossings of the mean-removed signal, per window.

    Windows with fewer than two crossings, or whose half peak-to-peak
    amplitude is below ``min_amplitude``, have an undefined (NaN) period.
    """
    a = _as_2d(u)
    if a.shape[1] != 1:
        raise NotSingleChannel(f"expected one channel, got {a.shape[1]}")
    a = a[:, 0]
    step = window if step is None else step
    if window < 2 or step < 1:
        raise ValueError("window must be >= 2 and step >= 1")
    starts = np.arange(0, max(len(a) - window, 0) + 1, step)
    periods = np.full(len(starts), np.nan)
    amps = np.zeros(len(starts))
    for i, s in enumerate(starts):
        seg = a[s:s + window]
        amps[i] = 0.5 * (seg.max() - seg.min())
        if amps[i] < min_amplitude:
            continue
        cross = _upward_crossings(seg - seg.mean())
        if len(cross) >= 2:
            periods[i] = (cross[-1] - cross[0]) / (len(cross) - 1)
    return PeriodTrace(starts, periods, amps, window)


@dataclass(frozen=True)
class FailureVerdict:
    failed: bool
    pc1_variance: float
    threshold: float


def detect_failure(states, threshold: float = 1.0) -> FailureVerdict:
    """Fail when the leading PCA variance of ``states`` (N x L) drops below threshold."""
    x = np.asarray(states, dtype=float)
    var = float(pca(x.T).variances[0])
    return FailureVerdict(var < threshold, var, threshold)


def _mean_corr(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    denom = np.sqrt((a * a).sum(axis=0) * (b * b).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0, (a * b).sum(axis=0) / denom, 0.0)
    return float(corr.mean())


def best_shift_nrmse(pred, reference, max_shift: int) -> tuple[int, float]:
    """Compare ``pred`` (W samples) with ``reference[s:s+W]`` for s in
    [0, max_shift], pick the shift with the highest channel-averaged
    correlation and return ``(shift, nrmse)`` at that shift."""
    p, r = _as_2d(pred), _as_2d(reference)
    w = len(p)
    if max_shift < 0 or len(r) < w + max_shift:
        raise SeriesTooShort(f"reference needs {w + max_shift} samples, has {len(r)}")
    if p.shape[1] != r.shape[1]:
        raise ShapeMismatch("pred and reference differ in channel count")
    best_s, best = 0, -np.inf
    for s in range(max_shift + 1):
        score = _mean_corr(p, r[s:s + w])
        if score > best + 1e-12:
            best_s, best = s, score
    return best_s, nrmse(p, r[best_s:best_s + w])
