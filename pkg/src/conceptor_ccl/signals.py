"""Signal generators, CSV ingestion and distortion operators."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CclError, InvalidParam, ParseError
from .numkernel import make_rng


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled multi-channel signal, stored time-major (L x M)."""

    data: np.ndarray
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidParam(f"time series must be a non-empty L x M array, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidParam("time series contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != data.shape[1]:
                raise InvalidParam("label count does not match channel count")
            object.__setattr__(self, "labels", labels)

    @property
    def length(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]

    def __len__(self):
        return self.length

    def channel(self, m: int = 0) -> np.ndarray:
        return self.data[:, m]

    def slice(self, start: int, stop: int | None = None) -> "TimeSeries":
        return TimeSeries(self.data[start:stop], self.labels)


@dataclass(frozen=True)
class DistortionSpec:
    gain: float = 1.0
    offset: float = 0.0
    onset: int = 0

    def __post_init__(self):
        if self.onset < 0:
            raise InvalidParam("onset must be >= 0")


def gen_sine(period: float, length: int, amplitude: float = 1.0, phase: float = 0.0) -> TimeSeries:
    """``amplitude * sin(2 pi n / period + phase)`` for n = 0 .. length-1."""
    if not period > 0:
        raise InvalidParam("period must be positive")
    if length < 1:
        raise InvalidParam("length must be >= 1")
    n = np.arange(length)
    return TimeSeries(amplitude * np.sin(2 * np.pi * n / period + phase))


def gen_two_sine(length: int, periods: Sequence[float] = (7.0, 21.0), amplitude: float = 1.0) -> TimeSeries:
    if length < 1:
        raise InvalidParam("length must be >= 1")
    n = np.arange(length)
    u = sum(np.sin(2 * np.pi * n / p) for p in periods)
    return TimeSeries(amplitude * u)


def gen_multivar_cycle(channels: int, period: float, length: int, seed: int) -> TimeSeries:
    """Multichannel limit cycle: each channel is a sine of the shared period
    with its own seeded amplitude, phase and offset.

    Amplitudes are drawn from U(0.5, 1.5), phases from U(0, 2 pi) and offsets
    from N(0, 0.1^2).
    """
    if channels < 1:
        raise InvalidParam("channels must be >= 1")
    if not period > 0 or length < 1:
        raise InvalidParam("period must be positive and length >= 1")
    rng = make_rng(seed)
    amps = rng.uniform(0.5, 1.5, channels)
    phases = rng.uniform(0.0, 2 * np.pi, channels)
    offsets = rng.normal(0.0, 0.1, channels)
    n = np.arange(length)[:, None]
    return TimeSeries(amps * np.sin(2 * np.pi * n / period + phases) + offsets)


def standardize(u: TimeSeries) -> TimeSeries:
    """Per-channel zero mean and unit variance; constant channels are only centred."""
    mean = u.data.mean(axis=0)
    std = u.data.std(axis=0)
    std[std == 0] = 1.0
    return TimeSeries((u.data - mean) / std, u.labels)


def distort(u: TimeSeries, spec: DistortionSpec) -> TimeSeries:
    out = np.array(u.data)
    out[spec.onset:] = spec.gain * out[spec.onset:] + spec.offset
    return TimeSeries(out, u.labels)


def _parse_float(cell: str) -> float:
    value = float(cell)
    if not math.isfinite(value):
        raise ValueError(cell)
    return value


def load_csv(path) -> TimeSeries:
    """Read a rectangular numeric CSV (one time step per row, optional header)."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise CclError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: empty file", row=1)

    labels = None
    try:
        [_parse_float(c) for c in rows[0]]
        start = 0
    except ValueError:
        labels = tuple(c.strip() for c in rows[0])
        start = 1

    width = len(rows[0])
    values = []
    for i, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise ParseError(f"{path}: row {i} has {len(row)} cells, expected {width}", row=i)
        parsed = []
        for j, cell in enumerate(row, start=1):
            try:
                parsed.append(_parse_float(cell))
            except ValueError:
                raise ParseError(f"{path}: row {i}, column {j}: non-numeric cell {cell!r}",
                                 row=i, column=j) from None
        values.append(parsed)
    if not values:
        raise ParseError(f"{path}: no data rows", row=start + 1)
    return TimeSeries(np.array(values), labels)
