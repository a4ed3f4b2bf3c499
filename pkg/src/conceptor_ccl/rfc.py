"""Random feature conceptor layers and the layered equalisation hierarchy.

Each layer has a base state x (N) and an expanded state z (N_RFC):

    x(k+1) = tanh(G z(k) + W_in u(k) + b)
    z(k+1) = c(k) * (F' x(k+1))

where the conceptor c is a vector acting elementwise in z-space.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, InvalidParam
from .numkernel import make_rng, ridge_solve, spectral_radius
from .reservoir import Readout


@dataclass(frozen=True)
class VectorConceptor:
    c: np.ndarray
    aperture: float

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        if self.c.ndim != 1:
            raise DimensionMismatch("vector conceptor must be one-dimensional")
        if not self.aperture > 0:
            raise InvalidParam("aperture must be positive")


@dataclass(frozen=True)
class RfcWeights:
    """Fixed weights of one layer; shared by every layer of a hierarchy."""

    f_expand: np.ndarray  # F', N_RFC x N
    g: np.ndarray  # G, N x N_RFC
    w_in: np.ndarray  # N x M_in
    bias: np.ndarray
    rho: float

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def n_rfc(self) -> int:
        return self.g.shape[1]


@dataclass
class RfcLayer:
    weights: RfcWeights
    c_adapt: VectorConceptor
    readout: Readout | None = None
    x: np.ndarray = field(default=None)
    z: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.x is None:
            self.x = np.zeros(self.weights.n)
        if self.z is None:
            self.z = np.zeros(self.weights.n_rfc)
        if self.c_adapt.c.shape != (self.weights.n_rfc,):
            raise DimensionMismatch("conceptor length must equal n_rfc")


def rfc_init(n: int, n_rfc: int, rho: float, rho_in: float, rho_b: float, m_in: int = 1,
             seed: int = 0, identity_expansion: bool = False) -> RfcWeights:
    """Random expansion F' (entries N(0, 1/N)), compression F_comp (entries
    N(0, 1/N_RFC)), G = W F_comp rescaled so that rho(G F') = ``rho``.

    ``identity_expansion`` (requires n_rfc == n) forces F' = I so the layer
    reduces to a plain tanh reservoir with recurrent matrix G.
    """
    if n < 1 or n_rfc < n:
        raise InvalidParam("need n >= 1 and n_rfc >= n")
    if not rho > 0:
        raise InvalidParam("rho must be positive")
    rng = make_rng(seed)
    w = rng.standard_normal((n, n))
    if identity_expansion:
        if n_rfc != n:
            raise InvalidParam("identity expansion needs n_rfc == n")
        f_expand = np.eye(n)
    else:
        f_expand = rng.standard_normal((n_rfc, n)) / np.sqrt(n)
    f_comp = rng.standard_normal((n, n_rfc)) / np.sqrt(n_rfc)
    g = w @ f_comp
    g *= rho / spectral_radius(g @ f_expand)
    w_in = rho_in * rng.standard_normal((n, m_in))
    bias = rho_b * rng.standard_normal(n)
    return RfcWeights(f_expand=f_expand, g=g, w_in=w_in, bias=bias, rho=rho)


def rfc_step(layer: RfcLayer, u) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Advance one layer in place; returns ``(x_next, z_next, y)``.

    ``y`` is the readout of x_next, or None when no readout is attached.
    """
    w = layer.weights
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (w.w_in.shape[1],):
        raise DimensionMismatch(f"input has shape {u.shape}, expected ({w.w_in.shape[1]},)")
    x = np.tanh(w.g @ layer.z + w.w_in @ u + w.bias)
    z = layer.c_adapt.c * (w.f_expand @ x)
    layer.x, layer.z = x, z
    y = None if layer.readout is None else layer.readout(x)
    return x, z, y


def vector_ccl_step(c_adapt: VectorConceptor, z, eta: float, gamma: float, beta: float,
                    c_target: VectorConceptor | np.ndarray) -> VectorConceptor:
    """c += eta (z^2 - c z^2 - gamma^-2 c) - beta (c - c_target), clipped to [0, 1]."""
    z2 = np.square(np.asarray(z, dtype=float))
    c = c_adapt.c
    tgt = getattr(c_target, "c", c_target)
    nxt = c + eta * (z2 - c * z2 - gamma ** -2 * c) - beta * (c - tgt)
    return VectorConceptor(np.clip(nxt, 0.0, 1.0), gamma)


def drive_layer(weights: RfcWeights, c: np.ndarray, inputs: np.ndarray):
    """Drive from rest with a fixed conceptor; returns (X, Z) as L x N, L x N_RFC."""
    inputs = np.asarray(inputs, dtype=float).reshape(len(inputs), -1)
    x = np.zeros(weights.n)
    z = np.zeros(weights.n_rfc)
    xs = np.empty((len(inputs), weights.n))
    zs = np.empty((len(inputs), weights.n_rfc))
    drives = inputs @ weights.w_in.T + weights.bias
    for k, d in enumerate(drives):
        x = np.tanh(weights.g @ z + d)
        z = c * (weights.f_expand @ x)
        xs[k], zs[k] = x, z
    return xs, zs


def fit_target_conceptor(weights: RfcWeights, inputs: np.ndarray, gamma: float, washout: int = 100,
                         max_iter: int = 200, tol: float = 1e-9) -> VectorConceptor:
    """Iterate c <- E[z^2] / (E[z^2] + gamma^-2) on a clean drive, starting from c = 1."""
    c = np.ones(weights.n_rfc)
    for _ in range(max_iter):
        _, zs = drive_layer(weights, c, inputs)
        ez2 = np.mean(zs[washout:] ** 2, axis=0)
        nxt = ez2 / (ez2 + gamma ** -2)
        done = np.max(np.abs(nxt - c)) < tol
        c = nxt
        if done:
            break
    return VectorConceptor(c, gamma)


def train_layer(weights: RfcWeights, series: np.ndarray, gamma: float, reg: float,
                washout: int = 100) -> tuple[VectorConceptor, Readout]:
    """Target conceptor plus a one-step-ahead ridge readout from a clean drive."""
    series = np.asarray(series, dtype=float).reshape(len(series), -1)
    c_target = fit_target_conceptor(weights, series[:-1], gamma, washout)
    xs, _ = drive_layer(weights, c_target.c, series[:-1])
    w_out = ridge_solve(xs[washout:].T, series[washout + 1:].T, reg)
    return c_target, Readout(w_out, reg)


@dataclass
class Hierarchy:
    """L copies of one trained layer, each feeding its readout to the next."""

    layers: list[RfcLayer]
    c_target: VectorConceptor
    eta: float
    beta: float
    adapt: bool = True

    @classmethod
    def build(cls, weights: RfcWeights, readout: Readout, c_target: VectorConceptor, n_layers: int,
              eta: float, beta: float, adapt: bool = True) -> "Hierarchy":
        if n_layers < 1:
            raise InvalidParam("hierarchy needs at least one layer")
        layers = [RfcLayer(weights, replace(c_target), readout) for _ in range(n_layers)]
        return cls(layers, c_target, eta, beta, adapt)


def hierarchy_step(h: Hierarchy, u_distorted) -> np.ndarray:
    """Advance every layer once, bottom to top; returns outputs as an L x M array.

    Each layer's conceptor is updated from the z(k) it held before the step,
    then x and z advance under the updated conceptor.
    """
    inp = np.atleast_1d(np.asarray(u_distorted, dtype=float))
    outs = []
    for layer in h.layers:
        if h.adapt:
            layer.c_adapt = vector_ccl_step(layer.c_adapt, layer.z, h.eta, h.c_target.aperture,
                                            h.beta, h.c_target)
        _, _, y = rfc_step(layer, inp)
        outs.append(y)
        inp = y
    return np.array(outs)
