"""Compiled closed-loop kernel for long autonomous runs.

Numerically it is the same recursion as chaining ``autonomous_step`` with
``merged_ccl_step`` / ``ccl_step`` (the test suite checks this), fused into
one loop so that runs of 10^5 steps at N = 256 take seconds.
"""
from __future__ import annotations

import numba
import numpy as np

STATIC, MERGED, TWO_STEP = 0, 1, 2


@numba.njit(cache=True)
def _closed_loop(wf, bias, alpha, w_out, x, c, c0, dc, k0, rate, mode, eta, gamma, beta,
                 clamp, ys, xs):
    n = x.shape[0]
    m = w_out.shape[0]
    decay = 1.0 - eta * gamma ** -2
    pre = np.empty(n)
    nxt = np.empty(n)
    cx = np.empty(n)
    for k in range(ys.shape[0]):
        lam = min(1.0, rate * (k0 + k))
        for i in range(m):
            acc = 0.0
            for j in range(n):
                acc += w_out[i, j] * x[j]
            ys[k, i] = acc
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += wf[i, j] * x[j]
            pre[i] = (1.0 - alpha) * x[i] + alpha * np.tanh(acc + bias[i])
        if mode == STATIC:
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += (c0[i, j] + lam * dc[i, j]) * pre[j]
                nxt[i] = acc
        elif mode == MERGED:
            # apply C_adapt(k), then C_adapt(k+1) from x(k)
            for i in range(n):
                a1 = 0.0
                a2 = 0.0
                for j in range(n):
                    a1 += c[i, j] * pre[j]
                    a2 += c[i, j] * x[j]
                nxt[i] = a1
                cx[i] = a2
            for i in range(n):
                ri = x[i] - cx[i]
                for j in range(i, n):
                    v = ((decay - beta) * c[i, j]
                         + 0.5 * eta * (ri * x[j] + x[i] * (x[j] - cx[j]))
                         + beta * (c0[i, j] + lam * dc[i, j]))
                    c[i, j] = v
                    c[j, i] = v
        else:
            # C(k+1) from x(k), then apply C(k+1) - beta (C(k+1) - C_target)
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += c[i, j] * x[j]
                cx[i] = acc
            for i in range(n):
                ri = x[i] - cx[i]
                for j in range(i, n):
                    v = decay * c[i, j] + 0.5 * eta * (ri * x[j] + x[i] * (x[j] - cx[j]))
                    c[i, j] = v
                    c[j, i] = v
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += ((1.0 - beta) * c[i, j] + beta * (c0[i, j] + lam * dc[i, j])) * pre[j]
                nxt[i] = acc
        for i in range(n):
            x[i] = nxt[i]
        for i in clamp:
            x[i] = 0.0
        for i in range(n):
            xs[k, i] = x[i]
        if not np.isfinite(x[0]):
            return k + 1
    return ys.shape[0]


class ClosedLoop:
    """Stateful wrapper: autonomous reservoir with a static, merged-CCL or
    two-step-CCL conceptor whose target moves along ``c0 + lambda(k) (c1 - c0)``
    with lambda(k) = min(1, rate k).
    """

    def __init__(self, params, readout, x0, c0, c1=None, rate=0.0, mode=STATIC,
                 eta=0.0, gamma=1.0, beta=0.0, c_init=None, clamp=None):
        self.wf = np.ascontiguousarray(params.w + params.w_in @ readout.w_out)
        self.bias = np.ascontiguousarray(params.bias, dtype=float)
        self.alpha = float(params.alpha)
        self.w_out = np.ascontiguousarray(readout.w_out, dtype=float)
        self.x = np.array(x0, dtype=float)
        self.c0 = np.ascontiguousarray(c0, dtype=float)
        self.dc = np.zeros_like(self.c0) if c1 is None else np.ascontiguousarray(c1 - self.c0)
        start = self.c0 if c_init is None else c_init
        self.c = np.array(start, dtype=float, order="C")
        self.rate = float(rate)
        self.mode = int(mode)
        self.eta, self.gamma, self.beta = float(eta), float(gamma), float(beta)
        self.clamp = np.zeros(0, dtype=np.int64) if clamp is None else np.asarray(clamp, dtype=np.int64)
        self.k = 0
        if self.clamp.size:
            self.x[self.clamp] = 0.0

    def run(self, steps: int):
        """Advance ``steps`` steps; returns outputs (steps x M) and the states
        reached after each step (steps x N). Raises FloatingPointError on divergence."""
        ys = np.empty((steps, self.w_out.shape[0]))
        xs = np.empty((steps, self.x.shape[0]))
        done = _closed_loop(self.wf, self.bias, self.alpha, self.w_out, self.x, self.c, self.c0,
                            self.dc, self.k, self.rate, self.mode, self.eta, self.gamma, self.beta,
                            self.clamp, ys, xs)
        self.k += done
        if done < steps or not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise FloatingPointError(f"closed-loop run diverged near step {self.k}")
        return ys, xs
