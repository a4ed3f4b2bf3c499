import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given, settings
from hypothesis import strategies as st

from conceptor_ccl.errors import DimensionMismatch, InvalidParam
from conceptor_ccl.metrics import nrmse
from conceptor_ccl.numkernel import make_rng, spectral_radius
from conceptor_ccl.reservoir import ReservoirParams, ReservoirState, drive_step
from conceptor_ccl.rfc import (Hierarchy, RfcLayer, VectorConceptor, drive_layer, hierarchy_step, rfc_init,
                               rfc_step, train_layer, vector_ccl_step)
from conceptor_ccl.signals import gen_two_sine


@pytest.fixture(scope="module")
def trained():
    w = rfc_init(50, 200, 0.9, 0.9, 0.2, seed=0)
    c_target, readout = train_layer(w, gen_two_sine(3001).data, 8.0, 0.01, 100)
    return w, c_target, readout


def test_init_spectral_radius_and_determinism():
    w = rfc_init(50, 200, 0.9, 0.9, 0.2, seed=3)
    assert spectral_radius(w.g @ w.f_expand) == pytest.approx(0.9, abs=1e-6)
    v = rfc_init(50, 200, 0.9, 0.9, 0.2, seed=3)
    assert all(np.array_equal(a, b) for a, b in
               ((w.f_expand, v.f_expand), (w.g, v.g), (w.w_in, v.w_in), (w.bias, v.bias)))


def test_init_rejects_small_expansion():
    with pytest.raises(InvalidParam):
        rfc_init(10, 5, 0.9, 1.0, 1.0)


def test_identity_expansion_reduces_to_reservoir():
    w = rfc_init(8, 8, 0.9, 1.0, 0.5, seed=1, identity_expansion=True)
    p = ReservoirParams(w=w.g, w_in=w.w_in, bias=w.bias, alpha=1.0, rho=0.9, rho_in=1.0, rho_b=0.5)
    layer = RfcLayer(w, VectorConceptor(np.ones(8), 8.0))
    s = ReservoirState.zeros(8)
    for u in gen_two_sine(30).channel():
        x, _, _ = rfc_step(layer, u)
        s = drive_step(p, s, u)
        assert np.allclose(x, s.x, atol=1e-14)


def test_zero_conceptor_forgets_history():
    w = rfc_init(10, 40, 0.9, 1.0, 0.5, seed=2)
    layer = RfcLayer(w, VectorConceptor(np.zeros(40), 8.0), x=np.ones(10), z=make_rng(0).standard_normal(40))
    _, z, _ = rfc_step(layer, 0.3)
    assert np.all(z == 0)
    x, _, _ = rfc_step(layer, 0.7)
    assert np.allclose(x, np.tanh(w.w_in[:, 0] * 0.7 + w.bias))


def test_ones_conceptor_is_unconstrained():
    w = rfc_init(10, 40, 0.9, 1.0, 0.5, seed=2)
    layer = RfcLayer(w, VectorConceptor(np.ones(40), 8.0))
    x, z, _ = rfc_step(layer, 0.5)
    assert np.allclose(z, w.f_expand @ x)


def test_conceptor_length_checked():
    w = rfc_init(10, 40, 0.9, 1.0, 0.5)
    with pytest.raises(DimensionMismatch):
        RfcLayer(w, VectorConceptor(np.ones(39), 8.0))


def test_trained_layer_predicts_clean_signal(trained):
    w, c_target, readout = trained
    u = gen_two_sine(1600).data
    xs, _ = drive_layer(w, c_target.c, u[:-1])
    pred = xs[1099:] @ readout.w_out.T
    assert nrmse(pred, u[1100:]) < 0.1


def test_vector_ccl_limits():
    c = VectorConceptor(np.full(5, 0.4), 8.0)
    tgt = VectorConceptor(np.linspace(0, 1, 5), 8.0)
    z = make_rng(0).standard_normal(5)
    assert np.allclose(vector_ccl_step(c, z, 1e-300, 8.0, 1.0, tgt).c, tgt.c)
    out = vector_ccl_step(c, np.zeros(5), 0.8, 8.0, 0.0, tgt)
    assert np.allclose(out.c, (1 - 0.8 / 64) * c.c)


def test_vector_ccl_scalar_fixed_point():
    z, gamma = 0.3, 8.0
    c = VectorConceptor(np.array([1.0]), gamma)
    for _ in range(2000):
        c = vector_ccl_step(c, np.array([z]), 0.5, gamma, 0.0, c)
    assert c.c[0] == pytest.approx(z * z / (z * z + gamma ** -2), abs=1e-12)


def test_vector_ccl_stationary_convergence():
    rng = make_rng(4)
    scale = np.linspace(0.05, 1.0, 30)
    c = VectorConceptor(np.ones(30), 4.0)
    total = np.zeros(30)
    for k in range(100_000):
        c = vector_ccl_step(c, scale * rng.standard_normal(30), 0.005, 4.0, 0.0, c)
        if k >= 50_000:
            total += c.c
    expect = scale ** 2 / (scale ** 2 + 4.0 ** -2)
    assert np.all(np.abs(total / 50_000 - expect) < 0.05 * expect)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 1.0), st.floats(0.01, 0.99), st.floats(1.0, 20.0))
def test_vector_conceptor_stays_in_unit_interval(seed, beta, eta_frac, gamma):
    rng = make_rng(seed)
    eta = eta_frac * gamma ** 2
    c = VectorConceptor(rng.uniform(0, 1, 20), gamma)
    tgt = rng.uniform(0, 1, 20)
    for z in rng.normal(0, 3, (30, 20)):
        c = vector_ccl_step(c, z, eta, gamma, beta, tgt)
        assert np.all((c.c >= 0) & (c.c <= 1))


def test_one_layer_hierarchy_matches_manual_steps(trained):
    w, c_target, readout = trained
    h = Hierarchy.build(w, readout, c_target, 1, 0.8, 4e-3)
    manual = RfcLayer(w, replace(c_target), readout)
    for u in 0.3 * gen_two_sine(100).channel():
        out = hierarchy_step(h, u)
        manual.c_adapt = vector_ccl_step(manual.c_adapt, manual.z, 0.8, 8.0, 4e-3, c_target)
        _, _, y = rfc_step(manual, u)
        assert np.array_equal(out[0], y)


def test_frozen_hierarchy_is_eventually_periodic(trained):
    w, c_target, readout = trained
    h = Hierarchy.build(w, readout, c_target, 3, 0.8, 4e-3, adapt=False)
    out = np.array([hierarchy_step(h, u)[-1, 0] for u in gen_two_sine(1500).channel()])
    tail = out[-400:]
    assert np.max(np.abs(tail[21:] - tail[:-21])) < 1e-6


def test_hierarchy_layers_share_weights(trained):
    w, c_target, readout = trained
    h = Hierarchy.build(w, readout, c_target, 3, 0.8, 4e-3)
    assert all(layer.weights is w and layer.readout is readout for layer in h.layers)
    assert all(np.array_equal(layer.c_adapt.c, c_target.c) for layer in h.layers)
    with pytest.raises(InvalidParam):
        Hierarchy.build(w, readout, c_target, 0, 0.8, 4e-3)
