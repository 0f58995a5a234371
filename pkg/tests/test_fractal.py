import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_kernel
from nplab.fractal import (InsufficientScalesError, WeierstrassSpec, box_count_dimension, box_scale_grid,
                           boundary_condition_fit, boundary_layer_measure, weierstrass_eval)
from nplab.regions import axis_box, ball, interval, interval_union, weierstrass_domain


def test_weierstrass_spec():
    spec = WeierstrassSpec()
    assert spec.graph_dimension == pytest.approx(2 - math.log(2) / math.log(3))
    assert spec.eta == pytest.approx(math.log(2) / math.log(3))
    with pytest.raises(ValueError):
        WeierstrassSpec(0.2, 3.0)


def test_weierstrass_values():
    spec = WeierstrassSpec(0.5, 3.0, 10)
    assert weierstrass_eval(spec, 0.0) == pytest.approx(2 - 0.5 ** 10, rel=1e-14)
    x = np.linspace(-1, 1, 7)
    direct = sum(0.5 ** k * np.cos(2 * np.pi * 3.0 ** k * x) for k in range(11))
    np.testing.assert_allclose(weierstrass_eval(spec, x), direct, atol=1e-9)
    # integer period
    np.testing.assert_allclose(weierstrass_eval(spec, x + 1), weierstrass_eval(spec, x), atol=1e-12)


@settings(max_examples=30)
@given(st.floats(-10, 10))
def test_weierstrass_bounded_by_geometric_sum(x):
    spec = WeierstrassSpec()
    assert abs(weierstrass_eval(spec, x)) <= 1 / (1 - spec.a) + 1e-12


def test_box_count_weierstrass_graph():
    spec = WeierstrassSpec()
    res = box_count_dimension(lambda x: weierstrass_eval(spec, x), (0.0, 1.0))
    assert res.dimension == pytest.approx(spec.graph_dimension, abs=0.15)
    assert np.all(np.diff(res.counts) > 0)
    assert len(res.rows()) == res.deltas.size


def test_box_count_smooth_curves():
    res = box_count_dimension(np.sin, (0.0, 3.0))
    assert res.dimension == pytest.approx(1.0, abs=0.03)
    t = np.linspace(0, 1, 200_000)
    seg = np.column_stack([t, 0.3 * t])
    assert box_count_dimension(seg).dimension == pytest.approx(1.0, abs=0.03)


def test_box_count_needs_scales():
    with pytest.raises(InsufficientScalesError):
        box_count_dimension(np.sin, (0, 1), deltas=box_scale_grid(0.1, 5))
    with pytest.raises(ValueError):
        box_count_dimension(np.sin)


def test_box_count_grid_phase_insensitive():
    spec = WeierstrassSpec()
    f = lambda x: weierstrass_eval(spec, x)
    a = box_count_dimension(f, (0.0, 1.0)).dimension
    b = box_count_dimension(f, (0.0, 1.0), phase=0.5).dimension
    assert abs(a - b) < 0.02


def test_interval_boundary_layer_exact(k0):
    lay = boundary_layer_measure(interval(0, 1), k0.measure, [0.01, 0.1, 0.6])
    np.testing.assert_allclose(lay["measure"], [0.02, 0.2, 1.0], rtol=1e-12)
    fit = boundary_condition_fit(interval(0, 1), k0.measure, s0=0.3)
    assert fit.eta == pytest.approx(1.0, abs=1e-9)
    assert fit.c_star == pytest.approx(2.0, rel=1e-9)
    assert fit.exceeds_2s0 is True and fit.monotone and not fit.unreliable


def test_dunkl_boundary_layer_sees_reflected_set(k_half):
    # the complement's orbit fills the reflected copy (-1, 0), so 0 is not a boundary point
    lay = boundary_layer_measure(interval_union([[-1, 1]]), k_half.measure, [0.1])
    ref = math.sqrt(2) * (1 - 0.9 ** 2) / 2 * 2
    assert lay["measure"][0] == pytest.approx(ref, rel=1e-10)


def test_planar_layers_disk_and_square(k0):
    k2 = make_kernel(0.0, 2)
    r = np.array([0.01, 0.05, 0.1])
    disk = boundary_layer_measure(ball([0.0, 0.0], 1.0), k2.measure, r, n_samples=2 ** 16)
    exact = math.pi * (1 - (1 - r) ** 2)
    np.testing.assert_allclose(disk["measure"], exact, rtol=0.03)
    sq = boundary_layer_measure(axis_box([0, 0], [1, 1]), k2.measure, r, n_samples=2 ** 16)
    np.testing.assert_allclose(sq["measure"], 1 - (1 - 2 * r) ** 2, rtol=0.03)


def test_weierstrass_domain_eta():
    k2 = make_kernel(0.0, 2)
    fit = boundary_condition_fit(weierstrass_domain(), k2.measure)
    assert fit.eta == pytest.approx(math.log(2) / math.log(3), abs=0.15)
    d = fit.to_dict()
    assert set(d) >= {"eta", "c_star", "layers"}
