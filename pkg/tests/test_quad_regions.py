import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nplab.fields import constant, field_from_config, gaussian, indicator, tent
from nplab.quad import QuadSpec, gauss_jacobi, graded_rule, log_time_rule
from nplab.regions import (IntervalSet, axis_box, ball, half_space, interval, interval_union,
                           region_from_config, sector, weierstrass_domain, whole)

finite = st.floats(-5, 5, allow_nan=False)


@st.composite
def interval_sets(draw):
    pts = sorted(draw(st.lists(finite, min_size=0, max_size=6, unique=True)))
    if len(pts) % 2:
        pts = pts[:-1]
    return IntervalSet.of(list(zip(pts[::2], pts[1::2])))


def test_graded_rule_exact_for_polynomials():
    y, w = graded_rule(-1.0, 2.0, 0.3, 0.01, 32)
    assert np.sum(w) == pytest.approx(3.0, rel=1e-13)
    assert np.sum(w * y ** 3) == pytest.approx((16 - 1) / 4, rel=1e-9)


def test_graded_rule_resolves_endpoint_layer():
    y, w = graded_rule(0.0, 1.0, 0.0, 1e-6, 32)
    ref = 1e-6 * (1 - math.exp(-1e6))
    assert np.sum(w * np.exp(-y / 1e-6)) == pytest.approx(ref, rel=1e-8)


def test_gauss_jacobi_weight():
    x, w = gauss_jacobi(16, -0.5, 0.5)
    # 2^(a+b+1) B(a+1, b+1) = 2 Gamma(1/2) Gamma(3/2)
    assert np.sum(w) == pytest.approx(math.pi, rel=1e-13)


@given(st.floats(0.05, 3))
def test_log_time_rule_power(a):
    t, w = log_time_rule(1.0, 1e12, 2.0, 8)
    assert np.sum(w * t ** -a) == pytest.approx((1 - 1e-12 ** a) / a, rel=1e-9)


def test_quadspec_roundtrip():
    q = QuadSpec(rtol=1e-5, nodes=20)
    assert QuadSpec.from_dict(q.to_dict()) == q
    with pytest.raises(ValueError):
        QuadSpec.from_dict({"bogus": 1})


@given(interval_sets())
def test_complement_involution(S):
    assert S.complement().complement() == S
    assert S.intersect(S.complement()).length() == 0


@given(interval_sets(), interval_sets())
def test_length_inclusion_exclusion(A, B):
    lhs = A.union(B).length() + A.intersect(B).length()
    assert lhs == pytest.approx(A.length() + B.length(), abs=1e-12)


@given(interval_sets(), st.floats(-3, 3), st.floats(0.1, 4))
def test_affine_maps_scale_length(S, z, r):
    assert S.shift(z).length() == pytest.approx(S.length(), abs=1e-11)
    assert S.scale(r).length() == pytest.approx(r * S.length(), rel=1e-12, abs=1e-12)
    assert S.reflect().length() == pytest.approx(S.length(), abs=1e-12)


def test_interval_set_ends_and_unbounded():
    S = IntervalSet.of([(0, math.inf)])
    assert S.ends() == (False, True)
    assert not S.bounded
    assert whole(1).intervals.ends() == (True, True)


def test_region_predicates():
    assert bool(interval(0, 1)(0.5)) and not bool(interval(0, 1)(1.5))
    assert bool(ball([0, 0], 1)(np.array([0.5, 0.5])))
    assert not bool(half_space([1, 0])(np.array([-0.1, 3.0])))
    assert bool(sector(math.pi / 2)(np.array([1.0, 1.0])))
    assert bool(axis_box([0, 0], [1, 2])(np.array([0.5, 1.5])))
    U = interval(0, 1).union(interval(2, 3))
    assert U.intervals.length() == pytest.approx(2.0)


def test_region_tag_checks():
    for r in (ball([0, 0], 1), axis_box([0, 0], [1, 1]), interval_union([(0, 1), (2, 4)])):
        assert r.check_tag()


def test_region_config_roundtrip_and_errors():
    r = region_from_config({"kind": "interval_union", "intervals": [[0, "inf"]]})
    assert r.intervals == IntervalSet.of([(0, math.inf)])
    with pytest.raises(ValueError):
        region_from_config({"kind": "nope"})
    with pytest.raises(ValueError):
        region_from_config({"kind": "ball"})


def test_weierstrass_domain_is_bounded():
    W = weierstrass_domain()
    assert W.bounded
    assert bool(W(np.array([0.0, 0.0])))
    assert not bool(W(np.array([0.0, 2.5])))


def test_fields():
    assert indicator(0, 1)(0.5) == 1.0 and indicator(0, 1)(1.5) == 0.0
    assert tent()(0.5) == 1.0 and tent()(0.25) == pytest.approx(0.5)
    g = gaussian(0.3)
    x = np.linspace(-5, 5, 20001)
    assert np.trapezoid(g(x) ** 2, x) == pytest.approx(1.0, rel=1e-6)
    assert constant(2.0).is_constant
    assert field_from_config({"kind": "tent", "center": 0.2}) == tent(0.2)
    with pytest.raises(ValueError):
        field_from_config({"kind": "sawtooth"})
