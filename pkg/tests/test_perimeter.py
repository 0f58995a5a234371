import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_kernel
from nplab.quad import UnsupportedError
from nplab.perimeter import (classical_interaction, converse_xi_recover, interaction, iota_estimate,
                             lambda_tail, lambda_tail_closed_form, perimeter_classical, perimeter_dunkl,
                             relative_limit_verify, riesz_constant, riesz_interaction, weighted_perimeter,
                             weighted_vanishing_trend, xi_estimate)
from nplab.regions import ball, half_line, half_space, interval, interval_union, sector, whole
from nplab.specfun import gamma


def brute_riesz(a, b, c, d, s, n=4000):
    # midpoint rule on the gap-free 2-D integral, valid when the intervals are well separated
    x = a + (np.arange(n) + 0.5) * (b - a) / n
    y = c + (np.arange(n) + 0.5) * (d - c) / n
    return float(np.sum(np.abs(x[:, None] - y[None, :]) ** (-1 - 2 * s))) * (b - a) * (d - c) / n ** 2


def test_riesz_interaction_against_brute_force():
    assert riesz_interaction(interval(0, 1), interval(2, 3.5), 0.3) == pytest.approx(
        brute_riesz(0, 1, 2, 3.5, 0.3), rel=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 2), st.one_of(st.just(0.0), st.floats(1e-3, 1)), st.floats(0.1, 2),
       st.floats(0.02, 0.45))
def test_classical_interaction_matches_riesz(a, la, gap, lb, s):
    A, B = interval(a, a + la), interval(a + la + gap, a + la + gap + lb)
    assert classical_interaction(A, B, s) == pytest.approx(riesz_interaction(A, B, s), rel=1e-8)
    assert riesz_interaction(A, B, s) == pytest.approx(riesz_interaction(B, A, s), rel=1e-12)


@pytest.mark.parametrize("s", [0.05, 0.1, 0.2])
def test_interval_perimeter_closed_form(s):
    assert perimeter_classical(interval(0, 1), whole(1), s).value == pytest.approx(1 / (s * (1 - 2 * s)), rel=1e-4)


def test_time_route_matches_riesz(k0):
    s = 0.2
    A, B = interval(0, 1), interval_union([[1, 2], [3, math.inf]])
    val = interaction(k0, A, B, s)
    assert val == pytest.approx(riesz_constant(s) * riesz_interaction(A, B, s), rel=1e-4)


def test_dunkl_perimeter_reduces_to_classical(k0):
    s = 0.2
    factor = 2 ** (2 * s + 1) * gamma(0.5 + s) / math.sqrt(math.pi)
    d = perimeter_dunkl(k0, interval(0, 1), interval(-2, 2), s).value
    c = perimeter_classical(interval(0, 1), interval(-2, 2), s).value
    assert d == pytest.approx(factor * c, rel=1e-4)


def test_perimeter_edge_cases(k0):
    assert perimeter_classical(interval_union([]), interval(5, 6), 0.2).value == 0.0
    # E ⊃ Ω leaves only the pair (E∩Ω, Eᶜ∩Ωᶜ)
    r = perimeter_classical(interval(-1, 3), interval(0, 1), 0.2)
    assert r.decomposition[0] == 0.0 and r.decomposition[2] == 0.0 and r.value > 0
    with pytest.raises(UnsupportedError):
        interaction(k0, half_line(0, upper=False), half_line(1), 0.2)
    with pytest.raises(ValueError):
        perimeter_classical(interval(0, 1), whole(1), 0.6)


def test_dunkl_perimeter_reflection_invariant(k_half):
    a = perimeter_dunkl(k_half, interval(0.2, 1.3), interval(-1, 2), 0.25).value
    b = perimeter_dunkl(k_half, interval(-1.3, -0.2), interval(-2, 1), 0.25).value
    assert a == pytest.approx(b, rel=1e-8)


def test_lambda_tail_forms_agree(k0):
    E = half_line(0.3)
    for s in (0.05, 0.2):
        t = lambda_tail(k0, E, np.array([0.0]), 1.0, s)
        c = lambda_tail_closed_form(E, np.array([0.0]), 1.0, s)
        assert t == pytest.approx(c, rel=1e-6)


def test_xi_values(k0, k_half):
    assert abs(xi_estimate(k0, interval(-1, 2)).xi) < 0.03
    assert xi_estimate(k0, whole(1)).xi == pytest.approx(1.0, abs=0.03)
    assert xi_estimate(k0, half_line(0)).xi == pytest.approx(0.5, abs=0.03)
    assert xi_estimate(k_half, half_line(0)).xi == pytest.approx(0.5, abs=0.03)


def test_xi_two_dimensions():
    k = make_kernel(0.0, 2)
    assert xi_estimate(k, whole(2), x=[0.0, 0.0]).xi == pytest.approx(1.0, abs=0.03)
    assert xi_estimate(k, half_space([1.0, 0.0]), x=[0.0, 0.0]).xi == pytest.approx(0.5, abs=0.03)
    assert abs(xi_estimate(k, ball([0.0, 0.0], 1.5), x=[0.0, 0.0]).xi) < 0.03


@settings(max_examples=5, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=2, max_size=4, unique=True))
def test_xi_complement_sum(points):
    pts = sorted(points)
    E = interval_union([[pts[0], pts[1]]] + ([[pts[-1], math.inf]] if len(pts) > 2 else []))
    k = make_kernel(0.0)
    total = xi_estimate(k, E).xi + xi_estimate(k, E.complement()).xi
    assert total == pytest.approx(1.0, abs=0.03)


def test_iota_values():
    assert iota_estimate(whole(1)).limit == pytest.approx(1.0, rel=0.02)
    assert iota_estimate(whole(2)).limit == pytest.approx(math.pi, rel=0.02)
    assert iota_estimate(ball([0.0, 0.0], 3.0)).limit < 0.01
    # a sector of opening 1 carries ι = 1/2
    assert iota_estimate(sector(1.0)).limit == pytest.approx(0.5, rel=0.02)


def test_relative_limit_bounded(k0):
    rep = relative_limit_verify(k0, interval(-0.5, 0.5), interval(-1, 1))
    assert rep["target"] == pytest.approx(2.0, abs=0.01)
    assert rep["limit"] == pytest.approx(2.0, rel=0.02)
    assert rep["passed"]


def test_relative_limit_half_space(k0):
    rep = relative_limit_verify(k0, half_line(0), interval(-1, 1))
    assert rep["limit"] == pytest.approx(2.0, rel=0.03)
    assert rep["balanced"]
    assert rep["forms_agree"]


def test_converse_recovery(k0):
    rep = converse_xi_recover(k0, half_line(0), interval(-2, 1))
    assert rep["gap"] <= 0.05
    assert rep["recovered"] == pytest.approx(0.5, abs=0.05)
    with pytest.raises(ValueError):
        converse_xi_recover(k0, half_line(0), interval(-1, 1))


def test_weighted_perimeter_vanishing(k0):
    rep = weighted_vanishing_trend(k0.measure, interval(0, 1), whole(1))
    assert rep["decreasing"]
    assert rep["final_over_first"] < 0.1


def test_weighted_perimeter_divergence_is_infinite(k_half):
    # the weight vanishes at 0, so a boundary point at the origin changes the diagonal rate
    assert math.isinf(weighted_perimeter(k_half.measure, interval(0, 1), interval(-2, 2), 0.2))


def test_reflected_overlap_is_finite(k_half, light_quad):
    # the reflected copy of E∩Ω overlaps Eᶜ∩Ωᶜ; large-time quadrature noise must not read as divergence
    E, O = interval(-0.2990855006036979, 0.48085380806151123), interval(-0.23972916414542356, 2.6936620496265924)
    light = perimeter_dunkl(k_half, E, O, 0.2, light_quad).value
    assert math.isfinite(light)
    assert light == pytest.approx(perimeter_dunkl(k_half, E, O, 0.2).value, rel=1e-4)
