import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcrigid.dynamics import (
    ChartEscapeError,
    DomainError,
    EmbeddedManifold1D,
    SmoothMap,
    c1_distance,
    c1_distance_to_identity,
    check_diffeomorphism,
    compose,
    displacement_field,
    displacement_matrix,
    identity_map,
    iterate,
    make_affine_on_chart,
    make_broken_fixture,
    make_navas_action,
    make_trivial_perturbed,
    navas_conjugate,
    orbit,
    quadratic_map,
    row_bound_stats,
    scaling,
    sine_map,
    translation,
)
from abcrigid.group import IntegerMatrix

from .oracles import circle_c1_distance

I = EmbeddedManifold1D.interval()
S1 = EmbeddedManifold1D.circle()


def fd(h, x, step=1e-7):
    return (h(x + step) - h(x - step)) / (2 * step)


def test_navas_values():
    F, G = navas_conjugate(2.0, 1.0)
    assert F(0.0) == 0.0 and G(0.0) == 0.0
    assert F(0.5) == pytest.approx(1 / (2 + math.log(2)), abs=1e-15)
    assert F(0.5) == pytest.approx(0.37131279241563214, abs=1e-15)


def test_navas_tangent_to_identity():
    F, G = navas_conjugate(2.0, 1.0)
    for h in (F, G, F.inverse(), G.inverse()):
        for h0 in (1e-6, 1e-7):
            assert abs(h(h0) / h0 - 1) < 1e-4
        assert float(h.derivative(0.0)) == 1.0


def test_navas_is_conjugated_affine():
    # phi(h(x)) with phi = exp(1/x) should be 2 phi(x) and phi(x) + 1
    F, G = navas_conjugate(2.0, 1.0)
    xs = np.linspace(0.1, 0.9, 50)
    assert np.allclose(np.exp(1 / F(xs)), 2 * np.exp(1 / xs), rtol=1e-12)
    assert np.allclose(np.exp(1 / G(xs)), np.exp(1 / xs) + 1, rtol=1e-12)


def test_navas_g_squared():
    _, G = navas_conjugate(2.0, 1.0)
    _, G2 = navas_conjugate(2.0, 2.0)
    xs = np.linspace(0, 0.9, 1000)
    assert np.max(np.abs(G(G(xs)) - G2(xs))) < 1e-15


@pytest.mark.parametrize("which", range(4))
def test_navas_derivatives_match_fd(which):
    F, G = navas_conjugate(2.0, 1.0)
    h = (F, G, F.inverse(), G.inverse())[which]
    xs = np.linspace(0.02, 0.6, 200)
    assert np.max(np.abs(h.derivative(xs) - fd(h, xs))) < 1e-6


def test_navas_action_relation():
    act = make_navas_action(2)
    res = act.relation_residuals(np.linspace(0.05, 0.9, 2000))
    assert max(res) < 1e-8


def test_navas_domain():
    F, _ = navas_conjugate(2.0, 1.0)
    with pytest.raises(ChartEscapeError):
        F.inverse()(1.5)
    with pytest.raises(ValueError):
        navas_conjugate(1.0, 1.0)
    with pytest.raises(ValueError):
        make_navas_action(IntegerMatrix(((2, 0), (0, 3))))


def test_c1_distance_examples():
    assert c1_distance_to_identity(scaling(2.0), I) == 2.0
    assert c1_distance(translation(0.25), translation(0.25), I) == 0.0
    h = sine_map(0.001, 0.0, S1)
    assert c1_distance_to_identity(h, S1, 100_000) == pytest.approx(0.012566380949040775, rel=1e-6)
    s = 0.001
    ref = circle_c1_distance(lambda x: s * np.sin(2 * np.pi * x),
                             lambda x: 1 + 2 * np.pi * s * np.cos(2 * np.pi * x))
    assert c1_distance_to_identity(h, S1, 100_000) == pytest.approx(ref, rel=1e-6)


def test_c1_distance_of_iterate():
    h = sine_map(0.001, 0.0, S1)
    d = c1_distance_to_identity(h, S1, 100_000)
    d3 = c1_distance_to_identity(iterate(h, 3), S1, 100_000)
    assert d3 == pytest.approx(0.03769889486468578, rel=1e-6)
    assert d3 <= 3 * d * (1 + d) ** 2


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.05, 0.05), st.floats(0, 1), st.floats(-0.05, 0.05), st.floats(0, 1))
def test_c1_distance_is_a_metric(s1, p1, s2, p2):
    h, g = sine_map(s1, p1, S1), sine_map(s2, p2, S1)
    d_hg, d_gh = c1_distance(h, g, S1, 512), c1_distance(g, h, S1, 512)
    assert d_hg == pytest.approx(d_gh, abs=1e-15)
    assert d_hg <= c1_distance_to_identity(h, S1, 512) + c1_distance_to_identity(g, S1, 512) + 1e-12


@pytest.mark.parametrize("h", [sine_map(0.05, 0.3, S1), quadratic_map(0.4, I), scaling(1.5), translation(0.3)])
def test_derivative_vs_fd(h):
    xs = np.linspace(0.1, 0.9, 101)
    assert np.max(np.abs(h.derivative(xs) - fd(h, xs))) < 1e-6


def test_inverse_by_bisection():
    h = SmoothMap(lambda x: x + 0.1 * np.sin(2 * np.pi * x), lambda x: 1 + 0.2 * np.pi * np.cos(2 * np.pi * x))
    xs = np.linspace(0, 1, 101)
    assert np.max(np.abs(h.inverse()(h(xs)) - xs)) < 1e-12
    assert np.allclose(h.inverse().derivative(h(xs)) * h.derivative(xs), 1.0)


def test_compose_and_iterate():
    f, g = scaling(2.0), translation(1.0)
    assert compose(f, g)(1.0) == 4.0
    assert compose(f, g).inverse()(4.0) == 1.0
    assert iterate(f, 3)(1.0) == 8.0 and iterate(f, -2)(1.0) == 0.25
    assert iterate(f, 0)(0.7) == 0.7
    assert compose(f, g).derivative(0.3) == 2.0


def test_check_diffeomorphism():
    check_diffeomorphism(quadratic_map(0.5, I), I)
    check_diffeomorphism(sine_map(0.1, 0.2, S1), S1)
    with pytest.raises(DomainError):
        check_diffeomorphism(quadratic_map(1.5, I), I)  # not monotone
    with pytest.raises(DomainError):
        check_diffeomorphism(scaling(2.0), I)  # not onto
    with pytest.raises(DomainError):
        check_diffeomorphism(SmoothMap(lambda x: x, lambda x: 2 * np.ones_like(x)), I)  # wrong derivative
    with pytest.raises(DomainError):
        make_trivial_perturbed(IntegerMatrix(((2,),)), I, quadratic_map(-3.0, I))


def test_trivial_perturbed_displacements_vanish(A2345):
    act = make_trivial_perturbed(A2345, S1, sine_map(0.01, 0.1, S1))
    act.validate()
    D = displacement_field(act, S1.grid())
    assert D.shape == (4096, 2, 2) and not np.any(D)
    assert displacement_matrix(act, 0.3).is_zero()


def test_affine_action(bs12):
    act = make_affine_on_chart(2.0, [1.0])
    assert act.relation_residuals()[0] < 1e-15
    dm = displacement_matrix(act, 0.4)
    assert dm.entries[0, 0] == pytest.approx(1.0, abs=1e-15) and dm.row_bound_holds()
    assert act.generator_distances()["f"] == 2.0  # |2x - x| at x=1 plus |2 - 1|


def test_affine_eigenvector_required(A2345):
    with pytest.raises(ValueError):
        make_affine_on_chart(2.0, [1.0, 1.0], A=A2345)
    lam = (7 + math.sqrt(57)) / 2
    act = make_affine_on_chart(lam, [3.0, lam - 2], A=A2345)
    assert max(act.relation_residuals()) < 1e-12


def test_broken_fixture_is_not_an_action():
    act = make_broken_fixture()
    assert act.relation_residuals()[0] == pytest.approx(1e-4, rel=1e-6)
    with pytest.raises(DomainError):
        act.validate()


def test_orbit(bs12):
    act = make_affine_on_chart(2.0, [1.0])
    assert orbit(act, 1.0, 3, 1) == [1.0, 2.0, 4.0, 8.0]
    assert orbit(act, 1.0, 2, -1) == [1.0, 0.5, 0.25]
    with pytest.raises(ValueError):
        orbit(act, 1.0, 2, 0)


def test_chart_escape():
    act = make_affine_on_chart(2.0, [1.0], working=(-1.0, 2.0))
    assert orbit(act, 0.9, 1, 1) == [0.9, 1.8]
    with pytest.raises(ChartEscapeError):
        orbit(act, 0.9, 3, 1)  # f is applied at 3.6
    with pytest.raises(ValueError):
        make_affine_on_chart(2.0, [1.0], working=(0.2, 0.5))


def test_orbit_leaves_manifold():
    act = make_trivial_perturbed(IntegerMatrix(((2,),)), I, quadratic_map(0.5, I))
    pts = orbit(act, 0.5, 5, 1)
    assert all(0 <= p <= 1 for p in pts) and pts == sorted(pts)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.integers(1, 3))
def test_row_bound(vals, ell):
    D = np.array(vals * ell).reshape(1, 3, ell)
    before = row_bound_stats.checked
    row_bound_stats.record(D)
    assert row_bound_stats.checked == before + 1


def test_row_bound_counter():
    from abcrigid.dynamics import _RowBoundStats

    stats = _RowBoundStats()
    stats.record(np.array([[[3.0, 4.0]]]))
    assert stats.violations == 0
    stats.record(np.zeros((3, 2, 2)))
    assert stats.checked == 4 and stats.violations == 0


def test_navas_orbit():
    act = make_navas_action(2)
    F = act.f
    pts = orbit(act, 0.5, 2, 1)
    assert pts[1] == pytest.approx(0.37131279241563214, abs=1e-15)
    assert pts[2] == float(F(pts[1]))
