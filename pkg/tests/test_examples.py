"""Worked examples: one test per documented input/output pair."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from invgeo.closed_forms import ClosedFormFamily, closed_form_v, crosscheck_closed_form, solve_omega
from invgeo.engine import (
    Diagnostics,
    GeodesicPath,
    GeodesicState,
    Slant,
    angle_with_orbit,
    clairaut_slant,
    first_order_system_check,
    geodesic_by_quadrature,
    integrate_geodesic,
    is_orbit_geodesic,
    state_from_angle,
    state_from_slant,
    v_of_u,
)
from invgeo.errors import SingularOrbit
from invgeo.spaces import (
    BCV,
    EuclideanRotational,
    H2xR_G14,
    H2xR_G24,
    H2xR_G34,
    clairaut_in_distance,
    distance_from_radius,
    funnel_embedding,
    funnel_profile,
    horizontal_lift_G34,
    hyperbolic_distance,
    killing_field,
    omega_at,
    radius_from_distance,
)
from invgeo.surface import (
    REAL_LINE,
    HorizontalProfile,
    Interval,
    MetricProfile,
    ScalarProfile,
    gauss_curvature,
    validate_metric_identity,
    verify_constant_curvature,
)

FUNNEL = funnel_profile()
SQRT2 = math.sqrt(2)


def const_profile(E, F, w):
    return MetricProfile(REAL_LINE, ScalarProfile.constant(E), ScalarProfile.constant(F), ScalarProfile.constant(w))


# ---------------------------------------------------------------- metric profiles


def test_identity_constant_twisted():
    r = validate_metric_identity(const_profile(2.0, 1.0, 1.0), samples=10, tol=1e-12)
    assert r.passed and r.max_residual == 0.0


def test_funnel_curvature_against_finite_difference_oracle():
    h = 1e-4
    w = lambda u: math.sqrt(2 + math.sinh(u) ** 2)
    fd = -(w(h) - 2 * w(0) + w(-h)) / h**2 / w(0)
    assert gauss_curvature(FUNNEL, 0.0) == pytest.approx(-0.5, abs=1e-14)
    assert fd == pytest.approx(-0.5, abs=1e-7)


def test_cos_and_linear_curvature():
    assert gauss_curvature(HorizontalProfile(REAL_LINE, ScalarProfile.from_expr("cos(u)")), 0.0) == 1.0
    p = HorizontalProfile(Interval(0, 1), ScalarProfile.from_expr("1 + u"))
    assert gauss_curvature(p, 0.5) == 0.0


def test_constant_curvature_examples():
    assert verify_constant_curvature(HorizontalProfile(REAL_LINE, ScalarProfile.from_expr("cosh(u)")), -1).passed
    dom = Interval(-math.pi * 0.9, math.pi * 0.9)
    assert verify_constant_curvature(HorizontalProfile(dom, ScalarProfile.from_expr("3*cos(u/2)", domain=dom)),
                                     0.25).passed
    assert not verify_constant_curvature(FUNNEL, -0.5).passed
    assert gauss_curvature(FUNNEL, 0.0) != pytest.approx(gauss_curvature(FUNNEL, 1.0), abs=1e-3)


# ---------------------------------------------------------------- spaces


def test_killing_field_examples():
    assert killing_field(H2xR_G34(1.0), (1, 1, 0)) == pytest.approx([1, 1, 1])
    assert killing_field(H2xR_G24(1.0, 0.0), (0.3, 2.0, -1.0)) == pytest.approx([1, 0, 0])
    assert killing_field(EuclideanRotational(), (0, 2, 5)) == pytest.approx([2, 0, 0])


def test_omega_examples():
    assert omega_at(BCV(0.0, 0.0), (3, 0, 1.5)) == pytest.approx(3.0)
    with pytest.raises(SingularOrbit):
        omega_at(H2xR_G14(0.0), (0, 1, 0))
    sp = H2xR_G34(1.0)
    for y in (0.1, 1.0, 7.0):
        X = sp.killing_field((0, y, 0))
        direct = math.sqrt(X @ sp.metric((0, y, 0)) @ X)
        assert omega_at(sp, (0, y, 0)) == pytest.approx(SQRT2) == pytest.approx(direct)


def test_hyperbolic_distance_examples():
    assert hyperbolic_distance((0, 1), (0, math.e)) == pytest.approx(1.0)
    assert hyperbolic_distance((0.4, 2.0), (0.4, 2.0)) == 0.0
    # arclength of the unit semicircle between (-1, 1)/(1, 1): centre 0, radius sqrt 2
    a, b = math.pi / 4, 3 * math.pi / 4
    length = quad(lambda t: 1 / math.sin(t), a, b)[0]
    assert hyperbolic_distance((-1, 1), (1, 1)) == pytest.approx(length, rel=1e-12)


def test_clairaut_distance_examples():
    assert clairaut_in_distance(H2xR_G14(0.0), math.asinh(1.0), 0.0) == pytest.approx(1.0)
    for d in (0.1, 1.0, 3.0):
        assert clairaut_in_distance(BCV(0.0, -0.25), d, 0.0) == pytest.approx(math.sinh(d))
    sp = BCV(1.0, 1.0)
    d, th = 0.3, math.pi / 3
    r = radius_from_distance(sp, d)
    assert clairaut_in_distance(sp, d, th) == pytest.approx(omega_at(sp, (r, 0, 0)) * math.cos(th), rel=1e-14)


def test_radius_distance_examples():
    assert distance_from_radius(BCV(0, 0), 2.0) == 2.0
    assert radius_from_distance(BCV(0, 1), math.pi / 4) == pytest.approx(1.0)
    assert distance_from_radius(BCV(0, -1), 0.5) == pytest.approx(math.atanh(0.5))
    assert radius_from_distance(BCV(0, -1), distance_from_radius(BCV(0, -1), 0.5)) == pytest.approx(0.5)


def test_funnel_examples():
    assert funnel_embedding(0, 0) == pytest.approx([0, 1, 0])
    assert FUNNEL.omega(0) == pytest.approx(SQRT2)


def test_funnel_lift_reproduced():
    # theta = 2 arccot(e^-u), r = 1, z = 0 is the curve u -> funnel_embedding(u, 0)
    xi1 = lambda u: 2 * math.atan(math.exp(u))
    lift = horizontal_lift_G34(lambda u: (xi1(u), 0.0), 1.0, (0.0, 1.0, 0.0), Interval(0.0, 2.0),
                               lambda u: (1 / math.cosh(u), 0.0))
    for u in (0.0, 0.7, 1.9):
        assert lift(u) == pytest.approx(funnel_embedding(u, 0.0), abs=1e-12)


def test_lift_b_zero_keeps_radius():
    lift = horizontal_lift_G34(lambda s: (1.0 + 0.2 * s, math.sin(s)), 0.0, (0.5, 0.8, 0.0), Interval(0, 3))
    r = np.hypot(lift.points[:, 0], lift.points[:, 1])
    assert np.ptp(r) <= 1e-14


def test_lift_vertical_profile_decays():
    lift = horizontal_lift_G34(lambda s: (math.pi / 2, s), 1.0, (0.0, 2.0, 0.0), Interval(0, 2),
                               lambda s: (0.0, 1.0))
    r = np.hypot(lift.points[:, 0], lift.points[:, 1])
    assert r == pytest.approx(2.0 * np.exp(-lift.s / 2), rel=1e-10)
    assert np.max(np.abs(lift.orthogonality_residuals())) <= 1e-12


# ---------------------------------------------------------------- engine


def test_slant_examples():
    assert clairaut_slant(FUNNEL, GeodesicState(0, 0, 0, 0, 1 / SQRT2)).c == pytest.approx(SQRT2)
    p = HorizontalProfile(REAL_LINE, ScalarProfile.from_expr("cosh(u)"))
    assert clairaut_slant(p, GeodesicState(0, 0.4, 0, 1.0, 0.0)).c == 0.0


def test_integrate_examples():
    path = integrate_geodesic(FUNNEL, GeodesicState(0, 0, 0, 0, 1 / SQRT2), 5.0)
    assert np.max(np.abs(path.u)) <= 1e-12
    p = MetricProfile(REAL_LINE, ScalarProfile.from_expr("1 + sin(u)**2"), ScalarProfile.from_expr("sin(u)"),
                      ScalarProfile.from_expr("1"))
    # orbit-orthogonal start on a non-horizontal profile: F u' + omega^2 v' = 0
    E = p.E(0.3)
    du = 1 / math.sqrt(E - p.F(0.3) ** 2)
    init = GeodesicState(0, 0.3, 0, du, -p.F(0.3) * du)
    path = integrate_geodesic(p, init, 3.0)
    assert max(abs(clairaut_slant(p, st).c) for st in path.states) <= 1e-10
    path = integrate_geodesic(FUNNEL, GeodesicState(0, 0, 0, 1 / SQRT2, 1 / 2), 8.0)
    assert path.slant.c == pytest.approx(1.0)
    assert min(FUNNEL.omega(u) for u in path.u) > 1.0


def test_orbit_geodesic_examples():
    assert is_orbit_geodesic(FUNNEL, 0.0) and not is_orbit_geodesic(FUNNEL, 1.0)
    p = HorizontalProfile(REAL_LINE, ScalarProfile.constant(2.0))
    assert all(is_orbit_geodesic(p, u) for u in (-3.0, 0.0, 5.0))


def test_quadrature_examples():
    q = geodesic_by_quadrature(FUNNEL, 1.0, 0.0, 0.0, 2.0, samples=21)
    for u, v in zip(q.u_grid, q.v_values):
        ref = quad(lambda t: 1 / (math.sqrt(math.sinh(t) ** 2 + 2) * math.sqrt(1 + math.sinh(t) ** 2)), 0, u)[0]
        assert v == pytest.approx(ref, abs=1e-10)
    path = integrate_geodesic(FUNNEL, state_from_slant(FUNNEL, 0.0, 0.0, 1.0), 4.0)
    assert v_of_u(path, q.u_grid[1:]) == pytest.approx(q.v_values[1:], abs=1e-6)


def test_first_order_examples():
    path = integrate_geodesic(FUNNEL, state_from_slant(FUNNEL, 0.0, 0.0, 1.0), 6.0)
    assert first_order_system_check(FUNNEL, path, tol=1e-7).passed
    bad = tuple(GeodesicState(s, 0.1 * s, 0.0, 0.5, 0.0) for s in np.linspace(0, 1, 5))
    fake = GeodesicPath(bad, Slant(0.0), Diagnostics(0.0, 0.0, (), "complete", 0.0))
    assert not first_order_system_check(FUNNEL, fake).passed


def test_angle_examples():
    assert angle_with_orbit(FUNNEL, GeodesicState(0, 0, 0, 0, 1 / SQRT2)) == 0.0
    assert angle_with_orbit(FUNNEL, GeodesicState(0, 0.5, 0, 1, 0)) == pytest.approx(math.pi / 2)
    st = state_from_slant(FUNNEL, 0.0, 0.0, 1.0)
    assert angle_with_orbit(FUNNEL, st) == pytest.approx(math.pi / 4)
    assert state_from_angle(FUNNEL, 0.0, 0.0, math.pi / 4).du == pytest.approx(st.du)


# ---------------------------------------------------------------- closed forms


def test_solve_omega_examples():
    s = solve_omega(1, 1, 0)
    assert s(0.4) == pytest.approx(math.cos(0.4))
    assert (s.domain.lo, s.domain.hi) == pytest.approx((-math.pi / 2, math.pi / 2))
    s = solve_omega(-1, 1, 0)
    assert s(0.7) == pytest.approx(math.cosh(0.7)) and s.domain == REAL_LINE
    s = solve_omega(0.25, 2, 1)
    for u in (-1.0, 0.5, 2.0):
        assert s(u) == pytest.approx(2 * math.cos(u / 2) + 2 * math.sin(u / 2))
        assert s.deriv2(u) + 0.25 * s(u) == pytest.approx(0, abs=1e-14)


def test_positive_formula_vanishes_at_maximum():
    sol = solve_omega(1, 1, 0)
    fam = ClosedFormFamily.from_solution(sol, 0.5)
    assert closed_form_v(fam, sol, 0.0) == 0.0


@pytest.mark.parametrize("K,w0,dw0,c,rng", [
    (1.0, 1.0, 0.0, 0.3, (-1.0, 1.0)),
    (-1.0, 1.0, 0.0, 0.5, (-1.0, 1.0)),
    (0.0, 1.0, 1.0, 0.8, (0.0, 3.0)),
])
def test_crosscheck_examples(K, w0, dw0, c, rng):
    sol = solve_omega(K, w0, dw0)
    assert crosscheck_closed_form(ClosedFormFamily.from_solution(sol, c), sol, Interval(*rng), tol=1e-7).passed
