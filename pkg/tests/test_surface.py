import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from invgeo.errors import InvalidDomain, NonpositiveOmega, OutOfDomain, Unsupported
from invgeo.spaces import funnel_profile
from invgeo.surface import (
    REAL_LINE,
    HorizontalProfile,
    Interval,
    MetricProfile,
    ScalarProfile,
    gauss_curvature,
    load_profile,
    profile_from_exprs,
    profile_from_json,
    profile_to_json,
    save_profile,
    tabulated_profile,
    validate_metric_identity,
    verify_constant_curvature,
)


def test_interval_basics():
    iv = Interval(0.0, 1.0)
    assert 0.5 in iv and 0.0 not in iv and 1.0 not in iv
    assert iv.bounded and not REAL_LINE.bounded
    assert Interval(-1.0, math.inf).window() == (-1.0, 4.0)
    with pytest.raises(InvalidDomain):
        Interval(1.0, 1.0)
    assert Interval.from_json(REAL_LINE.to_json()) == REAL_LINE


def test_grid_is_interior():
    g = Interval(0.0, 1.0).grid(10)
    assert len(g) == 10 and g.min() > 0 and g.max() < 1


def test_expression_derivatives():
    s = ScalarProfile.from_expr("cosh(u)")
    for u in (-1.3, 0.0, 0.7):
        assert s(u) == pytest.approx(math.cosh(u), rel=1e-15)
        assert s.deriv(u) == pytest.approx(math.sinh(u), abs=1e-15)
        assert s.deriv2(u) == pytest.approx(math.cosh(u), rel=1e-15)


def test_expression_rejects_free_symbols():
    with pytest.raises(ValueError):
        ScalarProfile.from_expr("cosh(u) + k")


def test_finite_difference_second_order():
    # errors at h, h/2, h/4 must shrink by ~4 each halving
    u0 = 0.8
    exact1, exact2 = math.cos(u0), -math.sin(u0)
    e1, e2 = [], []
    for h in (1e-2, 5e-3, 2.5e-3):
        s = ScalarProfile.finite_difference(math.sin, step=h)
        e1.append(abs(s.deriv(u0) - exact1))
        e2.append(abs(s.deriv2(u0) - exact2))
    for errs in (e1, e2):
        r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
        assert 3.6 < r1 < 4.4 and 3.6 < r2 < 4.4


def test_finite_difference_one_sided_near_bound():
    dom = Interval(0.0, 1.0)
    s = ScalarProfile.finite_difference(math.exp, step=1e-4, domain=dom)
    assert s.deriv(1e-5) == pytest.approx(math.exp(1e-5), abs=1e-7)
    assert s.deriv2(1 - 1e-5) == pytest.approx(math.e, abs=1e-4)


def test_funnel_identity_and_curvature():
    p = funnel_profile()
    assert validate_metric_identity(p).passed
    # (omega^2)'' = 2 cosh 2u gives omega''(0) = 1/sqrt(2), so K(0) = -1/2
    assert gauss_curvature(p, 0.0) == pytest.approx(-0.5, abs=1e-14)


def test_flat_cylinder_identity():
    p = HorizontalProfile(REAL_LINE, ScalarProfile.constant(1.0))
    r = validate_metric_identity(p, samples=2, tol=1e-12)
    assert r.passed and r.max_residual == 0.0
    with pytest.raises(ValueError):
        validate_metric_identity(p, samples=1)
    with pytest.raises(ValueError):
        validate_metric_identity(p, tol=0.0)


def test_funnel_identity_exact():
    r = validate_metric_identity(funnel_profile(), samples=100, tol=1e-12)
    assert r.passed and r.max_residual == 0.0


def test_identity_detects_bad_metric():
    p = profile_from_exprs("cosh(u)", E="2", F="0")
    r = validate_metric_identity(p)
    assert not r.passed and r.max_residual > 1.0


@given(e_shift=st.floats(-2.0, 2.0), omega0=st.floats(0.2, 3.0))
def test_identity_holds_for_lift_shapes(e_shift, omega0):
    # E = 1 + l'^2 w^2, F = l' w^2 whatever the twist rate l'
    lam = f"({e_shift})*cos(u)"
    w = f"({omega0})*(2 + sin(u))"
    E = f"1 + diff({lam}, u)**2 * ({w})**2"
    F = f"diff({lam}, u) * ({w})**2"
    p = profile_from_exprs(w, E=E, F=F, domain=Interval(-3, 3))
    assert validate_metric_identity(p, relative=True).passed


def test_nonpositive_omega_reported():
    p = HorizontalProfile(Interval(-1, 1), ScalarProfile.from_expr("u"))
    with pytest.raises(NonpositiveOmega):
        validate_metric_identity(p)


def test_out_of_domain():
    p = HorizontalProfile(Interval(0, 1), ScalarProfile.from_expr("1 + u"))
    with pytest.raises(OutOfDomain):
        p.check(2.0)


@given(K=st.sampled_from([1.0, -1.0, 0.0, 0.25, -4.0]))
def test_constant_curvature_profiles(K):
    k = math.sqrt(abs(K))
    expr = {1: f"cos({k}*u) + 2", -1: f"cosh({k}*u)", 0: "1 + u"}
    if K > 0:
        p = HorizontalProfile(Interval(-0.5 / k, 0.5 / k), ScalarProfile.from_expr(f"cos({k}*u)"))
    elif K < 0:
        p = HorizontalProfile(REAL_LINE, ScalarProfile.from_expr(expr[-1]))
    else:
        p = HorizontalProfile(Interval(0, 3), ScalarProfile.from_expr(expr[0]))
    assert verify_constant_curvature(p, K).passed
    assert not verify_constant_curvature(p, K + 0.5).passed


def test_json_round_trip_analytic(tmp_path):
    p = profile_from_exprs("cosh(u)", E="1 + u**2", F="u", domain=Interval(-2, 2))
    save_profile(p, tmp_path / "p.json")
    q = load_profile(tmp_path / "p.json")
    for u in np.linspace(-1.9, 1.9, 7):
        assert q.coefficients(u) == pytest.approx(p.coefficients(u), abs=1e-15)


def test_tabulated_round_trip_and_csv(tmp_path):
    u = np.linspace(-2, 2, 401)
    p = tabulated_profile(u, np.cosh(u))
    q = profile_from_json(json.loads(json.dumps(profile_to_json(p))))
    assert q.omega(0.3) == p.omega(0.3)
    assert p.omega(0.3) == pytest.approx(math.cosh(0.3), abs=1e-8)
    assert p.omega.deriv(0.3) == pytest.approx(math.sinh(0.3), abs=1e-6)
    path = tmp_path / "p.csv"
    np.savetxt(path, np.column_stack([u, np.cosh(u)]), delimiter=",", header="u,omega", comments="")
    r = load_profile(path)
    assert r.omega(1.1) == pytest.approx(p.omega(1.1), abs=1e-15)


def test_tabulated_rejects_bad_grid():
    with pytest.raises(InvalidDomain):
        tabulated_profile([0, 1, 1, 2], [1, 1, 1, 1])


def test_fd_profile_not_serializable():
    p = HorizontalProfile(REAL_LINE, ScalarProfile.finite_difference(math.cosh))
    with pytest.raises(Unsupported):
        profile_to_json(p)


def test_metric_profile_coefficients_order():
    p = MetricProfile(REAL_LINE, ScalarProfile.from_expr("1 + u**2"), ScalarProfile.from_expr("u"),
                      ScalarProfile.from_expr("exp(u)"))
    E, Eu, F, Fu, w, wu = p.coefficients(0.5)
    assert (E, Eu, F, Fu) == pytest.approx((1.25, 1.0, 0.5, 1.0))
    assert w == pytest.approx(math.exp(0.5)) and wu == pytest.approx(math.exp(0.5))
    assert p.G(0.5) == pytest.approx(math.exp(1.0))
