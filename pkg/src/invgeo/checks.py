"""Invariant suites run by ``invgeo check``; each returns a JSON-ready dict."""
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from . import closed_forms as cf
from .engine import (
    IntegratorControl,
    geodesic_by_quadrature,
    integrate_geodesic,
    state_from_angle,
    v_of_u,
)
from .spaces import (
    BCV,
    FUNNEL_SPACE,
    AmbientSpace,
    EuclideanRotational,
    H2xR_G14,
    H2xR_G24,
    catalog_spaces,
    catalog_surface,
    clairaut_in_distance,
    distance_from_radius,
    funnel_embedding,
    g24_epsilon,
    horizontal_lift_G34,
    metric_norm,
    omega_at,
    orbit,
    pullback_metric,
)
from .fixtures import fixture_profile
from .surface import (
    Interval,
    MetricProfile,
    ScalarProfile,
    validate_metric_identity,
)

SUITES = ("metric-identity", "clairaut", "slant", "quadrature", "closed-forms", "lift")


def _result(suite: str, items: list[dict]) -> dict:
    return {"suite": suite, "pass": all(i["pass"] for i in items), "items": items}


def _spaces(space: Optional[AmbientSpace]) -> list[AmbientSpace]:
    return [space] if space is not None else catalog_spaces()


# ---------------------------------------------------------------- metric identity


def funnel_pullback_profile(half_width: float = 2.0, h: float = 1e-3) -> MetricProfile:
    """Funnel metric profile with E, F, G read off the embedding by finite differences."""

    def coeff(k):
        return lambda u: pullback_metric(FUNNEL_SPACE, funnel_embedding, u, 0.0, h)[k]

    dom = Interval(-half_width, half_width)
    E = ScalarProfile.finite_difference(coeff(0), domain=dom)
    F = ScalarProfile.finite_difference(coeff(1), domain=dom)
    w = ScalarProfile.finite_difference(lambda u: math.sqrt(coeff(2)(u)), domain=dom)
    return MetricProfile(dom, E, F, w)


def metric_identity_suite(space=None, profile: Optional[MetricProfile] = None,
                          fixture: Optional[str] = None, tol: float = 1e-9) -> dict:
    items = []
    if profile is not None:
        r = validate_metric_identity(profile, tol=tol)
        items.append({"target": fixture or "profile", **r.to_json()})
        if fixture == "funnel":
            r = validate_metric_identity(funnel_pullback_profile(), tol=tol)
            items.append({"target": "funnel-pullback", **r.to_json()})
        return _result("metric-identity", items)
    for sp_ in _spaces(space):
        r = validate_metric_identity(catalog_surface(sp_).profile, tol=tol)
        items.append({"target": sp_.tag, **r.to_json()})
    if space is None:
        r = validate_metric_identity(funnel_pullback_profile(), tol=tol)
        items.append({"target": "funnel-pullback", **r.to_json()})
    return _result("metric-identity", items)


# ---------------------------------------------------------------- clairaut


def sample_points(space: AmbientSpace, n: int, rng: np.random.Generator) -> np.ndarray:
    """Points away from singular orbits, in a region where every formula is well conditioned."""
    pts = []
    while len(pts) < n:
        if isinstance(space, (EuclideanRotational, BCV)):
            rmax = 2.0
            if isinstance(space, BCV) and space.m != 0:
                rmax = min(2.0, 0.9 / math.sqrt(abs(space.m)))
            r = rng.uniform(0.1, rmax)
            a = rng.uniform(0, 2 * math.pi)
            p = np.array([r * math.cos(a), r * math.sin(a), rng.uniform(-2, 2)])
        else:
            p = np.array([rng.uniform(-2, 2), rng.uniform(0.2, 3.0), rng.uniform(-2, 2)])
        if isinstance(space, H2xR_G14):
            beta = H2xR_G14.beta(p)
            if beta * beta / 4 + space.b**2 - 1 < 1e-3:
                continue
        pts.append(p)
    return np.array(pts)


def _formula_vs_metric(space: AmbientSpace, n: int, rng, tol: float) -> dict:
    worst = 0.0
    for p in sample_points(space, n, rng):
        w_f = space.omega_formula(p)
        w_g = metric_norm(space, p)
        worst = max(worst, abs(w_f - w_g) / max(1.0, w_g))
    return {"target": f"{space.tag}: omega formula vs g(X,X)", "max_residual": worst, "pass": worst <= tol}


def _relation_vs_omega(space: AmbientSpace, n: int, rng, tol: float) -> Optional[dict]:
    """Distance-form relation equals omega*cos(theta) at the same orbit."""
    worst = 0.0
    for p in sample_points(space, n, rng):
        theta = rng.uniform(0, math.pi)
        d = space.orbit_distance(p)
        eps = g24_epsilon(p[1]) if isinstance(space, H2xR_G24) else None
        try:
            lhs = clairaut_in_distance(space, d, theta, eps)
        except Exception:
            return None
        rhs = space.omega_formula(p) * math.cos(theta)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return {"target": f"{space.tag}: distance form vs omega cos(theta)", "max_residual": worst,
            "pass": worst <= tol}


def bcv_radius_consistency(space: BCV, radii: Sequence[float], thetas: Sequence[float]) -> float:
    """Max gap between the r-form and the d-form, after converting r to geodesic distance."""
    worst = 0.0
    for r, th in zip(radii, thetas):
        p = np.array([r, 0.0, 0.0])
        lhs = space.omega_formula(p) * math.cos(th)
        rhs = clairaut_in_distance(space, distance_from_radius(space, r), th)
        worst = max(worst, abs(lhs - rhs))
    return worst


def bcv_h2r_consistency(n: int = 100, seed: int = 0) -> float:
    """BCV(0, -1/4) distance relation against ``sinh(d) cos(theta)``."""
    rng = np.random.default_rng(seed)
    sp_ = BCV(0.0, -0.25)
    worst = 0.0
    for _ in range(n):
        d = rng.uniform(0.01, 5.0)
        th = rng.uniform(0, math.pi)
        worst = max(worst, abs(clairaut_in_distance(sp_, d, th) - math.sinh(d) * math.cos(th)))
    return worst


def g14_orbit_circle_defect(space: H2xR_G14, p, vs: Sequence[float]) -> float:
    """Orbits of G14 lie on the circles ``x^2 + y^2 - beta*y + 1 = 0``."""
    o = orbit(space, p)
    beta = H2xR_G14.beta(p)
    return float(max(abs(q[0] ** 2 + q[1] ** 2 - beta * q[1] + 1) for q in o.sample(vs)))


def clairaut_suite(space=None, n: int = 50, seed: int = 0, tol: float = 1e-9) -> dict:
    rng = np.random.default_rng(seed)
    items = []
    for sp_ in _spaces(space):
        items.append(_formula_vs_metric(sp_, n, rng, tol))
        rel = _relation_vs_omega(sp_, n, rng, tol)
        if rel is not None:
            items.append(rel)
        if isinstance(sp_, BCV):
            rmax = 2.0 if sp_.m >= 0 else 0.9 / math.sqrt(-sp_.m)
            radii = rng.uniform(0.05, rmax, n)
            gap = bcv_radius_consistency(sp_, radii, rng.uniform(0, math.pi, n))
            items.append({"target": f"{sp_.tag}: r-form vs d-form", "max_residual": gap, "pass": gap <= tol})
        if isinstance(sp_, H2xR_G14):
            defect = g14_orbit_circle_defect(sp_, np.array([0.3, 1.7, 0.0]), np.linspace(-1.5, 1.5, 31))
            items.append({"target": f"{sp_.tag}: orbit circle", "max_residual": defect, "pass": defect <= tol})
        # omega constant along orbits
        p0 = sample_points(sp_, 1, rng)[0]
        vals = [omega_at(sp_, q) for q in orbit(sp_, p0).sample(np.linspace(-1, 1, 11))]
        spread = float(np.ptp(vals)) / max(1.0, vals[0])
        items.append({"target": f"{sp_.tag}: omega constant on orbit", "max_residual": spread, "pass": spread <= tol})
    if space is None or (isinstance(space, BCV) and space.ell == 0 and space.m == -0.25):
        gap = bcv_h2r_consistency()
        items.append({"target": "bcv:0,-0.25 vs h2r-g14:0 relation", "max_residual": gap, "pass": gap <= tol})
    return _result("clairaut", items)


# ---------------------------------------------------------------- slant conservation


def random_starts(p: MetricProfile, k: int, rng: np.random.Generator,
                  half_width: float = 1.0) -> list[tuple[float, float]]:
    """``k`` pairs ``(u0, theta0)`` with ``u0`` near the middle of the domain."""
    lo, hi = p.domain.window()
    mid = 0.5 * (lo + hi)
    hw = min(half_width, 0.25 * (hi - lo))
    return [(float(rng.uniform(mid - hw, mid + hw)), float(rng.uniform(0, 2 * math.pi))) for _ in range(k)]


def slant_drift(p: MetricProfile, starts, length: float = 10.0,
                ctrl: IntegratorControl = IntegratorControl()) -> float:
    worst = 0.0
    for u0, th in starts:
        path = integrate_geodesic(p, state_from_angle(p, u0, 0.0, th), length, ctrl)
        worst = max(worst, path.diagnostics.max_slant_drift)
    return worst


def slant_suite(space=None, profile: Optional[MetricProfile] = None, fixture: Optional[str] = None,
                runs: int = 20, seed: int = 0, tol: float = 1e-8) -> dict:
    rng = np.random.default_rng(seed)
    targets = [(fixture or "profile", profile)] if profile is not None else \
        [(s.tag, catalog_surface(s).profile) for s in _spaces(space)]
    items = []
    for name, prof in targets:
        drift = slant_drift(prof, random_starts(prof, runs, rng))
        items.append({"target": name, "max_slant_drift": drift, "pass": drift <= tol})
    return _result("slant", items)


# ---------------------------------------------------------------- quadrature vs ODE


QUADRATURE_PAIRS = (
    ("funnel", 1.0, (-1.0, 1.5)),
    ("funnel", 0.5, (0.0, 2.0)),
    ("cosh", 0.5, (-1.0, 1.0)),
    ("exp", 0.5, (0.0, 2.0)),
    ("cos", 0.3, (-1.0, 1.0)),
    ("linear", 0.8, (0.0, 3.0)),
)


def quadrature_vs_ode(p: MetricProfile, c: float, u_range: tuple[float, float], samples: int = 41) -> float:
    """Max ``|v_quad - v_ode|`` over a turning-point-free range, both started at ``u_range[0]``."""
    lo, hi = u_range
    q = geodesic_by_quadrature(p, c, lo, 0.0, hi, 1, tol=1e-12, samples=samples)
    w = p.omega(lo)
    init = state_from_angle(p, lo, 0.0, math.acos(c / w))
    # arclength to hi is the integral of omega/sqrt(omega^2 - c^2) du
    length = quad(lambda u: p.omega(u) / math.sqrt(p.omega(u) ** 2 - c * c), lo, hi, epsabs=1e-13)[0]
    path = integrate_geodesic(p, init, length * (1 + 1e-7))
    return float(np.max(np.abs(v_of_u(path, q.u_grid) - q.v_values)))


def quadrature_suite(tol: float = 1e-6) -> dict:
    items = []
    for name, c, rng_ in QUADRATURE_PAIRS:
        dev = quadrature_vs_ode(fixture_profile(name), c, rng_)
        items.append({"target": f"{name} c={c}", "max_deviation": dev, "pass": dev <= tol})
    return _result("quadrature", items)


# ---------------------------------------------------------------- closed forms


def closed_forms_suite(tol: float = 1e-7) -> dict:
    items = []
    for case in cf.BRANCH_CASES:
        fam, sol, rng_ = case.build()
        rep = cf.crosscheck_closed_form(fam, sol, rng_, tol=tol)
        items.append({"target": case.branch, **rep.to_json()})
    return _result("closed-forms", items)


# ---------------------------------------------------------------- horizontal lift


LIFT_CURVES: tuple[tuple[str, Callable[[float], tuple[float, float]], Callable[[float], tuple[float, float]]], ...] = (
    ("line", lambda s: (0.5 + 0.4 * s, s), lambda s: (0.4, 1.0)),
    ("wave", lambda s: (1.5 + 0.3 * math.sin(s), 0.5 * math.cos(2 * s)),
     lambda s: (0.3 * math.cos(s), -math.sin(2 * s))),
    ("arc", lambda s: (math.pi / 2 + 0.8 * math.sin(s), s * s),
     lambda s: (0.8 * math.cos(s), 2 * s)),
)


def lift_suite(b: float = 1.0, tol: float = 1e-8) -> dict:
    items = []
    s_range = Interval(0.0, 2.0)
    for name, curve, dcurve in LIFT_CURVES:
        th0 = curve(0.0)[0]
        init = (math.cos(th0), math.sin(th0), 0.0)
        lift = horizontal_lift_G34(curve, b, init, s_range, dcurve)
        res = float(np.max(np.abs(lift.orthogonality_residuals())))
        items.append({"target": f"{name} b={b}", "max_residual": res, "pass": res <= tol})
    # xi2 = 0 keeps r = 1 (the funnel's own lift)
    lift = horizontal_lift_G34(lambda s: (s, 0.0), b, (math.cos(0.3), math.sin(0.3), 0.0),
                               Interval(0.3, 2.8), lambda s: (1.0, 0.0))
    dev = float(np.max(np.abs(np.hypot(lift.points[:, 0], lift.points[:, 1]) - 1.0)))
    items.append({"target": "xi2=0 gives r=1", "max_residual": dev, "pass": dev <= tol})
    return _result("lift", items)


def run_suites(names: Sequence[str], space=None, profile=None, fixture=None) -> dict:
    reports = []
    for name in names:
        if name == "metric-identity":
            reports.append(metric_identity_suite(space, profile, fixture))
        elif name == "clairaut":
            reports.append(clairaut_suite(space))
        elif name == "slant":
            reports.append(slant_suite(space, profile, fixture))
        elif name == "quadrature":
            reports.append(quadrature_suite())
        elif name == "closed-forms":
            reports.append(closed_forms_suite())
        elif name == "lift":
            reports.append(lift_suite())
        else:
            raise ValueError(f"unknown suite {name!r}")
    return {"pass": all(r["pass"] for r in reports), "suites": reports}

