"""Geodesics on an invariant surface: integration, slant, quadrature.

A unit-speed geodesic ``alpha(s) = psi(u(s), v(s))`` satisfies the
Euler-Lagrange system

    E u'' + F v'' + E_u u'^2 / 2 - omega omega_u v'^2 = 0
    (F u' + omega^2 v')' = 0

The second line says the slant ``c = F u' + omega^2 v'`` is conserved.  By
default the integrator carries that momentum as a state variable
(``formulation="momentum"``): the system is the same, but the conserved
quantity is not left to the error controller, which matters on surfaces where
``omega`` grows exponentially.  ``formulation="acceleration"`` solves the 2x2
linear system for ``(u'', v'')`` instead and is kept as a cross-check.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .errors import (
    IntegratorStall,
    NotApplicable,
    OutOfDomain,
    SlantRegionViolation,
)
from .surface import Interval, MetricProfile

log = logging.getLogger(__name__)

CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class IntegratorControl:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = 0.1
    formulation: str = "momentum"

    def __post_init__(self):
        if self.formulation not in ("momentum", "acceleration"):
            raise ValueError(f"unknown formulation {self.formulation!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.max_step > 0):
            raise ValueError("tolerances and max_step must be positive")


@dataclass(frozen=True)
class GeodesicState:
    s: float
    u: float
    v: float
    du: float
    dv: float


@dataclass(frozen=True)
class Slant:
    c: float


@dataclass(frozen=True)
class Diagnostics:
    max_speed_drift: float
    max_slant_drift: float
    turning_points: tuple[float, ...] = ()
    status: str = "complete"          # or "domain_exit"
    max_clamp_excess: float = 0.0


@dataclass(frozen=True)
class GeodesicPath:
    states: tuple[GeodesicState, ...]
    slant: Slant
    diagnostics: Diagnostics
    dense: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False, compare=False)

    @property
    def truncated(self) -> bool:
        return self.diagnostics.status != "complete"

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(st, name) for st in self.states])

    @property
    def s(self):
        return self.column("s")

    @property
    def u(self):
        return self.column("u")

    @property
    def v(self):
        return self.column("v")

    def at(self, s: float) -> np.ndarray:
        """Interpolated ``(u, v, du, dv)`` at arclength ``s``."""
        if self.dense is None:
            raise ValueError("path has no dense output")
        a, b = sorted((self.states[0].s, self.states[-1].s))
        slack = 1e-9 * max(1.0, abs(a), abs(b))
        if not a - slack <= s <= b + slack:
            raise ValueError(f"s={s} outside the integrated range [{a}, {b}]")
        return self.dense(s)


# ---------------------------------------------------------------- pointwise quantities


def clairaut_slant(p: MetricProfile, st: GeodesicState) -> Slant:
    E, _, F, _, w, _ = p.coefficients(st.u)
    return Slant(F * st.du + w * w * st.dv)


def speed_residual(p: MetricProfile, st: GeodesicState) -> float:
    E, _, F, _, w, _ = p.coefficients(st.u)
    return E * st.du**2 + 2 * F * st.du * st.dv + w * w * st.dv**2 - 1.0


def _angle(p: MetricProfile, st: GeodesicState) -> tuple[float, float]:
    _, _, F, _, w, _ = p.coefficients(st.u)
    cos_t = (F * st.du + w * w * st.dv) / w
    excess = max(abs(cos_t) - 1.0, 0.0)
    return math.acos(min(1.0, max(-1.0, cos_t))), excess


def angle_with_orbit(p: MetricProfile, st: GeodesicState) -> float:
    """Angle between the geodesic and the orbit through its point, in ``[0, pi]``."""
    theta, excess = _angle(p, st)
    if excess > CLAMP_TOL:
        log.warning("cos(theta) exceeded 1 by %.3g at u=%g; clamped", excess, st.u)
    return theta


def state_from_angle(p: MetricProfile, u0: float, v0: float, theta0: float) -> GeodesicState:
    """Unit-speed state meeting the orbit at angle ``theta0``; ``u' = sin(theta0)``."""
    p.check(u0)
    _, _, F, _, w, _ = p.coefficients(u0)
    c = w * math.cos(theta0)
    du = math.sin(theta0)
    return GeodesicState(0.0, u0, v0, du, (c - F * du) / (w * w))


def state_from_slant(
    p: MetricProfile, u0: float, v0: float, c: float, direction: int = 1, snap: float = 1e-6
) -> GeodesicState:
    """Unit-speed state with slant ``c``, moving in ``u`` along ``direction``.

    If ``|c|`` is within relative ``snap`` of ``omega(u0)`` the state is
    launched tangent to the orbit (``u' = 0``, ``|c| = omega(u0)``).
    """
    p.check(u0)
    _, _, F, _, w, _ = p.coefficients(u0)
    ratio = abs(c) / w
    if ratio > 1 + snap:
        raise SlantRegionViolation(f"|c|={abs(c)} exceeds omega(u0)={w}")
    if ratio >= 1 - snap:
        c_new = math.copysign(w, c)
        if c_new != c:
            log.info("slant %r snapped to omega(u0)=%r (orbit launch)", c, c_new)
        return GeodesicState(0.0, u0, v0, 0.0, c_new / (w * w))
    du = math.copysign(math.sqrt(1 - ratio * ratio), direction)
    return GeodesicState(0.0, u0, v0, du, (c - F * du) / (w * w))


def is_orbit_geodesic(p: MetricProfile, u0: float, tol: float = 1e-10) -> bool:
    p.check(u0)
    return abs(p.omega.deriv(u0)) <= tol


def geodesic_residuals(p: MetricProfile, u, du, dv, ddu, ddv) -> tuple[float, float]:
    """Residuals of both Euler-Lagrange equations at one point."""
    E, Eu, F, Fu, w, wu = p.coefficients(u)
    r1 = E * ddu + F * ddv + Eu * du * du / 2 - w * wu * dv * dv
    r2 = Fu * du * du + F * ddu + 2 * w * wu * du * dv + w * w * ddv
    return r1, r2


# ---------------------------------------------------------------- integration


def _rhs_momentum(p: MetricProfile):
    def rhs(s, y):
        u, _, du, c = y
        try:
            E, Eu, F, Fu, w, wu = p.coefficients(u)
        except (ValueError, ZeroDivisionError, OverflowError):
            return [math.nan] * 4
        w2 = w * w
        dv = (c - F * du) / w2
        ddu = (F * (Fu * du * du + 2 * w * wu * du * dv) / w2
               - Eu * du * du / 2 + w * wu * dv * dv) * w2 / (E * w2 - F * F)
        return [du, dv, ddu, 0.0]
    return rhs


def _rhs_acceleration(p: MetricProfile):
    def rhs(s, y):
        u, _, du, dv = y
        try:
            E, Eu, F, Fu, w, wu = p.coefficients(u)
        except (ValueError, ZeroDivisionError, OverflowError):
            return [math.nan] * 4
        w2 = w * w
        b1 = -Eu * du * du / 2 + w * wu * dv * dv
        b2 = -Fu * du * du - 2 * w * wu * du * dv
        det = E * w2 - F * F
        return [du, dv, (w2 * b1 - F * b2) / det, (E * b2 - F * b1) / det]
    return rhs


def _exit_events(domain: Interval):
    events = []
    for bound, sgn in ((domain.lo, 1.0), (domain.hi, -1.0)):
        if math.isfinite(bound):
            margin = 1e-6 * (1 + abs(bound))

            def ev(s, y, bound=bound, sgn=sgn, margin=margin):
                return sgn * (y[0] - bound) - margin

            ev.terminal = True
            events.append(ev)
    return events


def integrate_geodesic(
    p: MetricProfile,
    init: GeodesicState,
    length: float,
    ctrl: IntegratorControl = IntegratorControl(),
) -> GeodesicPath:
    """Integrate the geodesic from ``init`` over arclength ``length`` (may be negative).

    Leaving the profile domain truncates the path with ``status="domain_exit"``.
    """
    p.check(init.u)
    drift0 = abs(speed_residual(p, init))
    if drift0 > 1e-10:
        raise ValueError(f"initial state is not unit speed (residual {drift0:.3g})")
    c = clairaut_slant(p, init).c
    momentum = ctrl.formulation == "momentum"
    rhs = _rhs_momentum(p) if momentum else _rhs_acceleration(p)
    y0 = [init.u, init.v, init.du, c if momentum else init.dv]

    def turning(s, y):
        return y[2]

    exits = _exit_events(p.domain)
    sol = solve_ivp(
        rhs, (init.s, init.s + length), y0, method="RK45",
        rtol=ctrl.rel_tol, atol=ctrl.abs_tol, max_step=ctrl.max_step,
        events=[turning, *exits], dense_output=True,
    )
    if sol.status == -1:
        raise IntegratorStall(f"integration failed at s={sol.t[-1]}: {sol.message}")
    status = "domain_exit" if sol.status == 1 else "complete"

    def to_dv(u, du, y3):
        if not momentum:
            return y3
        _, _, F, _, w, _ = p.coefficients(u)
        return (y3 - F * du) / (w * w)

    states = tuple(
        GeodesicState(float(s), float(u), float(v), float(du), float(to_dv(u, du, y3)))
        for s, (u, v, du, y3) in zip(sol.t, sol.y.T)
    )

    def dense(s):
        u, v, du, y3 = sol.sol(s)
        return np.array([u, v, du, to_dv(u, du, y3)])

    diag = _diagnose(p, states, c, tuple(float(t) for t in sol.t_events[0]), status)
    return GeodesicPath(states, Slant(c), diag, dense)


def _diagnose(p, states, c, turning, status) -> Diagnostics:
    speed = slant = excess = 0.0
    for st in states:
        speed = max(speed, abs(speed_residual(p, st)))
        slant = max(slant, abs(clairaut_slant(p, st).c - c))
        excess = max(excess, _angle(p, st)[1])
    return Diagnostics(speed, slant, turning, status, excess)


def path_residuals(p: MetricProfile, path: GeodesicPath) -> tuple[np.ndarray, np.ndarray]:
    """Per-state slant and speed residuals (the exported diagnostic columns)."""
    c = path.slant.c
    slant = np.array([clairaut_slant(p, st).c - c for st in path.states])
    speed = np.array([speed_residual(p, st) for st in path.states])
    return slant, speed


def mirror_defect(path: GeodesicPath, s0: float, span: float, parity: int = 1, n: int = 201) -> float:
    """``max |u(s0 + t) - parity * u(s0 - t)|`` for ``t`` in ``[0, span]``."""
    ts = np.linspace(0.0, span, n)
    return float(max(abs(path.at(s0 + t)[0] - parity * path.at(s0 - t)[0]) for t in ts))


def v_of_u(path: GeodesicPath, us: Sequence[float]) -> np.ndarray:
    """Reparametrize a path by ``u`` on a stretch where ``u`` is monotone."""
    s, u = path.s, path.u
    if not (np.all(np.diff(u) > 0) or np.all(np.diff(u) < 0)):
        raise NotApplicable("u is not monotone along the path")
    out = []
    for target in us:
        i = int(np.searchsorted(u if u[-1] > u[0] else -u, target if u[-1] > u[0] else -target))
        i = min(max(i, 1), len(s) - 1)
        sa, sb = s[i - 1], s[i]
        if target == u[i - 1]:
            out.append(path.states[i - 1].v)
            continue
        root = brentq(lambda t: path.at(t)[0] - target, sa, sb, xtol=1e-15, rtol=1e-15)
        out.append(path.at(root)[1])
    return np.array(out)


# ---------------------------------------------------------------- first-order form


@dataclass(frozen=True)
class FirstOrderReport:
    max_slant_residual: float
    max_speed_residual: float
    passed: bool


def first_order_system_check(p: MetricProfile, path: GeodesicPath, tol: float = 1e-7) -> FirstOrderReport:
    """Residuals of ``F u' + omega^2 v' = c`` and ``u'^2 = 1 - c^2/omega^2`` on a path."""
    if not path.states:
        raise ValueError("empty path")
    if max(abs(st.du) for st in path.states) <= tol:
        raise NotApplicable("path is an orbit; the first-order system does not apply")
    c = path.slant.c
    r1 = r2 = 0.0
    for st in path.states:
        _, _, F, _, w, _ = p.coefficients(st.u)
        r1 = max(r1, abs(F * st.du + w * w * st.dv - c))
        r2 = max(r2, abs(st.du**2 - (1 - c * c / (w * w))))
    return FirstOrderReport(r1, r2, r1 <= tol and r2 <= tol)


def first_order_curve(
    p: MetricProfile, c: float, u0: float, v0: float, direction: int, length: float,
    rtol: float = 1e-11, atol: float = 1e-12,
) -> GeodesicPath:
    """Curve built from the first-order system alone, stopped before any turning point."""
    p.check(u0)
    sgn = 1.0 if direction > 0 else -1.0

    def rhs(s, y):
        E, Eu, F, Fu, w, wu = p.coefficients(y[0])
        du = sgn * math.sqrt(max(1 - c * c / (w * w), 0.0))
        return [du, (c - F * du) / (w * w)]

    def near_turn(s, y):
        return 1 - c * c / p.omega(y[0]) ** 2 - 1e-6

    near_turn.terminal = True
    sol = solve_ivp(rhs, (0.0, length), [u0, v0], method="DOP853", rtol=rtol, atol=atol,
                    max_step=0.05, events=[near_turn, *_exit_events(p.domain)], dense_output=True)
    states = []
    for s, (u, v) in zip(sol.t, sol.y.T):
        du, dv = rhs(s, [u, v])
        states.append(GeodesicState(float(s), float(u), float(v), du, dv))
    diag = _diagnose(p, states, c, (), "complete" if sol.status == 0 else "domain_exit")

    def dense(s):
        u, v = sol.sol(s)
        return np.array([u, v, *rhs(s, [u, v])])

    return GeodesicPath(tuple(states), Slant(c), diag, dense)


# ---------------------------------------------------------------- turning points


def _bisect(g, a, b, ga, tol):
    while b - a > tol:
        m = 0.5 * (a + b)
        gm = g(m)
        if gm == 0:
            return m
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def turning_points(p: MetricProfile, c: float, bracket: Interval, tol: float = 1e-12, scan: int = 2001) -> list[float]:
    """All roots of ``omega(u) = |c|`` in ``bracket``.

    Sign changes on a scan grid are refined by bisection; grid minima of
    ``omega - |c|`` are refined by bounded minimization to catch tangential
    (double) roots such as ``omega``'s own minimum.
    """
    if c == 0:
        raise ValueError("turning points are defined for c != 0")
    ac = abs(c)
    a, b = bracket.window()
    us = np.linspace(a, b, scan)
    us = us[(us > bracket.lo) & (us < bracket.hi)]

    def g(u):
        return p.omega(u) - ac

    gs = np.array([g(u) for u in us])
    roots = []
    for i in range(len(us)):
        if gs[i] == 0:
            roots.append(float(us[i]))
        elif i + 1 < len(us) and gs[i + 1] != 0 and (gs[i] > 0) != (gs[i + 1] > 0):
            roots.append(_bisect(g, us[i], us[i + 1], gs[i], tol))
    touch_tol = 1e-10 * max(1.0, ac)
    for i in range(1, len(us) - 1):
        if gs[i] <= gs[i - 1] and gs[i] <= gs[i + 1] and 0 < gs[i] < 1e-3 * max(1.0, ac):
            res = minimize_scalar(g, bounds=(us[i - 1], us[i + 1]), method="bounded",
                                  options={"xatol": tol})
            if abs(res.fun) <= touch_tol:
                roots.append(float(res.x))
    roots.sort()
    merged = []
    for r in roots:
        if not merged or r - merged[-1] > 100 * tol:
            merged.append(r)
    return merged


# ---------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureResult:
    u_grid: np.ndarray
    v_values: np.ndarray
    branch_sign: int
    estimated_error: float


class _Integrand:
    """``dv/du = -F/omega^2 + sign c/(omega sqrt(omega^2 - c^2))`` with endpoint handling."""

    def __init__(self, p, c, sign, roots, tol):
        self.p, self.c, self.sign, self.tol = p, c, sign, tol
        self.delta = 1e-3 * abs(c)
        self.windows = []
        for r, inward in roots:
            wu = p.omega.deriv(r)
            if abs(wu) < 1e-12:
                raise SlantRegionViolation(
                    f"omega has a critical point at the turning point u={r}; "
                    "the endpoint is not reachable by a non-orbit geodesic")
            self.windows.append((r, inward))

    def f(self, u):
        _, _, F, _, w, _ = self.p.coefficients(u)
        return -F / (w * w) + self.sign * self.c / (w * math.sqrt(w * w - self.c**2))

    def _u_of_t(self, r, inward, t):
        if t == 0:
            return r
        c2 = self.c**2
        end = r + inward * self.delta
        return brentq(lambda u: self.p.omega(u) ** 2 - c2 - t * t, r, end, xtol=1e-15, rtol=1e-15)

    def _t_of_u(self, r, u):
        return math.sqrt(max(self.p.omega(u) ** 2 - self.c**2, 0.0)) if u != r else 0.0

    def _substituted(self, r, inward, ua, ub):
        # omega^2 - c^2 = t^2  =>  du = t dt / (omega omega_u)
        def h(t):
            u = self._u_of_t(r, inward, t)
            _, _, F, _, w, wu = self.p.coefficients(u)
            return (-F * t / (w**3 * wu)) + self.sign * self.c / (w * w * wu)

        ta, tb = self._t_of_u(r, ua), self._t_of_u(r, ub)
        val, err = quad(h, ta, tb, epsabs=self.tol, epsrel=1e-13, limit=200)
        return val, err

    def integral(self, ua, ub):
        """``int_ua^ub f du``, splitting off turning-point windows."""
        if ua == ub:
            return 0.0, 0.0
        pieces = [(min(ua, ub), max(ua, ub), None)]
        for r, inward in self.windows:
            lo_w, hi_w = sorted((r, r + inward * self.delta))
            nxt = []
            for a, b, tag in pieces:
                if tag is not None or b <= lo_w or a >= hi_w:
                    nxt.append((a, b, tag))
                    continue
                if a < lo_w:
                    nxt.append((a, lo_w, None))
                nxt.append((max(a, lo_w), min(b, hi_w), (r, inward)))
                if b > hi_w:
                    nxt.append((hi_w, b, None))
            pieces = nxt
        total = err = 0.0
        for a, b, tag in pieces:
            if tag is None:
                val, e = quad(self.f, a, b, epsabs=self.tol, epsrel=1e-13, limit=200)
            else:
                r, inward = tag
                # orientation of t follows u moving away from r
                near, far = (a, b) if inward > 0 else (b, a)
                val, e = self._substituted(r, inward, near, far)
                val = val if inward > 0 else -val
            total += val
            err += e
        return (total, err) if ua < ub else (-total, err)


def _endpoint_root(p, ac, u, scale):
    gap = p.omega(u) - ac
    if gap < -1e-10 * scale:
        raise SlantRegionViolation(f"omega({u}) = {p.omega(u)} < |c| = {ac}")
    return gap <= 1e-10 * scale


def geodesic_by_quadrature(
    p: MetricProfile, c: float, u0: float, v0: float, u_end: float,
    sign: int = 1, tol: float = 1e-10, samples: int = 201,
) -> QuadratureResult:
    """``v(u) = v0 + int_u0^u (-F/omega^2 + sign c/(omega sqrt(omega^2-c^2))) du`` on a grid.

    Either endpoint may be a turning point ``omega = |c|``; there the
    integrable singularity is removed by substituting ``omega^2 - c^2 = t^2``.
    """
    if u0 == u_end:
        raise ValueError("u0 and u_end must differ")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    for u in (u0, u_end):
        if not (p.domain.lo <= u <= p.domain.hi) or not math.isfinite(u):
            raise OutOfDomain(f"u={u} outside the profile domain")
    ac = abs(c)
    grid = np.linspace(u0, u_end, samples)
    roots = []
    if c != 0:
        scale = max(1.0, ac)
        lo, hi = sorted((u0, u_end))
        for u in grid[1:-1]:
            if p.omega(u) <= ac:
                raise SlantRegionViolation(f"omega({u}) <= |c| = {ac} inside the segment")
        inner = [r for r in turning_points(p, c, Interval(lo, hi), tol=1e-13)
                 if min(r - lo, hi - r) > 1e-9]
        if inner:
            raise SlantRegionViolation(f"turning point(s) {inner} inside the segment")
        direction = 1 if u_end > u0 else -1
        if _endpoint_root(p, ac, u0, scale):
            roots.append((u0, direction))
        if _endpoint_root(p, ac, u_end, scale):
            roots.append((u_end, -direction))
    integrand = _Integrand(p, c, sign, roots, tol / samples)
    vs = [v0]
    err = 0.0
    for a, b in zip(grid[:-1], grid[1:]):
        val, e = integrand.integral(a, b)
        vs.append(vs[-1] + val)
        err += e
    return QuadratureResult(grid, np.array(vs), sign, err)


def stitch_quadrature(
    p: MetricProfile, c: float, u0: float, v0: float, u_end: float, direction: int,
    bracket: Optional[Interval] = None, tol: float = 1e-10, samples: int = 201,
    reflect: bool = False,
) -> list[QuadratureResult]:
    """Quadrature from ``u0`` moving along ``direction``, reflecting at one turning point.

    A ``u_end`` behind ``u0`` is reached after the turn; one ahead of ``u0``
    is reached directly unless ``reflect`` asks for the return leg.
    The branch sign equals the sign of ``u'``, so it flips at the turn.
    """
    direction = 1 if direction > 0 else -1
    bracket = bracket or p.domain
    ahead = []
    if c != 0:
        ahead = [r for r in turning_points(p, c, bracket, tol=1e-13)
                 if (r - u0) * direction > 1e-9]
    ahead.sort(key=lambda r: (r - u0) * direction)
    forward = (u_end - u0) * direction > 0
    if forward and not reflect and (not ahead or (ahead[0] - u_end) * direction >= 0):
        return [geodesic_by_quadrature(p, c, u0, v0, u_end, direction, tol, samples)]
    if not ahead:
        raise SlantRegionViolation(f"no turning point ahead of u0={u0}; u_end={u_end} is unreachable")
    r = ahead[0]
    if forward and (r - u_end) * direction < 0:
        raise SlantRegionViolation(f"u_end={u_end} lies beyond the turning point {r}")
    first = geodesic_by_quadrature(p, c, u0, v0, r, direction, tol, samples)
    second = geodesic_by_quadrature(p, c, r, float(first.v_values[-1]), u_end, -direction, tol, samples)
    return [first, second]
