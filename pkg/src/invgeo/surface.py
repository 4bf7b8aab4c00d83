"""Metric profiles of invariant surfaces.

An invariant surface parametrized by ``psi(u, v) = phi_v(gamma(u))`` has a
pull-back metric ``E du^2 + 2F du dv + G dv^2`` whose coefficients depend on
``u`` only, with ``G = omega(u)^2`` the squared length of the Killing field
along the lift. The structural identity ``E G - F^2 = G`` always holds, and
the Gauss curvature reduces to ``K = -omega_uu / omega``.

``G`` is never stored: it is always recomputed as ``omega**2``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
import sympy as sp
from scipy.interpolate import CubicSpline

from .errors import InvalidDomain, NonpositiveOmega, OutOfDomain, Unsupported

RealFn = Callable[[float], float]

# extent used when sampling an unbounded side of a domain
DEFAULT_WINDOW = 5.0


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)`` of the profile parameter; either side may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or not self.lo < self.hi:
            raise InvalidDomain(f"empty interval ({self.lo}, {self.hi})")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def __contains__(self, u: float) -> bool:
        return self.lo < u < self.hi

    def window(self, half_width: float = DEFAULT_WINDOW) -> tuple[float, float]:
        """Finite sub-range used for sampling; unbounded sides are clipped."""
        lo, hi = self.lo, self.hi
        if not math.isfinite(lo) and not math.isfinite(hi):
            return -half_width, half_width
        if not math.isfinite(lo):
            return hi - half_width, hi
        if not math.isfinite(hi):
            return lo, lo + half_width
        return lo, hi

    def grid(self, samples: int, half_width: float = DEFAULT_WINDOW) -> np.ndarray:
        """Uniform grid of ``samples`` points strictly inside the interval."""
        if samples < 2:
            raise ValueError("need at least 2 samples")
        a, b = self.window(half_width)
        return np.linspace(a, b, samples + 2)[1:-1]

    def to_json(self) -> dict:
        return {
            "lo": self.lo if math.isfinite(self.lo) else None,
            "hi": self.hi if math.isfinite(self.hi) else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Interval":
        lo = -math.inf if obj.get("lo") is None else float(obj["lo"])
        hi = math.inf if obj.get("hi") is None else float(obj["hi"])
        return cls(lo, hi)


REAL_LINE = Interval(-math.inf, math.inf)


@dataclass(frozen=True)
class Analytic:
    pass


@dataclass(frozen=True)
class FiniteDifference:
    """Central-difference derivatives; ``step=None`` means ``max(1e-5, 1e-7|u|)``."""

    step: Optional[float] = None

    def h(self, u: float) -> float:
        if self.step is not None:
            return self.step
        return max(1e-5, 1e-7 * abs(u))


Provenance = Union[Analytic, FiniteDifference]


@dataclass(frozen=True)
class ScalarProfile:
    """A real function of ``u`` together with its first two derivatives."""

    func: RealFn
    d1: Optional[RealFn] = None
    d2: Optional[RealFn] = None
    provenance: Provenance = field(default_factory=Analytic)
    expr: Optional[str] = None
    domain: Interval = REAL_LINE

    @classmethod
    def analytic(cls, func, d1, d2, expr=None, domain=REAL_LINE) -> "ScalarProfile":
        return cls(func, d1, d2, Analytic(), expr, domain)

    @classmethod
    def finite_difference(cls, func, step=None, domain=REAL_LINE) -> "ScalarProfile":
        return cls(func, None, None, FiniteDifference(step), None, domain)

    @classmethod
    def constant(cls, value: float) -> "ScalarProfile":
        value = float(value)
        return cls.analytic(lambda u: value, lambda u: 0.0, lambda u: 0.0, expr=repr(value))

    @classmethod
    def from_expr(cls, expr, var: str = "u", domain=REAL_LINE) -> "ScalarProfile":
        """Build an analytic profile from a sympy expression or string in ``var``."""
        u = sp.Symbol(var, real=True)
        e = sp.sympify(expr, locals={var: u}) if isinstance(expr, str) else expr
        free = e.free_symbols - {u}
        if free:
            raise ValueError(f"expression has unknown symbols {sorted(map(str, free))}")
        e1 = sp.diff(e, u)
        e2 = sp.diff(e1, u)
        fns = [_lambdify(u, x) for x in (e, e1, e2)]
        return cls.analytic(*fns, expr=str(e), domain=domain)

    def __call__(self, u: float) -> float:
        return self.func(u)

    def eval(self, u: float) -> float:
        return self.func(u)

    def _stencil_side(self, u: float, h: float) -> int:
        # 0: central, +1: forward, -1: backward
        if u - h <= self.domain.lo:
            return 1
        if u + h >= self.domain.hi:
            return -1
        return 0

    def deriv(self, u: float) -> float:
        if self.d1 is not None:
            return self.d1(u)
        f = self.func
        h = self.provenance.h(u)
        side = self._stencil_side(u, h)
        if side == 0:
            return (f(u + h) - f(u - h)) / (2 * h)
        h = side * h
        return (-3 * f(u) + 4 * f(u + h) - f(u + 2 * h)) / (2 * h)

    def deriv2(self, u: float) -> float:
        if self.d2 is not None:
            return self.d2(u)
        f = self.func
        h = self.provenance.h(u)
        side = self._stencil_side(u, h)
        if side == 0:
            return (f(u + h) - 2 * f(u) + f(u - h)) / (h * h)
        h = side * h
        return (2 * f(u) - 5 * f(u + h) + 4 * f(u + 2 * h) - f(u + 3 * h)) / (h * h)


def _lambdify(u, e) -> RealFn:
    fn = sp.lambdify(u, e, modules="math", cse=True)
    if e.is_number:
        value = float(e)
        return lambda x: value
    return lambda x: float(fn(x))


@dataclass(frozen=True)
class MetricProfile:
    """Intrinsic data ``(E, F, omega)`` of an invariant surface on ``domain``."""

    domain: Interval
    E: ScalarProfile
    F: ScalarProfile
    omega: ScalarProfile

    @property
    def is_horizontal(self) -> bool:
        return False

    def check(self, u: float) -> None:
        if u not in self.domain:
            raise OutOfDomain(f"u={u} outside ({self.domain.lo}, {self.domain.hi})")

    def G(self, u: float) -> float:
        return self.omega(u) ** 2

    def coefficients(self, u: float) -> tuple[float, float, float, float, float, float]:
        """``(E, E_u, F, F_u, omega, omega_u)`` at ``u``; the geodesic solver's hot path."""
        return (
            self.E.func(u), self.E.deriv(u),
            self.F.func(u), self.F.deriv(u),
            self.omega.func(u), self.omega.deriv(u),
        )


class HorizontalProfile(MetricProfile):
    """Profile built from a horizontal lift, so ``E = 1`` and ``F = 0``."""

    def __init__(self, domain: Interval, omega: ScalarProfile):
        super().__init__(domain, _ONE, _ZERO, omega)

    @property
    def is_horizontal(self) -> bool:
        return True

    def coefficients(self, u):
        return 1.0, 0.0, 0.0, 0.0, self.omega.func(u), self.omega.deriv(u)


_ONE = ScalarProfile.constant(1.0)
_ZERO = ScalarProfile.constant(0.0)


def profile_from_exprs(omega, E="1", F="0", domain: Interval = REAL_LINE) -> MetricProfile:
    """Analytic profile from sympy-parsable expressions in ``u``."""
    om = ScalarProfile.from_expr(omega, domain=domain)
    if str(sp.sympify(E)) == "1" and str(sp.sympify(F)) == "0":
        return HorizontalProfile(domain, om)
    return MetricProfile(
        domain,
        ScalarProfile.from_expr(E, domain=domain),
        ScalarProfile.from_expr(F, domain=domain),
        om,
    )


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class Report:
    max_residual: float
    passed: bool
    worst_u: float = math.nan

    def to_json(self) -> dict:
        return {"max_residual": self.max_residual, "pass": self.passed, "worst_u": self.worst_u}


def _sample_omega(p: MetricProfile, samples: int) -> tuple[np.ndarray, np.ndarray]:
    if samples < 2:
        raise ValueError("need at least 2 samples")
    us = p.domain.grid(samples)
    om = np.array([p.omega(u) for u in us])
    bad = ~(om > 0)
    if bad.any():
        raise NonpositiveOmega(f"omega <= 0 at u={us[bad][0]}")
    return us, om


def validate_metric_identity(
    p: MetricProfile, samples: int = 100, tol: float = 1e-9, relative: bool = False
) -> Report:
    """Check ``E omega^2 - F^2 = omega^2`` on a uniform grid.

    With ``relative=True`` the residual is divided by ``E omega^2``, the size
    of the terms that cancel.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    us, om = _sample_omega(p, samples)
    E = np.array([p.E(u) for u in us])
    F = np.array([p.F(u) for u in us])
    res = np.abs(E * om**2 - F**2 - om**2)
    if relative:
        res = res / np.maximum(np.abs(E) * om**2, 1.0)
    i = int(np.argmax(res))
    return Report(float(res[i]), bool(res[i] <= tol), float(us[i]))


def gauss_curvature(p: MetricProfile, u: float) -> float:
    p.check(u)
    w = p.omega(u)
    if not w > 0:
        raise NonpositiveOmega(f"omega({u}) = {w}")
    return -p.omega.deriv2(u) / w


def verify_constant_curvature(p: MetricProfile, K: float, samples: int = 100, tol: float = 1e-9) -> Report:
    """Check ``omega_uu + K omega = 0`` on a uniform grid."""
    us, om = _sample_omega(p, samples)
    res = np.abs(np.array([p.omega.deriv2(u) for u in us]) + K * om)
    i = int(np.argmax(res))
    return Report(float(res[i]), bool(res[i] <= tol), float(us[i]))


# ---------------------------------------------------------------- serialization


def tabulated_profile(u, omega, E=None, F=None) -> MetricProfile:
    """Cubic-spline profile from columns on a strictly increasing ``u`` grid."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size < 4 or np.any(np.diff(u) <= 0):
        raise InvalidDomain("tabulated grid must be strictly increasing with >= 4 nodes")
    domain = Interval(float(u[0]), float(u[-1]))

    def spline(col):
        cs = CubicSpline(u, np.asarray(col, dtype=float))
        d1, d2 = cs.derivative(1), cs.derivative(2)
        return ScalarProfile.analytic(
            lambda x: float(cs(x)), lambda x: float(d1(x)), lambda x: float(d2(x)), domain=domain
        )

    om = spline(omega)
    if E is None and F is None:
        prof = HorizontalProfile(domain, om)
    else:
        E = np.ones_like(u) if E is None else E
        F = np.zeros_like(u) if F is None else F
        prof = MetricProfile(domain, spline(E), spline(F), om)
    object.__setattr__(prof, "_table", {
        "u": u.tolist(),
        "omega": np.asarray(omega, float).tolist(),
        "E": None if E is None else np.asarray(E, float).tolist(),
        "F": None if F is None else np.asarray(F, float).tolist(),
    })
    return prof


def profile_to_json(p: MetricProfile) -> dict:
    table = getattr(p, "_table", None)
    if table is not None:
        out = {"domain": p.domain.to_json(), "kind": "tabulated", "u": table["u"], "omega": table["omega"]}
        if table["E"] is not None:
            out["E"], out["F"] = table["E"], table["F"]
        return out
    exprs = [s.expr for s in (p.E, p.F, p.omega)]
    if any(e is None for e in exprs):
        raise Unsupported("profile has no symbolic form; tabulate it first")
    return {"domain": p.domain.to_json(), "kind": "analytic", "E": exprs[0], "F": exprs[1], "omega": exprs[2]}


def profile_from_json(obj: dict) -> MetricProfile:
    kind = obj.get("kind")
    if kind == "analytic":
        domain = Interval.from_json(obj.get("domain", {}))
        return profile_from_exprs(obj["omega"], obj.get("E", "1"), obj.get("F", "0"), domain)
    if kind == "tabulated":
        return tabulated_profile(obj["u"], obj["omega"], obj.get("E"), obj.get("F"))
    raise ValueError(f"unknown profile kind {kind!r}")


def load_profile(path) -> MetricProfile:
    """Read a profile from a ``.json`` document or a ``.csv`` table (``u,omega[,E,F]``)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        data = np.genfromtxt(path, delimiter=",", names=True)
        names = data.dtype.names
        E = data["E"] if "E" in names else None
        F = data["F"] if "F" in names else None
        return tabulated_profile(data["u"], data["omega"], E, F)
    return profile_from_json(json.loads(path.read_text()))


def save_profile(p: MetricProfile, path) -> None:
    Path(path).write_text(json.dumps(profile_to_json(p), indent=2))
