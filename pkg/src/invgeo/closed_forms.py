"""Explicit geodesics on invariant surfaces of constant Gauss curvature.

These formulas assume the surface is built from a horizontal lift, so the
profile is ``E = 1, F = 0`` and ``omega`` solves ``omega'' + K omega = 0``.
Each family carries the first integral ``a`` (``omega^2 + R^2 omega_u^2`` for
``K = 1/R^2``, ``omega^2 - R^2 omega_u^2`` for ``K = -1/R^2``, ``omega_u`` for
``K = 0``) and an additive constant ``b``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .engine import (
    GeodesicState,
    geodesic_by_quadrature,
    integrate_geodesic,
    v_of_u,
)
from .errors import BranchDomainError
from .surface import HorizontalProfile, Interval, ScalarProfile

BRANCH_TOL = 1e-12


class Curvature(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    FLAT = "flat"


@dataclass(frozen=True)
class OmegaSolution:
    """``omega = A C(u) + B S(u)`` in the fundamental basis ``C(0)=1, S'(0)=1``."""

    K: float
    A: float
    B: float
    domain: Interval

    @property
    def case(self) -> Curvature:
        if self.K > 0:
            return Curvature.POSITIVE
        if self.K < 0:
            return Curvature.NEGATIVE
        return Curvature.FLAT

    @property
    def R(self) -> Optional[float]:
        return None if self.K == 0 else 1 / math.sqrt(abs(self.K))

    def _basis(self, u):
        K = self.K
        if K > 0:
            k = math.sqrt(K)
            return math.cos(k * u), math.sin(k * u) / k, -k * math.sin(k * u), math.cos(k * u)
        if K < 0:
            k = math.sqrt(-K)
            return math.cosh(k * u), math.sinh(k * u) / k, k * math.sinh(k * u), math.cosh(k * u)
        return 1.0, u, 0.0, 1.0

    def __call__(self, u: float) -> float:
        C, S, _, _ = self._basis(u)
        return self.A * C + self.B * S

    def deriv(self, u: float) -> float:
        _, _, dC, dS = self._basis(u)
        return self.A * dC + self.B * dS

    def deriv2(self, u: float) -> float:
        return -self.K * self(u)

    def profile(self) -> HorizontalProfile:
        om = ScalarProfile.analytic(self.__call__, self.deriv, self.deriv2, domain=self.domain)
        return HorizontalProfile(self.domain, om)


def solve_omega(K: float, omega0: float, domega0: float) -> OmegaSolution:
    """Solve ``omega'' + K omega = 0`` with ``omega(0) = omega0``, ``omega'(0) = domega0``.

    The domain is the largest interval around 0 on which ``omega > 0``.
    """
    if not omega0 > 0:
        raise ValueError("omega0 must be positive")
    A, B = float(omega0), float(domega0)
    if K > 0:
        k = math.sqrt(K)
        phi = math.atan2(B / k, A)
        dom = Interval((phi - math.pi / 2) / k, (phi + math.pi / 2) / k)
    elif K < 0:
        k = math.sqrt(-K)
        beta = B / k
        lo, hi = -math.inf, math.inf
        if beta > A:
            lo = math.atanh(-A / beta) / k
        elif beta < -A:
            hi = math.atanh(-A / beta) / k
        dom = Interval(lo, hi)
    else:
        if B > 0:
            dom = Interval(-A / B, math.inf)
        elif B < 0:
            dom = Interval(-math.inf, -A / B)
        else:
            dom = Interval(-math.inf, math.inf)
    return OmegaSolution(float(K), A, B, dom)


def first_integral_a(case: Curvature, R: Optional[float], omega: float, domega: float) -> float:
    if case is Curvature.POSITIVE:
        return omega**2 + R**2 * domega**2
    if case is Curvature.NEGATIVE:
        return omega**2 - R**2 * domega**2
    return domega


@dataclass(frozen=True)
class ClosedFormFamily:
    case: Curvature
    R: Optional[float]
    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.c == 0:
            raise BranchDomainError("closed forms require slant c != 0")
        if self.case is not Curvature.FLAT and not (self.R and self.R > 0):
            raise ValueError("curved families need R > 0")
        if self.case is Curvature.POSITIVE and not (self.a > 0 and self.a > self.c**2):
            raise BranchDomainError(f"positive curvature needs a > c^2 (a={self.a}, c^2={self.c**2})")

    @classmethod
    def from_solution(cls, sol: OmegaSolution, c: float, b: float = 0.0) -> "ClosedFormFamily":
        a = first_integral_a(sol.case, sol.R, sol(0.0), sol.deriv(0.0))
        return cls(sol.case, sol.R, a, b, c)

    @property
    def branch(self) -> str:
        a, c2 = self.a, self.c**2
        if self.case is Curvature.POSITIVE:
            return "positive"
        if self.case is Curvature.FLAT:
            return "flat:a=0" if abs(a) <= BRANCH_TOL else "flat:a!=0"
        if abs(a) <= BRANCH_TOL:
            return "negative:a=0"
        if abs(a - c2) <= BRANCH_TOL:
            return "negative:a=c2"
        if a < 0:
            return "negative:a<0"
        return "negative:0<a<c2" if a < c2 else "negative:a>c2"

    def to_json(self) -> dict:
        return {"case": self.case.value, "R": self.R, "a": self.a, "b": self.b, "c": self.c}

    @classmethod
    def from_json(cls, obj: dict) -> "ClosedFormFamily":
        return cls(Curvature(obj["case"]), obj.get("R"), obj["a"], obj.get("b", 0.0), obj["c"])


BRANCHES = (
    "positive",
    "negative:a=0", "negative:a<0", "negative:0<a<c2", "negative:a>c2", "negative:a=c2",
    "flat:a!=0", "flat:a=0",
)


def _asin(x):
    if abs(x) > 1:
        raise BranchDomainError(f"arcsin argument {x} outside [-1, 1]")
    return math.asin(x)


def _log(x):
    if not x > 0:
        raise BranchDomainError(f"log argument {x} not positive")
    return math.log(x)


def closed_form_v(fam: ClosedFormFamily, omega: OmegaSolution, u: float) -> float:
    """``v(u)`` of the geodesic with slant ``fam.c``, from the family's explicit formula."""
    if fam.case is not omega.case:
        raise ValueError(f"family is {fam.case.value} but omega has K={omega.K}")
    if u not in omega.domain:
        raise BranchDomainError(f"u={u} outside the domain of omega")
    w, wu = omega(u), omega.deriv(u)
    a, b, c, R = fam.a, fam.b, fam.c, fam.R
    c2 = c * c
    if not w > abs(c):
        raise BranchDomainError(f"omega({u})={w} <= |c|; outside the geodesic's region")
    s = math.sqrt(w * w - c2)
    br = fam.branch
    if br == "positive":
        return R / math.sqrt(a) * _asin(-c * R / math.sqrt(a - c2) * wu / w) + b
    if br == "negative:a=0":
        if wu == 0:
            raise BranchDomainError("omega_u = 0")
        return s / (c * wu) + b
    if br == "negative:a<0":
        return R / math.sqrt(-a) * _asin(-c * R / math.sqrt(c2 - a) * wu / w) + b
    if br == "negative:0<a<c2":
        return R / math.sqrt(a) * _log((c * R * wu + math.sqrt(a * (w * w - c2))) / (w * math.sqrt(c2 - a))) + b
    if br == "negative:a>c2":
        return R / math.sqrt(a) * math.asinh(c * R / math.sqrt(a - c2) * wu / w) + b
    if br == "negative:a=c2":
        return R / (2 * c) * _log(wu * wu / (w * w)) + b
    if br == "flat:a!=0":
        return math.atan(c / s) / a + b
    return c / (w * s) * u + b


# ---------------------------------------------------------------- oracle comparison


@dataclass(frozen=True)
class CrosscheckReport:
    branch: str
    sign: int                      # which +- branch of the quadrature integrand matches
    max_dev_quadrature: float
    max_dev_ode: float
    max_derivative_mismatch: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "branch": self.branch, "sign": self.sign,
            "max_dev_quadrature": self.max_dev_quadrature, "max_dev_ode": self.max_dev_ode,
            "max_derivative_mismatch": self.max_derivative_mismatch, "pass": self.passed,
        }


def integrand(omega: OmegaSolution, c: float, u: float) -> float:
    w = omega(u)
    return c / (w * math.sqrt(w * w - c * c))


def crosscheck_closed_form(
    fam: ClosedFormFamily, omega: OmegaSolution, u_range: Interval, tol: float = 1e-7, samples: int = 41,
) -> CrosscheckReport:
    """Compare the explicit ``v(u)`` with quadrature and with the ODE, modulo ``b`` and branch sign.

    Curves are aligned at the midpoint of ``u_range``.
    """
    if samples % 2 == 0:
        samples += 1
    lo, hi = u_range.lo, u_range.hi
    us = np.linspace(lo, hi, samples)
    mid = float(us[samples // 2])
    c = fam.c
    closed = np.array([closed_form_v(fam, omega, u) for u in us])
    closed -= closed[samples // 2]

    # the explicit formula fixes one of the two branches; read it off the derivative
    h = 1e-5 * max(1.0, hi - lo)
    inner = us[1:-1]
    deriv = np.array([(closed_form_v(fam, omega, u + h) - closed_form_v(fam, omega, u - h)) / (2 * h)
                      for u in inner])
    plus = np.array([integrand(omega, c, u) for u in inner])
    sign = 1 if deriv[len(deriv) // 2] * plus[len(plus) // 2] > 0 else -1
    deriv_mismatch = float(np.max(np.abs(deriv - sign * plus)))

    prof = omega.profile()
    up = geodesic_by_quadrature(prof, c, mid, 0.0, hi, sign, tol=1e-12, samples=samples // 2 + 1)
    down = geodesic_by_quadrature(prof, c, mid, 0.0, lo, sign, tol=1e-12, samples=samples // 2 + 1)
    quad_v = np.concatenate([down.v_values[::-1], up.v_values[1:]])
    dev_q = float(np.max(np.abs(closed - quad_v)))

    # u' = sign * sqrt(1 - c^2/omega^2) puts the ODE on the same branch
    w = omega(mid)
    du = sign * math.sqrt(1 - c * c / (w * w))
    init = GeodesicState(0.0, mid, 0.0, du, c / (w * w))

    def arclength(a, b):
        return abs(quad(lambda t: omega(t) / math.sqrt(omega(t) ** 2 - c * c), a, b, epsabs=1e-13)[0])

    ode_v = np.zeros_like(us)
    for side, targets in ((hi, us > mid), (lo, us < mid)):
        moving_up = side > mid
        length = (1 if moving_up == (sign > 0) else -1) * arclength(mid, side) * (1 + 1e-7)
        path = integrate_geodesic(prof, init, length)
        ode_v[targets] = v_of_u(path, us[targets])
    dev_o = float(np.max(np.abs(closed - ode_v)))
    passed = dev_q <= tol and dev_o <= tol and deriv_mismatch <= 1e-6
    return CrosscheckReport(fam.branch, sign, dev_q, dev_o, deriv_mismatch, passed)


@dataclass(frozen=True)
class BranchCase:
    """A concrete (omega, c, range) realizing one closed-form branch."""

    branch: str
    K: float
    omega0: float
    domega0: float
    c: float
    u_range: tuple[float, float]

    def build(self) -> tuple[ClosedFormFamily, OmegaSolution, Interval]:
        sol = solve_omega(self.K, self.omega0, self.domega0)
        return ClosedFormFamily.from_solution(sol, self.c), sol, Interval(*self.u_range)


# one realization of every branch; all ranges stay clear of turning points
BRANCH_CASES = (
    BranchCase("positive", 1.0, 1.0, 0.0, 0.3, (-1.0, 1.0)),                         # cos u
    BranchCase("negative:a=0", -1.0, 1.0, 1.0, 0.5, (0.0, 2.0)),                     # e^u
    BranchCase("negative:a<0", -1.0, math.sinh(1.0), math.cosh(1.0), 0.5, (-0.4, 1.0)),  # sinh(u+1)
    BranchCase("negative:0<a<c2", -1.0, 0.5, 0.0, 0.8, (1.2, 2.5)),                  # cosh(u)/2
    BranchCase("negative:a>c2", -1.0, 1.0, 0.0, 0.5, (-1.0, 1.0)),                   # cosh u
    BranchCase("negative:a=c2", -1.0, 1.0, 0.0, 1.0, (0.3, 2.0)),                    # cosh u, c = 1
    BranchCase("flat:a!=0", 0.0, 1.0, 1.0, 0.8, (0.0, 3.0)),                         # 1 + u
    BranchCase("flat:a=0", 0.0, 2.0, 0.0, 1.0, (-1.0, 1.0)),                         # omega = 2
)
