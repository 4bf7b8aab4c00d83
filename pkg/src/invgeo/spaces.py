"""Ambient 3-spaces with their Killing fields, plus the invariant surfaces inside them.

Each space carries two independent descriptions of its geometry:

* numeric (numpy) ambient metric, Killing field and flow, used for direct
  evaluation of ``g(X, X)`` and for pull-back checks;
* symbolic (sympy) versions of the same objects, used to build analytic
  metric profiles of catalog surfaces ``psi(u, v) = phi_v(gamma(u))``.

The per-space closed formulas for ``omega`` and the geometric Clairaut
relations are written out separately so they can be compared against both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

from .errors import OutOfDomain, SingularOrbit, Unsupported
from .surface import REAL_LINE, HorizontalProfile, Interval, MetricProfile, ScalarProfile

# distance_from_radius caps r here before arctan (m > 0)
_R_CAP = 1e12


def _pt(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {p.shape}")
    return p


def _fmt(x: float) -> str:
    return f"{x:g}"


class AmbientSpace:
    """Base for the tagged union of supported model spaces."""

    tag: str

    # numeric geometry ------------------------------------------------
    def check_point(self, p) -> np.ndarray:
        return _pt(p)

    def metric(self, p) -> np.ndarray:
        raise NotImplementedError

    def killing_field(self, p) -> np.ndarray:
        raise NotImplementedError

    def flow(self, v: float, p) -> np.ndarray:
        raise NotImplementedError

    def omega_formula(self, p) -> float:
        raise NotImplementedError

    def orbit_distance(self, p) -> float:
        """The geometric distance invariant ``d`` of the orbit through ``p``."""
        raise Unsupported(f"{self.tag}: no distance invariant")

    def clairaut_in_distance(self, d: float, theta: float, eps: Optional[int] = None) -> float:
        raise Unsupported(f"{self.tag}: no distance form of the Clairaut relation")

    # symbolic geometry -----------------------------------------------
    def sym_metric(self, x, y, z) -> sp.Matrix:
        raise NotImplementedError

    def sym_killing(self, x, y, z) -> sp.Matrix:
        raise NotImplementedError

    def sym_flow(self, v, p) -> tuple:
        raise NotImplementedError

    def sym_horizontal_lift(self, u) -> tuple:
        """A unit-speed lift orthogonal to the Killing field, in parameter ``u``."""
        raise NotImplementedError

    lift_domain: Interval = REAL_LINE


class _Rotational(AmbientSpace):
    """Shared rotation about the z-axis, ``X = y d/dx - x d/dy``."""

    def killing_field(self, p):
        x, y, _ = self.check_point(p)
        return np.array([y, -x, 0.0])

    def flow(self, v, p):
        x, y, z = self.check_point(p)
        c, s = math.cos(v), math.sin(v)
        return np.array([x * c + y * s, -x * s + y * c, z])

    def sym_killing(self, x, y, z):
        return sp.Matrix([y, -x, 0])

    def sym_flow(self, v, p):
        x, y, z = p
        return (x * sp.cos(v) + y * sp.sin(v), -x * sp.sin(v) + y * sp.cos(v), z)


@dataclass(frozen=True)
class EuclideanRotational(_Rotational):
    """Rotations of flat R^3 about the z-axis."""

    @property
    def tag(self):
        return "r3-rot"

    def metric(self, p):
        self.check_point(p)
        return np.eye(3)

    def omega_formula(self, p):
        x, y, _ = self.check_point(p)
        r = math.hypot(x, y)
        if r == 0:
            raise SingularOrbit("point on the rotation axis")
        return r

    def orbit_distance(self, p):
        x, y, _ = self.check_point(p)
        return math.hypot(x, y)

    def clairaut_in_distance(self, d, theta, eps=None):
        _check_d(d)
        return d * math.cos(theta)

    def sym_metric(self, x, y, z):
        return sp.eye(3)

    def sym_horizontal_lift(self, u):
        # torus of revolution, meridian of radius 1 about the circle of radius 2
        return (2 + sp.cos(u), sp.Integer(0), sp.sin(u))


class _H2xR(AmbientSpace):
    """Half-plane model of H^2 times R, ``g = (dx^2 + dy^2)/y^2 + dz^2``."""

    def check_point(self, p):
        p = _pt(p)
        if not p[1] > 0:
            raise OutOfDomain(f"y must be positive in H^2 x R, got {p[1]}")
        return p

    def metric(self, p):
        y = self.check_point(p)[1]
        return np.diag([1 / y**2, 1 / y**2, 1.0])

    def sym_metric(self, x, y, z):
        return sp.diag(1 / y**2, 1 / y**2, 1)


@dataclass(frozen=True)
class H2xR_G24(_H2xR):
    """Group generated by ``a X2 + b X4`` (horizontal translation plus vertical drift)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("G24 requires (a, b) != (0, 0)")

    @property
    def tag(self):
        return f"h2r-g24:{_fmt(self.a)},{_fmt(self.b)}"

    def killing_field(self, p):
        self.check_point(p)
        return np.array([self.a, 0.0, self.b])

    def flow(self, v, p):
        x, y, z = self.check_point(p)
        return np.array([x + self.a * v, y, z + self.b * v])

    def omega_formula(self, p):
        y = self.check_point(p)[1]
        return math.sqrt((self.a**2 + self.b**2 * y**2) / y**2)

    def orbit_distance(self, p):
        return abs(math.log(self.check_point(p)[1]))

    def clairaut_in_distance(self, d, theta, eps=None):
        _check_d(d)
        if eps is None:
            if self.a != 0 and d != 0:
                raise Unsupported("G24 relation needs eps = sign(1 - y0)")
            eps = 0
        return math.sqrt(self.a**2 * math.exp(2 * eps * d) + self.b**2) * math.cos(theta)

    def sym_killing(self, x, y, z):
        return sp.Matrix([self.a, 0, self.b])

    def sym_flow(self, v, p):
        x, y, z = p
        return (x + self.a * v, y, z + self.b * v)

    def sym_horizontal_lift(self, u):
        return (sp.Integer(0), sp.exp(u), sp.Integer(0))


def g24_epsilon(y0: float) -> int:
    """Sign convention of the G24 relation: ``sign(1 - y0)``."""
    return int(np.sign(1.0 - y0))


@dataclass(frozen=True)
class H2xR_G34(_H2xR):
    """Group generated by ``X3 + b X4`` (hyperbolic dilation plus vertical drift)."""

    b: float

    @property
    def tag(self):
        return f"h2r-g34:{_fmt(self.b)}"

    def killing_field(self, p):
        x, y, _ = self.check_point(p)
        return np.array([x, y, self.b])

    def flow(self, v, p):
        x, y, z = self.check_point(p)
        return np.array([math.exp(v) * x, math.exp(v) * y, z + self.b * v])

    def omega_formula(self, p):
        x, y, _ = self.check_point(p)
        sin_a = y / math.hypot(x, y)
        return math.sqrt((1 + self.b**2 * sin_a**2) / sin_a**2)

    def orbit_distance(self, p):
        x, y, _ = self.check_point(p)
        return g34_distance(math.atan2(y, x))

    def clairaut_in_distance(self, d, theta, eps=None):
        _check_d(d)
        return math.sqrt(2 * math.cosh(d) + self.b**2 - 1) * math.cos(theta)

    def sym_killing(self, x, y, z):
        return sp.Matrix([x, y, self.b])

    def sym_flow(self, v, p):
        x, y, z = p
        return (sp.exp(v) * x, sp.exp(v) * y, z + self.b * v)

    def sym_horizontal_lift(self, u):
        # the funnel lift (r, theta) = (1, 2 arccot e^-u) in rectangular form
        return (-sp.tanh(u), 1 / sp.cosh(u), sp.Integer(0))


def g34_distance(alpha: float) -> float:
    """Distance invariant of a G34 orbit at polar angle ``alpha``.

    This is the ``d`` of the distance-form relation, with ``cosh d = 1 + cot^2(alpha)/2``.
    Note that ``hyperbolic_distance`` to the geodesic ``x = 0`` gives
    ``cosh d = 1/sin(alpha)`` instead; see ``g34_distance_to_axis``.
    """
    if not 0 < alpha < math.pi:
        raise OutOfDomain("polar angle must lie in (0, pi)")
    t = math.sqrt(1 + 4 * math.tan(alpha) ** 2)
    return math.log((t + 1) / (t - 1))


def g34_distance_to_axis(alpha: float) -> float:
    """Hyperbolic distance from a point at polar angle ``alpha`` to the geodesic ``x = 0``."""
    if not 0 < alpha < math.pi:
        raise OutOfDomain("polar angle must lie in (0, pi)")
    return math.acosh(1 / math.sin(alpha))


@dataclass(frozen=True)
class H2xR_G14(_H2xR):
    """Group generated by ``X1 + b X4`` (elliptic rotation about i plus vertical drift)."""

    b: float

    @property
    def tag(self):
        return f"h2r-g14:{_fmt(self.b)}"

    def killing_field(self, p):
        x, y, _ = self.check_point(p)
        return np.array([(x * x - y * y + 1) / 2, x * y, self.b])

    def flow(self, v, p):
        # X1 generates w -> tan(v/2 + arctan w) on w = x + iy, a Moebius map
        x, y, z = self.check_point(p)
        w = complex(x, y)
        t = math.tan(v / 2)
        w = (w + t) / (1 - w * t)
        return np.array([w.real, w.imag, z + self.b * v])

    @staticmethod
    def beta(p) -> float:
        x, y, _ = p
        return (1 + x * x + y * y) / y

    def omega_formula(self, p):
        beta = self.beta(self.check_point(p))
        w2 = beta**2 / 4 + self.b**2 - 1
        if w2 <= 0:
            raise SingularOrbit("fixed point i of the rotation")
        return math.sqrt(w2)

    def orbit_distance(self, p):
        beta = self.beta(self.check_point(p))
        return math.log((beta + math.sqrt(max(beta * beta - 4, 0.0))) / 2)

    def clairaut_in_distance(self, d, theta, eps=None):
        _check_d(d)
        return math.sqrt(math.sinh(d) ** 2 + self.b**2) * math.cos(theta)

    def sym_killing(self, x, y, z):
        return sp.Matrix([(x**2 - y**2 + 1) / 2, x * y, self.b])

    def sym_flow(self, v, p):
        x, y, z = p
        t = sp.tan(v / 2)
        den = (1 - t * x) ** 2 + (t * y) ** 2
        xn = (x * (1 - t**2) + t * (1 - x**2 - y**2)) / den
        yn = y * (1 + t**2) / den
        return (xn, yn, z + self.b * v)

    def sym_horizontal_lift(self, u):
        return (sp.Integer(0), sp.exp(u), sp.Integer(0))

    @property
    def lift_domain(self):
        # with b = 0 the lift passes through the fixed point i at u = 0
        return Interval(0.0, math.inf) if self.b == 0 else REAL_LINE


@dataclass(frozen=True)
class BCV(_Rotational):
    """Bianchi-Cartan-Vranceanu space ``g_{ell,m}`` with its rotational Killing field."""

    ell: float
    m: float

    @property
    def tag(self):
        return f"bcv:{_fmt(self.ell)},{_fmt(self.m)}"

    def check_point(self, p):
        p = _pt(p)
        if self.m < 0 and not p[0] ** 2 + p[1] ** 2 < -1 / self.m:
            raise OutOfDomain(f"BCV with m<0 requires x^2+y^2 < {-1 / self.m}")
        return p

    def metric(self, p):
        x, y, _ = self.check_point(p)
        D = 1 + self.m * (x * x + y * y)
        w = np.array([self.ell * y / (2 * D), -self.ell * x / (2 * D), 1.0])
        return np.diag([1 / D**2, 1 / D**2, 0.0]) + np.outer(w, w)

    def omega_formula(self, p):
        x, y, _ = self.check_point(p)
        r = math.hypot(x, y)
        if r == 0:
            raise SingularOrbit("point on the rotation axis")
        return r * math.sqrt(4 + self.ell**2 * r**2) / (2 * (1 + self.m * r**2))

    def orbit_distance(self, p):
        x, y, _ = self.check_point(p)
        return distance_from_radius(self, math.hypot(x, y))

    def clairaut_in_distance(self, d, theta, eps=None):
        _check_d(d)
        m, l2 = self.m, self.ell**2
        if m > 0:
            k = math.sqrt(m)
            w = math.sin(2 * k * d) * math.sqrt(4 * m + l2 * math.tan(k * d) ** 2) / (4 * m)
        elif m < 0:
            k = math.sqrt(-m)
            w = math.sinh(2 * k * d) * math.sqrt(l2 * math.tanh(k * d) ** 2 - 4 * m) / (-4 * m)
        else:
            w = d * math.sqrt(4 + l2 * d * d) / 2
        return w * math.cos(theta)

    def sym_metric(self, x, y, z):
        D = 1 + self.m * (x**2 + y**2)
        w = sp.Matrix([self.ell * y / (2 * D), -self.ell * x / (2 * D), 1])
        return sp.diag(1 / D**2, 1 / D**2, 0) + w * w.T

    def sym_horizontal_lift(self, u):
        return (_sym_radius(self.m, u), sp.Integer(0), sp.Integer(0))

    @property
    def lift_domain(self):
        if self.m > 0:
            return Interval(0.0, math.pi / (2 * math.sqrt(self.m)))
        return Interval(0.0, math.inf)


def _sym_radius(m: float, d):
    if m > 0:
        k = sp.sqrt(sp.nsimplify(m))
        return sp.tan(k * d) / k
    if m < 0:
        k = sp.sqrt(sp.nsimplify(-m))
        return sp.tanh(k * d) / k
    return d


def _check_d(d: float) -> None:
    if d < 0:
        raise OutOfDomain(f"distance must be nonnegative, got {d}")


# ---------------------------------------------------------------- module API


def killing_field(space: AmbientSpace, p) -> np.ndarray:
    return space.killing_field(p)


def omega_at(space: AmbientSpace, p) -> float:
    """``||X(p)||`` from the closed per-space formula."""
    return space.omega_formula(p)


def metric_norm(space: AmbientSpace, p, vec=None) -> float:
    """``sqrt(g(w, w))`` at ``p``; defaults to the Killing field itself."""
    w = space.killing_field(p) if vec is None else np.asarray(vec, float)
    return math.sqrt(float(w @ space.metric(p) @ w))


def metric_inner(space: AmbientSpace, p, a, b) -> float:
    return float(np.asarray(a, float) @ space.metric(p) @ np.asarray(b, float))


def clairaut_in_distance(space: AmbientSpace, d: float, theta: float, eps: Optional[int] = None) -> float:
    """Left-hand side ``omega(d) cos(theta)`` of the geometric Clairaut relation."""
    return space.clairaut_in_distance(d, theta, eps)


def radius_from_distance(space: BCV, d: float) -> float:
    if not isinstance(space, BCV):
        raise Unsupported("radius/distance conversion is defined for BCV spaces")
    _check_d(d)
    m = space.m
    if m > 0:
        k = math.sqrt(m)
        if not k * d < math.pi / 2:
            raise OutOfDomain(f"d must be < pi/(2 sqrt m) = {math.pi / (2 * k)}")
        return math.tan(k * d) / k
    if m < 0:
        k = math.sqrt(-m)
        return math.tanh(k * d) / k
    return d


def distance_from_radius(space: BCV, r: float) -> float:
    if not isinstance(space, BCV):
        raise Unsupported("radius/distance conversion is defined for BCV spaces")
    if r < 0:
        raise OutOfDomain(f"radius must be nonnegative, got {r}")
    m = space.m
    if m > 0:
        k = math.sqrt(m)
        return math.atan(k * min(r, _R_CAP)) / k
    if m < 0:
        k = math.sqrt(-m)
        if not k * r < 1:
            raise OutOfDomain(f"r must be < 1/sqrt(-m) = {1 / k}")
        return math.atanh(k * r) / k
    return r


def hyperbolic_distance(p, q) -> float:
    """Distance in the upper half-plane via the geodesic through ``p`` and ``q``."""
    (xp, yp), (xq, yq) = p, q
    if not (yp > 0 and yq > 0):
        raise OutOfDomain("half-plane points need y > 0")
    if xp == xq:
        return abs(math.log(yq / yp))
    xi = (xq * xq + yq * yq - xp * xp - yp * yp) / (2 * (xq - xp))
    R = math.hypot(xp - xi, yp)

    def ratio(x, y):
        # (x - xi + R)/y, rewritten to avoid cancellation when x - xi ~ -R
        t = x - xi
        return (t + R) / y if t >= 0 else y / (R - t)

    return abs(math.log(ratio(xp, yp) / ratio(xq, yq)))


@dataclass(frozen=True)
class OrbitDescriptor:
    space: AmbientSpace
    through: np.ndarray
    omega: float
    geometric_distance: float

    def curve(self, v: float) -> np.ndarray:
        return self.space.flow(v, self.through)

    def sample(self, vs: Sequence[float]) -> np.ndarray:
        return np.array([self.curve(v) for v in vs])


def orbit(space: AmbientSpace, p) -> OrbitDescriptor:
    p = space.check_point(p)
    w = space.omega_formula(p)
    try:
        d = space.orbit_distance(p)
    except Unsupported:
        d = math.nan
    return OrbitDescriptor(space, p, w, d)


def parse_space(tag: str) -> AmbientSpace:
    """Parse CLI tags ``r3-rot``, ``h2r-g24:a,b``, ``h2r-g34:b``, ``h2r-g14:b``, ``bcv:ell,m``."""
    name, _, args = tag.strip().partition(":")
    try:
        vals = [float(s) for s in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"bad numeric parameters in space tag {tag!r}") from None
    arity = {"r3-rot": 0, "h2r-g24": 2, "h2r-g34": 1, "h2r-g14": 1, "bcv": 2}
    if name not in arity:
        raise ValueError(f"unknown space {name!r}; expected one of {sorted(arity)}")
    if len(vals) != arity[name]:
        raise ValueError(f"space {name!r} takes {arity[name]} parameter(s), got {len(vals)}")
    if name == "r3-rot":
        return EuclideanRotational()
    if name == "h2r-g24":
        return H2xR_G24(*vals)
    if name == "h2r-g34":
        return H2xR_G34(*vals)
    if name == "h2r-g14":
        return H2xR_G14(*vals)
    return BCV(*vals)


# ---------------------------------------------------------------- invariant surfaces


@dataclass(frozen=True)
class InvariantSurface:
    """``psi(u, v) = phi_v(lift(u))`` together with its metric profile."""

    space: AmbientSpace
    profile: MetricProfile
    lift: Callable[[float], np.ndarray]
    twist: float = 0.0

    def embed(self, u: float, v: float) -> np.ndarray:
        return self.space.flow(v, self.lift(u))


@lru_cache(maxsize=None)
def catalog_surface(space: AmbientSpace, twist: float = 0.0) -> InvariantSurface:
    """Invariant surface over the space's standard horizontal lift.

    ``twist != 0`` slides the lift along the orbits by ``twist*sin(u)``; the
    result is a non-horizontal lift of the same profile curve, with
    ``E != 1`` and ``F != 0``.
    """
    u = sp.Symbol("u", real=True)
    gh = space.sym_horizontal_lift(u)
    gam = space.sym_flow(twist * sp.sin(u), gh) if twist else gh
    dg = sp.Matrix([sp.diff(c, u) for c in gam])
    g = space.sym_metric(*gam)
    X = space.sym_killing(*gam)
    E = (dg.T * g * dg)[0]
    F = (dg.T * g * X)[0]
    G = (X.T * g * X)[0]
    dom = space.lift_domain
    if twist:
        profile = MetricProfile(
            dom,
            ScalarProfile.from_expr(E, domain=dom),
            ScalarProfile.from_expr(F, domain=dom),
            ScalarProfile.from_expr(sp.sqrt(G), domain=dom),
        )
    else:
        profile = HorizontalProfile(dom, ScalarProfile.from_expr(sp.sqrt(G), domain=dom))
    fn = sp.lambdify(u, list(gam), modules="math")
    return InvariantSurface(space, profile, lambda s: np.array(fn(s), dtype=float), twist)


# spaces exercised by the conservation and identity suites
CATALOG_TAGS = (
    "r3-rot",
    "h2r-g24:1,0.5",
    "h2r-g24:0,1",
    "h2r-g34:1",
    "h2r-g14:0.5",
    "h2r-g14:0",
    "bcv:0,0",
    "bcv:1,1",
    "bcv:1,-1",
    "bcv:0,-0.25",
)


def catalog_spaces() -> list[AmbientSpace]:
    return [parse_space(t) for t in CATALOG_TAGS]


# ---------------------------------------------------------------- funnel


def funnel_profile() -> HorizontalProfile:
    """Minimal G34 surface (b = 1) in H^2 x R: ``E = 1, F = 0, omega^2 = 2 + sinh^2 u``."""
    return HorizontalProfile(REAL_LINE, ScalarProfile.from_expr("sqrt(2 + sinh(u)**2)"))


def funnel_embedding(u: float, v: float) -> np.ndarray:
    return np.array([-math.exp(v) * math.tanh(u), math.exp(v) / math.cosh(u), v])


FUNNEL_SPACE = H2xR_G34(1.0)


# ---------------------------------------------------------------- horizontal lift


@dataclass(frozen=True)
class HorizontalLift:
    """Horizontal lift of a G34 profile curve; callable as ``s -> (x, y, z)``."""

    b: float
    s: np.ndarray            # integration nodes
    points: np.ndarray       # lift at the nodes, rectangular coordinates
    velocities: np.ndarray   # gamma'(s) at the nodes, rectangular coordinates
    _eval: Callable[[float], np.ndarray]

    def __call__(self, s: float) -> np.ndarray:
        return self._eval(s)

    def orthogonality_residuals(self) -> np.ndarray:
        """``g(gamma', X3 + b X4)`` at every node, from the ambient metric."""
        sp_ = H2xR_G34(self.b)
        return np.array([metric_inner(sp_, p, w, sp_.killing_field(p))
                         for p, w in zip(self.points, self.velocities)])


def horizontal_lift_G34(
    profile_curve: Callable[[float], tuple[float, float]],
    b: float,
    init,
    s_range: Interval,
    dprofile: Optional[Callable[[float], tuple[float, float]]] = None,
    rtol: float = 1e-12,
    atol: float = 1e-13,
) -> HorizontalLift:
    """Lift ``s -> (xi1(s), xi2(s))`` horizontally through ``init`` for ``s`` in ``s_range``.

    In cylindrical coordinates the lift is ``theta = xi1 + c1``,
    ``z = b ln r + xi2 + c2`` with ``(ln r)' = -b sin^2(theta) xi2' / (b^2 sin^2(theta) + 1)``;
    ``c1, c2`` are fixed by ``init`` at ``s_range.lo``.
    """
    if not s_range.bounded:
        raise ValueError("s_range must be bounded")
    x0, y0, z0 = H2xR_G34(b).check_point(init)
    s0, s1 = s_range.lo, s_range.hi
    if dprofile is None:
        h = 1e-6

        def dprofile(s):
            a, c = profile_curve(s + h), profile_curve(s - h)
            return ((a[0] - c[0]) / (2 * h), (a[1] - c[1]) / (2 * h))

    xi1_0, xi2_0 = profile_curve(s0)
    r0 = math.hypot(x0, y0)
    c1 = math.atan2(y0, x0) - xi1_0
    c2 = z0 - b * math.log(r0) - xi2_0

    def theta_of(s):
        xi1 = profile_curve(s)[0]
        th = xi1 + c1
        if not (0 < xi1 < math.pi and 0 < th < math.pi):
            raise OutOfDomain(f"xi1={xi1} leaves (0, pi) at s={s}")
        return th

    def rhs(s, y):
        sin2 = math.sin(theta_of(s)) ** 2
        return [-b * sin2 * dprofile(s)[1] / (b * b * sin2 + 1)]

    sol = solve_ivp(rhs, (s0, s1), [math.log(r0)], method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True, max_step=(s1 - s0) / 200)
    if not sol.success:
        raise RuntimeError(sol.message)

    def point(s, logr):
        th = theta_of(s)
        r = math.exp(logr)
        return np.array([r * math.cos(th), r * math.sin(th), b * logr + profile_curve(s)[1] + c2])

    pts, vel = [], []
    for s, logr in zip(sol.t, sol.y[0]):
        th = theta_of(s)
        r = math.exp(logr)
        dxi1, dxi2 = dprofile(s)
        dr = r * rhs(s, [logr])[0]
        dz = b * dr / r + dxi2
        pts.append(point(s, logr))
        vel.append([dr * math.cos(th) - r * math.sin(th) * dxi1,
                    dr * math.sin(th) + r * math.cos(th) * dxi1, dz])
    return HorizontalLift(b, sol.t, np.array(pts), np.array(vel),
                          lambda s: point(s, float(sol.sol(s)[0])))


def pullback_metric(space: AmbientSpace, embed: Callable[[float, float], np.ndarray],
                    u: float, v: float, h: float = 1e-3) -> tuple[float, float, float]:
    """``(E, F, G)`` of an embedding, from 4th-order central differences and the ambient metric."""

    def d(f):
        return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)

    psi_u = d(lambda t: embed(u + t, v))
    psi_v = d(lambda t: embed(u, v + t))
    g = space.metric(embed(u, v))
    return float(psi_u @ g @ psi_u), float(psi_u @ g @ psi_v), float(psi_v @ g @ psi_v)
