"""``invgeo`` command line: trace, quadrature, check, orbit, lift."""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import sympy as sp

from . import checks, export
from .engine import (
    IntegratorControl,
    clairaut_slant,
    integrate_geodesic,
    state_from_angle,
    state_from_slant,
    stitch_quadrature,
)
from .errors import GeodesicError, IntegratorStall, SlantRegionViolation
from .fixtures import FIXTURES, fixture_profile
from .spaces import (
    FUNNEL_SPACE,
    catalog_surface,
    funnel_embedding,
    horizontal_lift_G34,
    orbit,
    parse_space,
)
from .surface import Interval, MetricProfile, load_profile

log = logging.getLogger("invgeo")


class ConfigError(Exception):
    """Conflicting or incomplete options (exit 2)."""


@dataclass(frozen=True)
class RunConfig:
    space_tag: Optional[str] = None
    fixture: Optional[str] = None
    profile_file: Optional[str] = None
    u0: float = 0.0
    v0: float = 0.0
    theta0: Optional[float] = None
    slant: Optional[float] = None
    direction: int = 1
    length: float = 10.0
    u_end: Optional[float] = None
    reflect: bool = False
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = 0.1
    fmt: str = "csv"
    out: Optional[str] = None

    def validate(self, need_launch: bool = True) -> None:
        if self.profile_file and (self.space_tag or self.fixture):
            raise ConfigError("--profile-file excludes --space and --fixture")
        if not (self.space_tag or self.fixture or self.profile_file):
            raise ConfigError("one of --space, --fixture, --profile-file is required")
        if need_launch and (self.theta0 is None) == (self.slant is None):
            raise ConfigError("exactly one of --theta0 and --slant is required")
        if self.fmt == "svg" and not self.out:
            raise ConfigError("--format svg needs --out")
        try:
            self.control
        except ValueError as e:
            raise ConfigError(str(e)) from None

    @property
    def control(self) -> IntegratorControl:
        return IntegratorControl(self.abs_tol, self.rel_tol, self.max_step)


@dataclass(frozen=True)
class Target:
    profile: MetricProfile
    embed: Optional[Callable[[float, float], np.ndarray]]
    label: str


def _space(tag: Optional[str]):
    if not tag:
        return None
    try:
        return parse_space(tag)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def resolve_target(cfg: RunConfig) -> Target:
    if cfg.profile_file:
        try:
            prof = load_profile(cfg.profile_file)
        except (OSError, ValueError, KeyError) as e:
            raise ConfigError(f"cannot read profile {cfg.profile_file}: {e}") from None
        return Target(prof, None, Path(cfg.profile_file).name)
    space = _space(cfg.space_tag)
    if cfg.fixture:
        prof = fixture_profile(cfg.fixture)
        if cfg.fixture == "funnel":
            if space is not None and space != FUNNEL_SPACE:
                raise ConfigError(f"the funnel lives in {FUNNEL_SPACE.tag}, not {space.tag}")
            return Target(prof, funnel_embedding, "funnel")
        if space is not None:
            raise ConfigError(f"fixture {cfg.fixture!r} has no embedding in {space.tag}")
        return Target(prof, None, cfg.fixture)
    surf = catalog_surface(space)
    return Target(surf.profile, surf.embed, space.tag)


def launch_slant(cfg: RunConfig, p: MetricProfile) -> tuple[float, int]:
    """Slant and u-direction from the config, printing the conversion."""
    w = p.omega(cfg.u0)
    if cfg.theta0 is not None:
        c = w * math.cos(cfg.theta0)
        direction = 1 if math.sin(cfg.theta0) >= 0 else -1
        print(f"theta0={cfg.theta0!r} at omega(u0)={w!r} -> slant c={c!r}", file=sys.stderr)
        return c, direction
    c = cfg.slant
    ratio = abs(c) / w
    if ratio > 1 + 1e-6:
        raise SlantRegionViolation(f"|c|={abs(c)!r} exceeds omega(u0)={w!r}; no such geodesic")
    theta = math.acos(max(-1.0, min(1.0, c / w)))
    if cfg.direction < 0:
        theta = -theta
    print(f"slant c={c!r} at omega(u0)={w!r} -> theta0={theta!r}", file=sys.stderr)
    return c, cfg.direction


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_trace(cfg: RunConfig) -> int:
    cfg.validate()
    t = resolve_target(cfg)
    p = t.profile
    if cfg.theta0 is not None:
        launch_slant(cfg, p)
        init = state_from_angle(p, cfg.u0, cfg.v0, cfg.theta0)
    else:
        c, direction = launch_slant(cfg, p)
        init = state_from_slant(p, cfg.u0, cfg.v0, c, direction)
    path = integrate_geodesic(p, init, cfg.length, cfg.control)
    d = path.diagnostics
    log.info("slant %r, speed drift %.3g, slant drift %.3g, status %s",
             clairaut_slant(p, init).c, d.max_speed_drift, d.max_slant_drift, d.status)
    if cfg.fmt == "csv":
        _emit(export.path_csv(p, path), cfg.out)
    elif cfg.fmt == "json":
        _emit(export.dumps(export.path_json(p, path)), cfg.out)
    else:
        ambient = None
        if t.embed is not None:
            pts = np.array([t.embed(st.u, st.v) for st in path.states])
            ambient = [(pts[:, 0], pts[:, 1], f"c={path.slant.c:.4g}")]
        export.write_svg(Path(cfg.out), [(path.v, path.u, f"c={path.slant.c:.4g}")], "v", "u",
                         title=t.label, ambient=ambient)
    return 0


def cmd_quadrature(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.u_end is None:
        raise ConfigError("quadrature needs --u-end")
    t = resolve_target(cfg)
    c, direction = launch_slant(cfg, t.profile)
    segs = stitch_quadrature(t.profile, c, cfg.u0, cfg.v0, cfg.u_end, direction, reflect=cfg.reflect)
    if cfg.fmt == "csv":
        _emit(export.quadrature_csv(segs), cfg.out)
    elif cfg.fmt == "json":
        _emit(export.dumps({"slant": c, **export.quadrature_json(segs)}), cfg.out)
    else:
        rows = np.array(export.quadrature_rows(segs))
        export.write_svg(Path(cfg.out), [(rows[:, 1], rows[:, 0], f"c={c:.4g}")], "v", "u", title=t.label)
    return 0


def cmd_check(cfg: RunConfig, suites: list[str]) -> int:
    if cfg.profile_file and (cfg.space_tag or cfg.fixture):
        raise ConfigError("--profile-file excludes --space and --fixture")
    space = _space(cfg.space_tag)
    profile = None
    if cfg.fixture or cfg.profile_file:
        profile = resolve_target(cfg).profile
    names = list(checks.SUITES) if "all" in suites else suites
    report = checks.run_suites(names, space=space, profile=profile, fixture=cfg.fixture)
    _emit(export.dumps(report) + "\n", cfg.out)
    return 0 if report["pass"] else 1


def _triple(text: str) -> tuple[float, float, float]:
    vals = tuple(float(x) for x in text.split(","))
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return vals


def _pair(text: str) -> tuple[float, float]:
    vals = tuple(float(x) for x in text.split(","))
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return vals


def cmd_orbit(args) -> int:
    space = parse_space(args.space)
    o = orbit(space, args.point)
    vs = np.linspace(*args.v_range, args.samples)
    print(f"omega={o.omega!r} d={o.geometric_distance!r}", file=sys.stderr)
    _emit(export.curve_csv(vs, o.sample(vs)), args.out)
    return 0


def cmd_lift(args) -> int:
    s = sp.Symbol("s", real=True)
    xi = [sp.sympify(args.xi1, locals={"s": s}), sp.sympify(args.xi2, locals={"s": s})]
    f = sp.lambdify(s, xi, modules="math")
    df = sp.lambdify(s, [sp.diff(e, s) for e in xi], modules="math")
    lift = horizontal_lift_G34(lambda t: tuple(f(t)), args.b, args.init, Interval(*args.s_range),
                               lambda t: tuple(df(t)))
    res = float(np.max(np.abs(lift.orthogonality_residuals())))
    print(f"max |g(gamma', X)| = {res:.3g}", file=sys.stderr)
    _emit(export.curve_csv(lift.s, lift.points), args.out)
    return 0


def _add_source(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--space", help="catalog tag, e.g. h2r-g34:1 or bcv:1,-1")
    ap.add_argument("--fixture", choices=sorted(FIXTURES))
    ap.add_argument("--profile-file", help="JSON or CSV profile")


def _add_launch(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--u0", type=float, default=0.0)
    ap.add_argument("--v0", type=float, default=0.0)
    g = ap.add_mutually_exclusive_group()
    g.add_argument("--theta0", type=float, help="angle with the orbit, radians")
    g.add_argument("--slant", type=float, help="Clairaut constant c")
    ap.add_argument("--direction", type=int, choices=(-1, 1), default=1, help="sign of u' (with --slant)")
    ap.add_argument("--format", dest="fmt", choices=("csv", "json", "svg"), default="csv")
    ap.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invgeo", description="Geodesics on invariant surfaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trace", help="integrate a geodesic")
    _add_source(tr)
    _add_launch(tr)
    tr.add_argument("--length", type=float, default=10.0)
    tr.add_argument("--abs-tol", type=float, default=1e-10)
    tr.add_argument("--rel-tol", type=float, default=1e-10)
    tr.add_argument("--max-step", type=float, default=0.1)

    qu = sub.add_parser("quadrature", help="v(u) by direct quadrature")
    _add_source(qu)
    _add_launch(qu)
    qu.add_argument("--u-end", type=float)
    qu.add_argument("--reflect", action="store_true", help="reach --u-end after a turning point")

    ch = sub.add_parser("check", help="run invariant suites, print a JSON report")
    _add_source(ch)
    ch.add_argument("--suite", action="append", choices=("all", *checks.SUITES))
    ch.add_argument("--out")

    ob = sub.add_parser("orbit", help="sample the orbit through a point")
    ob.add_argument("--space", required=True)
    ob.add_argument("--point", type=_triple, required=True)
    ob.add_argument("--v-range", type=_pair, default=(-1.0, 1.0))
    ob.add_argument("--samples", type=int, default=101)
    ob.add_argument("--out")

    li = sub.add_parser("lift", help="horizontal lift of a G34 profile curve")
    li.add_argument("--b", type=float, default=1.0)
    li.add_argument("--xi1", required=True, help="expression in s")
    li.add_argument("--xi2", required=True, help="expression in s")
    li.add_argument("--init", type=_triple, required=True)
    li.add_argument("--s-range", type=_pair, required=True)
    li.add_argument("--out")
    return ap


def config_from_args(args) -> RunConfig:
    keys = RunConfig.__dataclass_fields__
    kw = {k: getattr(args, k) for k in keys if hasattr(args, k) and getattr(args, k) is not None}
    if getattr(args, "space", None):
        kw["space_tag"] = args.space
    return RunConfig(**kw)


def main(argv: Optional[list[str]] = None) -> int:
    level = os.environ.get("GEOD_LOG", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "orbit":
            return cmd_orbit(args)
        if args.command == "lift":
            return cmd_lift(args)
        cfg = config_from_args(args)
        if args.command == "trace":
            return cmd_trace(cfg)
        if args.command == "quadrature":
            return cmd_quadrature(cfg)
        return cmd_check(cfg, args.suite or ["all"])
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SlantRegionViolation as e:
        print(f"SlantRegionViolation: {e}", file=sys.stderr)
        return 2 if args.command == "trace" else 3
    except (IntegratorStall, GeodesicError, ValueError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
