"""Named horizontal profiles used by the CLI and the check suites."""
from __future__ import annotations

import math

from .spaces import funnel_profile
from .surface import REAL_LINE, HorizontalProfile, Interval, ScalarProfile

_HALF_PI = Interval(-math.pi / 2, math.pi / 2)


def _expr(expr: str, domain: Interval = REAL_LINE) -> HorizontalProfile:
    return HorizontalProfile(domain, ScalarProfile.from_expr(expr, domain=domain))


FIXTURES = {
    "funnel": funnel_profile,
    "cos": lambda: _expr("cos(u)", _HALF_PI),          # K = 1
    "cosh": lambda: _expr("cosh(u)"),                  # K = -1
    "exp": lambda: _expr("exp(u)"),                    # K = -1, a = 0
    "linear": lambda: _expr("1 + u", Interval(-1.0, math.inf)),  # flat cone
    "const": lambda: _expr("2"),                       # flat cylinder
}


def fixture_profile(name: str) -> HorizontalProfile:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
