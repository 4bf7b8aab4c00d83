import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from invgeo.closed_forms import (
    BRANCH_CASES,
    BRANCHES,
    ClosedFormFamily,
    Curvature,
    closed_form_v,
    crosscheck_closed_form,
    first_integral_a,
    integrand,
    solve_omega,
)
from invgeo.errors import BranchDomainError
from invgeo.surface import verify_constant_curvature


@given(K=st.floats(-4, 4), w0=st.floats(0.1, 3), dw0=st.floats(-3, 3))
def test_solution_solves_ode(K, w0, dw0):
    sol = solve_omega(K, w0, dw0)
    assert sol(0.0) == pytest.approx(w0) and sol.deriv(0.0) == pytest.approx(dw0)
    lo, hi = sol.domain.window(1.0)
    for u in np.linspace(lo, hi, 7)[1:-1]:
        h = 1e-4
        fd2 = (sol(u + h) - 2 * sol(u) + sol(u - h)) / h**2
        assert fd2 == pytest.approx(-K * sol(u), abs=1e-5 * (1 + abs(sol(u))))
        assert sol(u) > 0


@pytest.mark.parametrize("K,w0,dw0,lo,hi", [
    (1.0, 1.0, 0.0, -math.pi / 2, math.pi / 2),      # cos u
    (-1.0, 1.0, 1.0, -math.inf, math.inf),           # e^u
    (-1.0, 1.0, 2.0, math.atanh(-0.5), math.inf),    # cosh u + 2 sinh u vanishes at tanh u = -1/2
    (0.0, 1.0, 1.0, -1.0, math.inf),                 # 1 + u
    (0.0, 2.0, 0.0, -math.inf, math.inf),
])
def test_domain_clipping(K, w0, dw0, lo, hi):
    sol = solve_omega(K, w0, dw0)
    assert sol.domain.lo == pytest.approx(lo, abs=1e-12)
    assert sol.domain.hi == pytest.approx(hi, abs=1e-12)


def test_solution_profile_has_constant_curvature():
    sol = solve_omega(-1.0, 1.0, 0.3)
    assert verify_constant_curvature(sol.profile(), -1.0).passed


@given(K=st.sampled_from([1.0, -1.0, 0.0, 0.25, -2.0]), w0=st.floats(0.5, 2), dw0=st.floats(-1, 1))
def test_first_integral_constant(K, w0, dw0):
    sol = solve_omega(K, w0, dw0)
    lo, hi = sol.domain.window(1.0)
    vals = [first_integral_a(sol.case, sol.R, sol(u), sol.deriv(u)) for u in np.linspace(lo, hi, 9)[1:-1]]
    assert np.ptp(vals) <= 1e-12 * max(1.0, max(map(abs, vals)))


def test_every_branch_has_a_case():
    built = [case.build()[0].branch for case in BRANCH_CASES]
    assert built == [case.branch for case in BRANCH_CASES]
    assert sorted(built) == sorted(BRANCHES)


@pytest.mark.parametrize("case", BRANCH_CASES, ids=[c.branch for c in BRANCH_CASES])
def test_branch_crosscheck(case):
    fam, sol, rng = case.build()
    rep = crosscheck_closed_form(fam, sol, rng, tol=1e-6)
    assert rep.passed, rep
    assert rep.max_dev_quadrature <= 1e-6 and rep.max_dev_ode <= 1e-6


@pytest.mark.parametrize("case", BRANCH_CASES, ids=[c.branch for c in BRANCH_CASES])
def test_branch_sign_convention(case):
    # only the flat a != 0 formula follows the minus branch of the integrand
    fam, sol, rng = case.build()
    rep = crosscheck_closed_form(fam, sol, rng)
    assert rep.sign == (-1 if case.branch == "flat:a!=0" else 1)


@given(c=st.floats(0.05, 0.9), u=st.floats(-1.0, 1.0))
def test_positive_derivative_matches_integrand(c, u):
    sol = solve_omega(1.0, 1.0, 0.0)
    assume(sol(u) > abs(c) + 0.05)
    fam = ClosedFormFamily.from_solution(sol, c)
    h = 1e-6
    d = (closed_form_v(fam, sol, u + h) - closed_form_v(fam, sol, u - h)) / (2 * h)
    assert d == pytest.approx(integrand(sol, c, u), rel=1e-5, abs=1e-7)


@given(c=st.floats(0.05, 0.9), u=st.floats(0.2, 3.0))
def test_flat_derivative_is_minus_integrand(c, u):
    sol = solve_omega(0.0, 1.0, 1.0)
    assume(sol(u) > abs(c) + 0.05)
    fam = ClosedFormFamily.from_solution(sol, c)
    h = 1e-6
    d = (closed_form_v(fam, sol, u + h) - closed_form_v(fam, sol, u - h)) / (2 * h)
    assert d == pytest.approx(-integrand(sol, c, u), rel=1e-5, abs=1e-7)


def test_zero_slant_rejected():
    with pytest.raises(BranchDomainError):
        ClosedFormFamily(Curvature.FLAT, None, 1.0, 0.0, 0.0)


def test_positive_needs_a_above_c2():
    with pytest.raises(BranchDomainError):
        ClosedFormFamily(Curvature.POSITIVE, 1.0, 0.5, 0.0, 0.8)


def test_outside_region_raises():
    sol = solve_omega(-1.0, 1.0, 0.0)
    fam = ClosedFormFamily.from_solution(sol, 1.2)
    with pytest.raises(BranchDomainError):
        closed_form_v(fam, sol, 0.1)


def test_outside_domain_raises():
    sol = solve_omega(1.0, 1.0, 0.0)
    fam = ClosedFormFamily.from_solution(sol, 0.3)
    with pytest.raises(BranchDomainError):
        closed_form_v(fam, sol, 2.0)


def test_family_json_round_trip():
    fam = ClosedFormFamily.from_solution(solve_omega(-1.0, 1.0, 0.0), 0.5, b=0.25)
    assert ClosedFormFamily.from_json(fam.to_json()) == fam
