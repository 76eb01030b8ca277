"""Radial solver tests: datum recovery, profile constants, level curves and
the fundamental identity."""

import math

import numpy as np
import pytest

from talenti_neumann import geometry
from talenti_neumann.errors import DomainError, PositivityError
from talenti_neumann.measure import StepRearrangement
from talenti_neumann.radial import (
    NormalizationCondition,
    SymmetrizedProblem,
    c_star_of,
    check_fundamental_identity,
    phi_curve,
    radial_derivative,
    resolve_gamma_normalization,
    solve,
    sphere_area,
    unit_ball_volume,
)

COND1 = NormalizationCondition.TRACE_INTEGRAL
COND2 = NormalizationCondition.TRACE_SQUARED


def _unit_load_problem(n=2, radius=1.0):
    omega = unit_ball_volume(n)
    f_star = StepRearrangement([1.0], [omega * radius**n], omega * radius**n)
    return SymmetrizedProblem.from_rearrangement(f_star, n)


def _example_problem(eps=1e-3, n=2):
    widths = [unit_ball_volume(n), unit_ball_volume(n)]
    f_star = StepRearrangement([1.0, eps], widths, sum(widths))
    return SymmetrizedProblem.from_rearrangement(f_star, n)


def test_c_star_printed_values():
    eps = 1e-3
    prob2 = _example_problem(eps, n=2)
    assert prob2.c_star == pytest.approx(-math.sqrt(2.0) * (1 + eps) / 4.0, abs=1e-12)
    prob3 = _example_problem(eps, n=3)
    assert prob3.c_star == pytest.approx(-(1 + eps) / (3.0 * 4.0 ** (1 / 3)), abs=1e-12)
    unit = _unit_load_problem()
    assert unit.c_star == pytest.approx(-0.5, abs=1e-15)


def test_c_star_of_rejects_mismatched_length():
    f_star = StepRearrangement([1.0], [math.pi], math.pi)
    with pytest.raises(DomainError):
        c_star_of(f_star, 2, 2.0)


def test_radial_derivative_unit_load():
    prob = _unit_load_problem()
    for r in (0.1, 0.5, 1.0):
        assert radial_derivative(prob, r) == pytest.approx(-r / 2.0, rel=1e-14)
    with pytest.raises(DomainError):
        radial_derivative(prob, 0.0)


def test_radial_derivative_outer_band_matches_printed_profile():
    eps = 1e-3
    prob = _example_problem(eps)
    c3 = 0.5 * (eps - 1.0)
    for r in (1.1, 1.25, math.sqrt(2.0)):
        expected = c3 / r - eps * r / 2.0
        assert radial_derivative(prob, r) == pytest.approx(expected, rel=1e-13)
    assert radial_derivative(prob, prob.radius) == pytest.approx(prob.c_star, abs=1e-10)


def test_solve_boundary_values():
    eps = 1e-3
    prob = _example_problem(eps)
    data1 = geometry.condition_rhs(geometry.make_example(1, eps=eps), COND1, prob.c_star)
    sol1 = solve(prob, COND1, data1)
    assert sol1.value(prob.radius) == pytest.approx((1 + eps) / 2.0, abs=1e-12)
    data2 = geometry.condition_rhs(geometry.make_example(3, eps=eps), COND2, prob.c_star)
    sol2 = solve(prob, COND2, data2)
    assert sol2.value(prob.radius) == pytest.approx(math.sqrt((1 + eps) / 2.0), abs=1e-12)


def test_solve_torsion_profile():
    prob = _unit_load_problem()
    sol = solve(prob, COND1, 0.0)
    assert sol.v_m == 0.0
    for r in (0.0, 0.3, 0.8, 1.0):
        assert sol.value(r) == pytest.approx((1.0 - r * r) / 4.0, abs=1e-14)


def test_solve_rejects_negative_squared_datum():
    prob = _unit_load_problem()
    with pytest.raises(PositivityError):
        solve(prob, COND2, -1.0)


def test_profile_constants_recovered():
    eps = 1e-3
    case2d = geometry.make_example(1, eps=eps)
    sol2d = geometry.solve_symmetrized(case2d)
    c1 = 0.75 * (1 + eps) + 0.5 * (1 - eps) * math.log(math.sqrt(2.0))
    assert sol2d.segments[0].const == pytest.approx(c1, abs=1e-12)
    assert sol2d.segments[-1].psi == pytest.approx(0.5 * (eps - 1.0), abs=1e-12)

    case3d = geometry.make_example(2, eps=eps)
    sol3d = geometry.solve_symmetrized(case3d)
    assert -sol3d.segments[-1].psi == pytest.approx((1.0 - eps) / 3.0, abs=1e-12)
    c1_3d = 0.5 + 1.0 / (6.0 * 2.0 ** (1 / 3)) - eps / 2.0 + 7.0 * eps / (6.0 * 2.0 ** (1 / 3))
    assert sol3d.segments[0].const == pytest.approx(c1_3d, abs=1e-12)


def test_neumann_datum_met_and_profile_monotone():
    rng = np.random.default_rng(4)
    for _ in range(25):
        n = int(rng.integers(2, 4))
        k = int(rng.integers(1, 4))
        values = np.sort(rng.uniform(0.1, 3.0, size=k))[::-1]
        widths = rng.uniform(0.2, 2.0, size=k)
        f_star = StepRearrangement(values, widths, float(np.sum(widths)))
        prob = SymmetrizedProblem.from_rearrangement(f_star, n)
        sol = solve(prob, COND1, float(rng.uniform(0.0, 5.0)))
        assert sol.derivative(prob.radius) == pytest.approx(prob.c_star, abs=1e-10)
        rs = np.linspace(1e-6, prob.radius, 1000)
        dv = np.array([sol.derivative(float(r)) for r in rs])
        assert np.all(dv <= 1e-14)


def test_c1_matching_at_plateau_radii():
    eps = 0.37
    prob = _example_problem(eps)
    sol = solve(prob, COND1, 1.0)
    for seg_in, seg_out in zip(sol.segments, sol.segments[1:]):
        r = seg_in.r_hi
        assert seg_in.value(2, r) == pytest.approx(seg_out.value(2, r), abs=1e-12)
        assert seg_in.derivative(2, r) == pytest.approx(seg_out.derivative(2, r), abs=1e-12)


def test_phi_curve_quadratic_profile():
    prob = _unit_load_problem(radius=1.0)
    v_m = 0.3
    sol = solve(prob, COND1, v_m * sphere_area(2, 1.0))
    curve = phi_curve(sol)
    total = prob.ball_measure
    assert curve(v_m - 0.01) == pytest.approx(total)
    assert curve(-1.0) == pytest.approx(total)
    for t in np.linspace(v_m + 1e-9, v_m + 0.2499, 20):
        expected = math.pi * (1.0 - 4.0 * (t - v_m))
        assert curve(float(t)) == pytest.approx(expected, rel=1e-11)
    assert curve(sol.v_max) == 0.0
    assert curve(sol.v_max + 1.0) == 0.0


def test_fundamental_identity_residuals():
    prob = _unit_load_problem()
    sol = solve(prob, COND1, 2.0)
    assert check_fundamental_identity(sol) <= 1e-8

    eps = 1e-3
    case = geometry.make_example(1, eps=eps)
    vsol = geometry.solve_symmetrized(case)
    grid = np.linspace(vsol.v_m + 1e-5, vsol.v_max - 1e-5, 100)
    assert check_fundamental_identity(vsol, grid) <= 1e-8


def test_gamma_normalization_resolution():
    case = geometry.make_example(1, eps=1e-2)
    sol = geometry.solve_symmetrized(case)
    record = resolve_gamma_normalization(sol)
    assert record.exponent_sign == +1
    assert record.residual_positive <= 1e-10
    assert record.residual_negative > 1e-2


def test_u_min_below_v_m_on_examples():
    for number in (1, 2, 3):
        case = geometry.make_example(number, eps=1e-3)
        vsol = geometry.solve_symmetrized(case)
        u_min, _ = geometry.u_extrema(case)
        assert u_min <= vsol.v_m + 1e-12


def test_compatibility_validated_at_construction():
    f_star = StepRearrangement([1.0], [math.pi], math.pi)
    with pytest.raises(DomainError):
        SymmetrizedProblem(2, 1.0, f_star, c_star=-0.3)  # -0.5 is compatible
