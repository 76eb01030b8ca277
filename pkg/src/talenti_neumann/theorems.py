"""Comparison-principle harness: theorem suites, counterexample sweeps and
level-set inequality checks.

Tolerances: 1e-9 relative for fully analytic pipelines, 1e-3 relative for
sampled ones, and 1%/2% for fitted leading-order expansion constants
(2% for the reference values only quoted to four digits).
"""

from __future__ import annotations

import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from . import geometry
from .errors import DomainError, PositivityError
from .lorentz import LorentzIndex, lorentz_norm
from .measure import distribution, partial_integral
from .radial import (
    NormalizationCondition,
    check_fundamental_identity,
    gamma_n,
    phi_curve,
    resolve_gamma_normalization,
)
from .reports import ComparisonReport, ConstantCheck, NormEntry

ANALYTIC_RTOL = 1e-9
SAMPLED_RTOL = 1e-3
FIT_RTOL = 1e-2
FIT_RTOL_APPROX = 2e-2
DEFAULT_EPS_SWEEP = (1e-2, 1e-3, 1e-4)


def default_p_grid(p_max: float, points: int = 6) -> np.ndarray:
    """Log-spaced interior points plus the inclusive endpoint."""
    return np.geomspace(p_max / 16.0, p_max, points)


def _condition_name(cond: NormalizationCondition) -> str:
    return (
        "trace-integral"
        if cond is NormalizationCondition.TRACE_INTEGRAL
        else "trace-squared"
    )


def _u_curve(case, pipeline: str, resolution: int):
    if pipeline == "analytic" and case.is_ball_case:
        return geometry.mu_curve(case), ANALYTIC_RTOL
    u_sample, _ = geometry.sample_domain(case, resolution)
    return distribution(u_sample), SAMPLED_RTOL


def _entry(family, p, q, curve_u, curve_v, rtol, guaranteed) -> NormEntry:
    idx = LorentzIndex(p, q)
    lhs = lorentz_norm(curve_u, idx)
    rhs = lorentz_norm(curve_v, idx)
    return NormEntry(family, p, q, lhs, rhs, rtol * max(abs(lhs), abs(rhs)), guaranteed)


def _base_residuals(case, vsol) -> dict:
    res = {
        "fundamental_identity": check_fundamental_identity(vsol),
        "compatibility_max": max(abs(r) for r in geometry.compatibility_residuals(case)),
    }
    u_min, _ = geometry.u_extrema(case)
    res["u_min_minus_v_m"] = u_min - vsol.v_m  # expected <= 0
    return res


def run_theorem_1_1(
    case,
    cond,
    p_grid: Optional[Sequence[float]] = None,
    pipeline: str = "analytic",
    resolution: int = 512,
    diagnostics: Sequence[float] = (),
) -> ComparisonReport:
    """Lorentz comparison suite for a general positive-solution case.

    The (p,1) family is guaranteed for p <= n/(2n-2) under either
    normalization; the (2p,2) family only under the trace-squared one, for
    p <= n/(3n-4).  Entries beyond the guaranteed range (including the
    optional (p,p) diagnostics) are evaluated and reported but never asserted.
    """
    cond = NormalizationCondition.from_flag(cond)
    u_min, _ = geometry.u_extrema(case)
    if u_min < -1e-12:
        raise PositivityError(
            "sign-changing solution; the comparison is exactly what "
            "run_counterexample refutes for such data"
        )
    n = case.n
    cap1 = n / (2.0 * n - 2.0)
    cap2 = n / (3.0 * n - 4.0)
    curve_u, rtol = _u_curve(case, pipeline, resolution)
    vsol = geometry.solve_symmetrized(case, cond)
    curve_v = phi_curve(vsol)

    entries = []
    grid1 = np.asarray(p_grid, dtype=float) if p_grid is not None else default_p_grid(cap1)
    for p in grid1:
        entries.append(
            _entry("p,1", p, 1.0, curve_u, curve_v, rtol, p <= cap1 * (1.0 + 1e-12))
        )
    if cond is NormalizationCondition.TRACE_SQUARED:
        grid2 = (
            np.asarray([p for p in grid1 if p <= cap2 * (1.0 + 1e-12)])
            if p_grid is not None
            else default_p_grid(cap2)
        )
        for p in grid2:
            entries.append(
                _entry(
                    "2p,2", 2.0 * p, 2.0, curve_u, curve_v, rtol, p <= cap2 * (1.0 + 1e-12)
                )
            )
    for p in diagnostics:
        entries.append(_entry("p,p", p, p, curve_u, curve_v, rtol, False))

    report = ComparisonReport(
        case_id=case.case_id,
        parameters=_case_parameters(case),
        condition=_condition_name(cond),
        pipeline="analytic" if rtol == ANALYTIC_RTOL else "sampled",
        entries=entries,
        residuals=_base_residuals(case, vsol),
    )
    return report


def run_theorem_1_2(
    case,
    cond,
    p_grid: Optional[Sequence[float]] = None,
    pipeline: str = "analytic",
    resolution: int = 512,
    t_points: int = 4001,
) -> ComparisonReport:
    """Unit-load suite: pointwise comparison of the distribution functions in
    the plane, Lorentz families up to p = n/(n-2) in higher dimension."""
    cond = NormalizationCondition.from_flag(cond)
    if not case.is_ball_case or any(
        abs(comp.load - 1.0) > 1e-12 for comp in case.components
    ):
        raise DomainError("this suite requires unit load on every component")
    u_min, _ = geometry.u_extrema(case)
    if u_min < -1e-12:
        raise PositivityError("requires a positive solution")
    n = case.n
    curve_u, rtol = _u_curve(case, pipeline, resolution)
    vsol = geometry.solve_symmetrized(case, cond)
    curve_v = phi_curve(vsol)

    entries: List[NormEntry] = []
    pointwise = None
    if n == 2:
        probes = [np.linspace(0.0, vsol.v_max * (1.0 + 1e-9), t_points)]
        anchors = [vsol.v_m, vsol.v_max] + [
            seg.value(n, seg.r_hi) for seg in vsol.segments
        ]
        for comp in case.components:
            anchors.extend([comp.trace, comp.peak(n)])
        for t in anchors:
            probes.append(np.array([t, t * (1 + 1e-12) + 1e-15, max(t - 1e-12, 0.0)]))
        ts = np.unique(np.concatenate(probes))
        diff = np.array([curve_u(t) - curve_v(t) for t in ts])
        pointwise = {"max_mu_minus_phi": float(np.max(diff)), "tol": rtol * 1.0}
        pointwise["tol"] = 1e-9 if rtol == ANALYTIC_RTOL else rtol * curve_u.total_measure
    else:
        cap = n / (n - 2.0)
        grid = np.asarray(p_grid, dtype=float) if p_grid is not None else default_p_grid(cap)
        for p in grid:
            entries.append(
                _entry("p,1", p, 1.0, curve_u, curve_v, rtol, p <= cap * (1.0 + 1e-12))
            )
        if cond is NormalizationCondition.TRACE_SQUARED:
            for p in grid:
                entries.append(
                    _entry(
                        "2p,2", 2.0 * p, 2.0, curve_u, curve_v, rtol, p <= cap * (1.0 + 1e-12)
                    )
                )

    return ComparisonReport(
        case_id=case.case_id,
        parameters=_case_parameters(case),
        condition=_condition_name(cond),
        pipeline="analytic" if rtol == ANALYTIC_RTOL else "sampled",
        entries=entries,
        pointwise=pointwise,
        residuals=_base_residuals(case, vsol),
    )


def _case_parameters(case) -> dict:
    params = {"n": case.n}
    if case.eps is not None:
        params["eps"] = case.eps
    if case.a is not None:
        params["a"] = case.a
    return params


def _linear_fit(xs, ys) -> Tuple[float, float]:
    slope, intercept = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)
    return float(intercept), float(slope)


def run_counterexample(
    case,
    norm_spec: Optional[str] = None,
    eps_values: Sequence[float] = DEFAULT_EPS_SWEEP,
) -> ComparisonReport:
    """Reproduce a printed comparison violation.

    The pass criterion is inverted deliberately: the report passes when the
    violation occurs in the stated regime and the computed gap matches the
    printed leading-order expansion (1% tolerance, 2% for the four-digit
    reference values).
    """
    case_id = geometry.CaseId(case.case_id)
    if norm_spec is None:
        norm_spec = {
            geometry.CaseId.TWO_DISKS_L2: "l2",
            geometry.CaseId.TWO_BALLS_3D_L1: "l1",
            geometry.CaseId.TWO_DISKS_L6: "l6",
            geometry.CaseId.ZERO_MEAN_RECT: "l1-growth",
        }.get(case_id)
    if norm_spec is None:
        raise DomainError(f"no printed violation registered for case {case.case_id}")

    if norm_spec == "l1-growth":
        return _counterexample_growth(case)

    power, cond = {
        "l2": (2, NormalizationCondition.TRACE_INTEGRAL),
        "l1": (1, NormalizationCondition.TRACE_INTEGRAL),
        "l6": (6, NormalizationCondition.TRACE_SQUARED),
    }[norm_spec]

    gaps, u_norms, v_norms = [], [], []
    for eps in eps_values:
        swept = geometry.make_example(case_id, eps=eps, a=case.a or 4.0)
        u_pow = geometry.exact_lp_norm_u(swept, power)
        vsol = geometry.solve_symmetrized(swept, cond)
        v_pow = vsol.ball_integral_power(power)
        u_norms.append(u_pow)
        v_norms.append(v_pow)
        gaps.append(u_pow - v_pow)
    intercept, slope = _linear_fit(eps_values, gaps)

    expected = geometry.expected_constants(case)
    constants: List[ConstantCheck] = []
    notes = [f"gap = ||u||_{power}^{power} - ||v||_{power}^{power}, fitted over eps={list(eps_values)}"]
    if norm_spec == "l2":
        constants.append(
            ConstantCheck("l2_sq_gap_limit", expected["l2_sq_gap_limit"], intercept, FIT_RTOL)
        )
        constants.append(
            ConstantCheck("l2_sq_gap_slope", expected["l2_sq_gap_slope"], slope, FIT_RTOL)
        )
    elif norm_spec == "l1":
        cbrt4 = 4.0 ** (1.0 / 3.0)
        exact_slope = -2.0 * math.pi / 45.0 - 28.0 * cbrt4 * math.pi / 45.0
        exact_limit = 14.0 * math.pi / 9.0 - 8.0 * cbrt4 * math.pi / 9.0
        constants.append(ConstantCheck("l1_gap_limit", exact_limit, intercept, FIT_RTOL))
        constants.append(ConstantCheck("l1_gap_slope", exact_slope, slope, FIT_RTOL))
        for eps, gap in zip(eps_values, gaps):
            formula = exact_limit + exact_slope * eps
            constants.append(
                ConstantCheck(f"l1_gap(eps={eps:g})", formula, gap, ANALYTIC_RTOL)
            )
    elif norm_spec == "l6":
        constants.append(
            ConstantCheck("l6_gap_limit", expected["l6_gap_limit"], intercept, FIT_RTOL_APPROX)
        )
        constants.append(
            ConstantCheck("l6_gap_slope", expected["l6_gap_slope"], slope, FIT_RTOL_APPROX)
        )
        constants.append(
            ConstantCheck(
                "u_l6_6th_power", expected["u_l6_6th_power"], u_norms[-1], FIT_RTOL_APPROX
            )
        )
        for eps, v_pow in zip(eps_values, v_norms):
            constants.append(
                ConstantCheck(
                    f"v_l6_6th_power(eps={eps:g})",
                    expected["v_l6_6th_power_limit"] + expected["v_l6_6th_power_slope"] * eps,
                    v_pow,
                    FIT_RTOL_APPROX,
                )
            )

    violated = all(g > 0.0 for g in gaps)
    report = ComparisonReport(
        case_id=case.case_id,
        parameters=_case_parameters(case),
        condition=_condition_name(cond),
        pipeline="analytic",
        constants=constants,
        notes=notes,
    )
    report.residuals["min_gap_over_sweep"] = float(min(gaps))
    if not violated:
        report.notes.append("expected violation NOT observed")
        report.constants.append(ConstantCheck("violation_direction", 1.0, 0.0, 0.0))
    return report


def _counterexample_growth(case) -> ComparisonReport:
    """Unbounded-growth violation: ||u_a||_1 grows like a**2/12 while the
    symmetrized solution is independent of a."""
    a_ref = case.a or 4.0
    v_l1_values = []
    for a in (a_ref, 2.0 * a_ref, 4.0 * a_ref):
        swept = geometry.make_example(geometry.CaseId.ZERO_MEAN_RECT, a=a)
        vsol = geometry.solve_symmetrized(swept)
        v_l1_values.append(vsol.ball_integral_power(1))
    v_l1 = v_l1_values[0]
    spread = max(v_l1_values) - min(v_l1_values)

    def gap_of(a: float) -> float:
        swept = geometry.make_example(geometry.CaseId.ZERO_MEAN_RECT, a=a)
        return geometry.exact_lp_norm_u(swept, 1) - v_l1

    a0 = float(brentq(gap_of, 1e-3, 1e3, xtol=1e-12, rtol=1e-14))
    confirm = gap_of(2.0 * a0)

    expected = geometry.expected_constants(case)
    constants = [
        ConstantCheck("v_l1", expected["v_l1"], v_l1, ANALYTIC_RTOL),
        ConstantCheck("u_l1(a)", expected["u_l1"], geometry.exact_lp_norm_u(case, 1), ANALYTIC_RTOL),
        ConstantCheck(
            "c_star", expected["c_star"], geometry.case_c_star(case), ANALYTIC_RTOL
        ),
    ]
    report = ComparisonReport(
        case_id=case.case_id,
        parameters=_case_parameters(case),
        condition="zero-trace",
        pipeline="analytic",
        constants=constants,
        notes=[
            f"crossover a0 = {a0:.12g}; violation at 2*a0 confirmed "
            f"(gap {confirm:.6g} > 0)",
            "printed-variant datum "
            f"{expected['c_star_printed_variant']:.12g} differs from the "
            "compatibility value (rearrangement of the full |f| vs its "
            "positive part); both reported, the compatibility value is used",
        ],
    )
    report.residuals["v_l1_a_dependence"] = spread
    if confirm <= 0.0 or spread > 1e-9 * v_l1:
        report.constants.append(ConstantCheck("violation_confirmed", 1.0, 0.0, 0.0))
    return report


def check_level_set_inequality(case, t_grid: Optional[Sequence[float]] = None) -> float:
    """Most negative slack of the level-set isoperimetric inequality

        gamma_n mu(t)**((2n-2)/n)
            <= (-mu'(t) + sum_j |boundary_j portion| / |c_j|)
               * integral of f* up to mu(t)

    over the t-grid (ball cases; boundary portions weighted per component)."""
    if not case.is_ball_case:
        raise DomainError("level-set slack supported for ball cases only")
    n = case.n
    f_star = geometry.load_rearrangement(case)
    gam = gamma_n(n)
    _, u_max = geometry.u_extrema(case)
    if t_grid is None:
        t_grid = np.linspace(u_max * 1e-6, u_max * (1.0 - 1e-9), 200)
    anchors = set()
    for comp in case.components:
        anchors.add(comp.trace)
        anchors.add(comp.peak(n))
    worst = math.inf
    for t in np.asarray(t_grid, dtype=float):
        if any(abs(t - b) <= 1e-9 * max(1.0, abs(b)) for b in anchors):
            continue
        if t >= u_max:
            worst = min(worst, 0.0)
            continue
        data = geometry.level_set_data(case, t)
        weighted = sum(
            ext / abs(comp.c)
            for ext, comp in zip(data.external_by_component, case.components)
            if ext > 0.0
        )
        rhs = (-data.mu_prime + weighted) * partial_integral(f_star, data.mu)
        lhs = gam * data.mu ** ((2.0 * n - 2.0) / n)
        worst = min(worst, rhs - lhs)
    return worst


def random_variant_suite(
    count: int = 20, seed: int = 20240811, p_points: int = 4
) -> List[ComparisonReport]:
    """Randomized positive-trace configurations run under both normalizations."""
    rng = np.random.default_rng(seed)
    reports = []
    for i in range(count):
        case = geometry.random_positive_variant(rng, i)
        for cond in (
            NormalizationCondition.TRACE_INTEGRAL,
            NormalizationCondition.TRACE_SQUARED,
        ):
            n = case.n
            cap1 = n / (2.0 * n - 2.0)
            reports.append(
                run_theorem_1_1(case, cond, p_grid=default_p_grid(cap1, p_points))
            )
    return reports


def resolve_gamma_for_case(case=None):
    """Resolve the gamma_n normalization on a solved problem and return the
    resolution record (used by the self-test to log the choice)."""
    if case is None:
        case = geometry.make_example(geometry.CaseId.TWO_DISKS_L2, eps=1e-2)
    vsol = geometry.solve_symmetrized(case)
    return resolve_gamma_normalization(vsol)
