"""Rearrangement and distribution-function tests, including the randomized
invariant suites."""

import math

import numpy as np
import pytest

from talenti_neumann import geometry
from talenti_neumann.errors import DomainError
from talenti_neumann.measure import (
    DistributionCurve,
    SampledFunction,
    StepRearrangement,
    decreasing_rearrangement,
    distribution,
    hardy_littlewood_pairing,
    partial_integral,
    step_sup_distance,
)


def test_distribution_constant():
    curve = distribution(SampledFunction.from_cells([(1.0, 0.7)]))
    assert curve(0.0) == 0.7
    assert curve(0.999) == 0.7
    assert curve(1.0) == 0.0
    assert curve(5.0) == 0.0


def test_distribution_three_cells():
    f = SampledFunction.from_cells([(3.0, 0.5), (-1.0, 0.25), (2.0, 0.25)])
    curve = distribution(f)
    assert np.allclose(curve.breakpoints, [1.0, 2.0, 3.0])
    for t, expected in [(0.0, 1.0), (0.5, 1.0), (1.0, 0.75), (1.5, 0.75),
                        (2.0, 0.5), (2.9, 0.5), (3.0, 0.0)]:
        assert curve(t) == pytest.approx(expected, abs=0.0)


def test_distribution_dense_sampling_matches_analytic():
    # u = (5 - r^2)/4 on the unit disk, sampled on 1e6 equal-measure shells
    cells = 1_000_000
    s_mid = (np.arange(cells) + 0.5) / cells * math.pi
    r2 = s_mid / math.pi
    u = SampledFunction((5.0 - r2) / 4.0, np.full(cells, math.pi / cells))
    curve = distribution(u)
    for t in np.linspace(1.001, 1.249, 25):
        exact = math.pi * (5.0 - 4.0 * t)
        assert abs(curve(t) - exact) <= 1e-3 * exact


def test_rearrangement_sorts_and_preserves_distribution():
    f = SampledFunction.from_cells([(3.0, 0.5), (1.0, 0.25), (2.0, 0.25)])
    r = decreasing_rearrangement(f)
    assert np.allclose(r.values, [3.0, 2.0, 1.0])
    assert np.allclose(r.widths, [0.5, 0.25, 0.25])
    assert r(0.0) == 3.0 and r(0.5) == 2.0 and r(0.75) == 1.0
    cf, cr = distribution(f), distribution(r)
    assert np.array_equal(cf.breakpoints, cr.breakpoints)
    assert np.array_equal(cf.plateau_measures, cr.plateau_measures)


def test_rearrangement_of_example_load():
    eps = 1e-3
    case = geometry.make_example(1, eps=eps)
    _, f_sample = geometry.sample_domain(case, 64)
    r = decreasing_rearrangement(f_sample)
    assert np.allclose(r.values, [1.0, eps])
    assert np.allclose(r.widths, [math.pi, math.pi], rtol=1e-10)


def test_rearrangement_idempotent_on_sorted():
    f = SampledFunction.from_cells([(5.0, 1.0), (4.0, 2.0), (0.5, 0.25)])
    r = decreasing_rearrangement(f)
    assert np.array_equal(r.values, [5.0, 4.0, 0.5])
    assert np.array_equal(r.widths, [1.0, 2.0, 0.25])


def test_partial_integral_two_plateaus():
    eps = 0.25
    r = StepRearrangement([1.0, eps], [math.pi, math.pi], 2.0 * math.pi)
    assert partial_integral(r, 0.0) == 0.0
    assert partial_integral(r, math.pi) == pytest.approx(math.pi, rel=1e-15)
    assert partial_integral(r, 2.0 * math.pi) == pytest.approx(math.pi * (1 + eps), rel=1e-15)
    # piecewise linear in between
    assert partial_integral(r, 1.5 * math.pi) == pytest.approx(
        math.pi + eps * 0.5 * math.pi, rel=1e-15
    )
    with pytest.raises(DomainError):
        partial_integral(r, 3.0 * math.pi)


def test_hardy_littlewood_self_pairing_is_equality():
    rng = np.random.default_rng(0)
    h = SampledFunction(rng.normal(size=50), rng.uniform(0.1, 1.0, size=50))
    lhs, rhs = hardy_littlewood_pairing(h, h)
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_hardy_littlewood_anti_aligned():
    h = SampledFunction.from_cells([(1.0, 0.5), (0.0, 0.5)])
    g = SampledFunction.from_cells([(0.0, 0.5), (1.0, 0.5)])
    lhs, rhs = hardy_littlewood_pairing(h, g)
    assert lhs == 0.0
    assert rhs == pytest.approx(0.5, rel=1e-15)


def test_hardy_littlewood_against_brute_force():
    rng = np.random.default_rng(11)
    h = SampledFunction(rng.normal(size=100), rng.uniform(0.01, 1.0, size=100))
    g = SampledFunction(rng.normal(size=100), h.measures)
    lhs, rhs = hardy_littlewood_pairing(h, g)
    assert lhs == pytest.approx(float(np.sum(h.values * g.values * h.measures)), rel=1e-14)
    # independent Riemann evaluation of the rearranged pairing
    hs, gs = decreasing_rearrangement(h), decreasing_rearrangement(g)
    ss = (np.arange(200_000) + 0.5) / 200_000 * h.total_measure
    oracle = float(np.mean(hs(ss) * gs(ss)) * h.total_measure)
    assert rhs == pytest.approx(oracle, rel=2e-3)
    assert lhs <= rhs + 1e-12 * abs(rhs)


def test_hardy_littlewood_mismatched_cells_rejected():
    h = SampledFunction.from_cells([(1.0, 0.5), (2.0, 0.5)])
    g = SampledFunction.from_cells([(1.0, 0.4), (2.0, 0.6)])
    with pytest.raises(DomainError):
        hardy_littlewood_pairing(h, g)


def test_hardy_littlewood_thousand_random_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        k = int(rng.integers(1, 30))
        measures = rng.uniform(0.01, 1.0, size=k)
        h = SampledFunction(rng.normal(scale=3.0, size=k), measures)
        g = SampledFunction(rng.normal(scale=3.0, size=k), measures)
        lhs, rhs = hardy_littlewood_pairing(h, g)
        assert lhs <= rhs + 1e-12 * abs(rhs) + 1e-15


def test_hardy_littlewood_equality_for_monotone_pairs():
    rng = np.random.default_rng(5)
    for _ in range(50):
        k = int(rng.integers(2, 20))
        measures = rng.uniform(0.01, 1.0, size=k)
        base = np.abs(rng.normal(size=k))
        h = SampledFunction(base, measures)
        g = SampledFunction(base**2 + 0.5 * base, measures)  # monotone in h
        lhs, rhs = hardy_littlewood_pairing(h, g)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_equimeasurability_thousand_random_instances():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        k = int(rng.integers(1, 25))
        f = SampledFunction(rng.normal(size=k), rng.uniform(0.001, 2.0, size=k))
        r = decreasing_rearrangement(f)
        cf, cr = distribution(f), distribution(r)
        assert np.array_equal(cf.breakpoints, cr.breakpoints)
        assert np.array_equal(cf.plateau_measures, cr.plateau_measures)
        for p in (1.0, 2.0, 6.0):
            direct = f.integral_abs_power(p)
            via = float(np.sum(r.values**p * r.widths))
            assert abs(direct - via) <= 1e-12 * max(direct, via, 1e-300)


def test_layer_cake_exact_for_step_data():
    rng = np.random.default_rng(17)
    for _ in range(100):
        k = int(rng.integers(1, 30))
        f = SampledFunction(rng.normal(size=k), rng.uniform(0.01, 1.0, size=k))
        direct = f.integral_abs_power(1.0)
        via_curve = distribution(f).integral()
        assert via_curve == pytest.approx(direct, rel=1e-13)


def test_distribution_monotone_on_dense_grid():
    rng = np.random.default_rng(30)
    f = SampledFunction(rng.normal(size=40), rng.uniform(0.01, 1.0, size=40))
    curve = distribution(f)
    ts = np.linspace(0.0, float(curve.breakpoints[-1]) * 1.1, 10_000)
    vals = curve(ts)
    assert np.all(np.diff(vals) <= 0.0)


def test_merging_of_floating_point_noise():
    base = 1.0
    f = SampledFunction.from_cells([(base, 0.5), (base * (1 + 5e-15), 0.5)])
    curve = distribution(f)
    assert len(curve.breakpoints) == 1


def test_invalid_inputs_rejected():
    with pytest.raises(DomainError):
        SampledFunction(np.array([]), np.array([]))
    with pytest.raises(DomainError):
        SampledFunction([1.0], [-0.5])
    with pytest.raises(DomainError):
        SampledFunction([1.0], [0.5], total_measure=2.0)
    with pytest.raises(DomainError):
        StepRearrangement([1.0, 2.0], [0.5, 0.5], 1.0)  # increasing values
    with pytest.raises(DomainError):
        DistributionCurve([1.0, 0.5], [0.5, 0.0], 1.0)  # unordered breakpoints


def test_step_sup_distance():
    c1 = distribution(SampledFunction.from_cells([(1.0, 1.0)]))
    c2 = distribution(SampledFunction.from_cells([(1.0, 0.75), (0.5, 0.25)]))
    assert step_sup_distance(c1, c2) == pytest.approx(0.25)
    assert step_sup_distance(c1, c1) == 0.0
