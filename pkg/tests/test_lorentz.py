"""Lorentz norm tests: printed values, layer-cake consistency, monotonicity
and scaling."""

import math

import numpy as np
import pytest

from talenti_neumann import geometry
from talenti_neumann.errors import DomainError
from talenti_neumann.lorentz import LorentzIndex, lorentz_norm, lp_norm
from talenti_neumann.measure import DistributionCurve, SampledFunction, distribution


def test_constant_function_pq_equal():
    for m in (0.5, 1.0, 3.0):
        curve = distribution(SampledFunction.from_cells([(1.0, m)]))
        for p in (0.5, 1.0, 2.0, 6.0):
            assert lorentz_norm(curve, LorentzIndex(p, p)) == pytest.approx(
                m ** (1.0 / p), rel=1e-14
            )


def test_example_two_balls_l1():
    eps = 1e-3
    case = geometry.make_example(2, eps=eps)
    expected = 64.0 * math.pi / 45.0 + 4.0 * math.pi * eps / 45.0
    analytic = lorentz_norm(geometry.mu_curve(case), LorentzIndex(1.0, 1.0))
    assert analytic == pytest.approx(expected, rel=1e-9)
    u_sample, _ = geometry.sample_domain(case, 256)
    sampled = lorentz_norm(distribution(u_sample), LorentzIndex(1.0, 1.0))
    assert sampled == pytest.approx(expected, rel=1e-3)


def test_weak_branch_sup_at_plateau_endpoints():
    curve = DistributionCurve([1.0, 2.0], [0.5, 0.0], 1.0)
    assert lorentz_norm(curve, LorentzIndex(1.0, math.inf)) == pytest.approx(1.0)
    # doubling the level with p=2 quadruples the candidate 2^2 * 0.5 = 2 > 1
    assert lorentz_norm(curve, LorentzIndex(2.0, math.inf)) == pytest.approx(2.0)


def test_example_one_l2_limit():
    eps = 1e-6
    case = geometry.make_example(1, eps=eps)
    norm = lp_norm(geometry.mu_curve(case), 2.0)
    exact = math.sqrt(61.0 * math.pi / 48.0 + eps**2 * math.pi / 48.0)
    assert norm == pytest.approx(exact, rel=1e-9)
    assert norm**2 == pytest.approx(61.0 * math.pi / 48.0, rel=1e-6)


def test_zero_function_norm_is_zero():
    curve = distribution(SampledFunction.from_cells([(0.0, 1.0)]))
    assert lp_norm(curve, 2.0) == 0.0
    assert lorentz_norm(curve, LorentzIndex(1.0, math.inf)) == 0.0


def test_example_three_l6():
    case = geometry.make_example(3, eps=1e-5)
    sixth = lp_norm(geometry.mu_curve(case), 6.0) ** 6
    assert sixth == pytest.approx(6.765, rel=2e-2)
    assert sixth == pytest.approx(geometry.exact_lp_norm_u(case, 6), rel=1e-9)


def test_pp_norm_matches_direct_sum():
    rng = np.random.default_rng(8)
    for _ in range(100):
        k = int(rng.integers(1, 25))
        f = SampledFunction(rng.normal(size=k), rng.uniform(0.01, 1.0, size=k))
        curve = distribution(f)
        for p in (0.75, 1.0, 2.0, 3.5):
            direct = f.integral_abs_power(p)
            via = lp_norm(curve, p) ** p
            assert abs(direct - via) <= 1e-12 * max(direct, via, 1e-300)


def test_monotonicity_on_ordered_curves():
    rng = np.random.default_rng(21)
    for _ in range(50):
        k = int(rng.integers(1, 20))
        measures = rng.uniform(0.01, 1.0, size=k)
        small = np.abs(rng.normal(size=k))
        big = small + rng.uniform(0.0, 2.0, size=k)
        c_small = distribution(SampledFunction(small, measures))
        c_big = distribution(SampledFunction(big, measures))
        for idx in (LorentzIndex(0.5, 1.0), LorentzIndex(1.0, 2.0),
                    LorentzIndex(2.0, 0.5), LorentzIndex(1.5, math.inf)):
            assert lorentz_norm(c_small, idx) <= lorentz_norm(c_big, idx) * (1 + 1e-12)


def test_scaling_homogeneity_degrees():
    rng = np.random.default_rng(55)
    f = SampledFunction(rng.uniform(0.1, 4.0, size=30), rng.uniform(0.01, 1.0, size=30))
    curve = distribution(f)
    for lam in (0.25, 2.0, 7.5):
        scaled = distribution(f.scaled(lam))
        idx = LorentzIndex(1.5, 2.5)
        assert lorentz_norm(scaled, idx) == pytest.approx(
            lam * lorentz_norm(curve, idx), rel=1e-12
        )
        # the weak branch is implemented as printed: homogeneous of degree p
        p = 2.0
        assert lorentz_norm(scaled, LorentzIndex(p, math.inf)) == pytest.approx(
            lam**p * lorentz_norm(curve, LorentzIndex(p, math.inf)), rel=1e-12
        )


def test_invalid_indices_rejected():
    curve = distribution(SampledFunction.from_cells([(1.0, 1.0)]))
    with pytest.raises(DomainError):
        lorentz_norm(curve, LorentzIndex(-1.0, 1.0))
    with pytest.raises(DomainError):
        lorentz_norm(curve, LorentzIndex(1.0, 0.0))
    with pytest.raises(DomainError):
        LorentzIndex(math.inf, 1.0)
