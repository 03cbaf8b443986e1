"""Kac-Rice estimates. Oracle constants were computed once with mpmath or
nested scipy quadrature and are frozen below."""
import math

import numpy as np
import pytest
from scipy import stats

from pspin_hessian.analytic import f_xy, solve_mixed_ground_state, solve_pure_ground_state
from pspin_hessian.errors import DegenerateSigma, EmptyRegion
from pspin_hessian.kacrice import (GoeDeterminantSampler, Interval, analytic_sup_mixed,
                                   analytic_sup_pure, det_moment_mc, log_prefactor,
                                   log_prefactor_mixed, mean_crt, mean_crt_mixed,
                                   mean_crt_pure)
from pspin_hessian.mixture import MixtureSpec

MIX34 = MixtureSpec.from_squared({3: 0.5, 4: 0.5})


def test_interval():
    with pytest.raises(EmptyRegion):
        Interval(1.0, 1.0)
    assert Interval.parse("-inf,-1.6") == Interval(-math.inf, -1.6)
    assert Interval(-2, -1).scaled(3) == Interval(-6, -3)
    with pytest.raises(EmptyRegion):
        Interval(0, 1).intersect(Interval(2, 3))


def test_pure_prefactor_stirling():
    # oracle: mpmath transcription of the prefactor at n = 2000
    val = log_prefactor(3, 2000) / 2000
    assert val == pytest.approx(0.8472150613276757779190653, rel=1e-12)
    assert abs(val - (0.5 * math.log(2) + 0.5)) <= 0.02
    assert math.isfinite(log_prefactor(7, 3))


def test_mixed_prefactor_bigfloat():
    # oracle: mpmath (40 digits) transcription at n = 50
    assert log_prefactor_mixed(MIX34, 50) == pytest.approx(48.79886513882954991500971, rel=1e-8)
    with pytest.raises(DegenerateSigma):
        log_prefactor_mixed(MixtureSpec.pure(3), 50)


def _within(est, oracle, se, k=3.0):
    return abs(est - oracle) <= k * se


def test_det_moment_n1_folded_normal():
    # E|g - t|, g ~ N(0, 2): closed form of the folded normal mean
    est = det_moment_mc(1, 0.7, 20_000, seed=3)
    assert _within(est.first_moment, 1.263851149638226923269248, est.std_error_first)


def test_det_moment_n2_quadrature():
    # oracle: 2-D quadrature over the diagonal entries with the off-diagonal
    # expectation E|u - b^2| done in closed form
    est = det_moment_mc(2, 0.5, 20_000, seed=4)
    assert _within(est.first_moment, 0.9980390885302958, est.std_error_first)


def test_det_moment_large_shift():
    est = det_moment_mc(10, 10.0, 2000, seed=5)
    assert est.first_moment == pytest.approx(10.0**10, rel=0.1)
    assert est.second_moment >= est.first_moment**2 * (1 - 0.05)


def test_det_moment_needs_samples():
    with pytest.raises(ValueError):
        det_moment_mc(3, 0.0, 10, seed=0)


def test_pure_gaussian_weight_only():
    p, n = 3, 30
    B = Interval(-1.8, -1.5)
    est = mean_crt_pure(p, n, B, det_override=1.0)
    # region in y is p * B; the weight exp(-n y^2 / (2 p^2)) is a N(0, p^2 / n) shape
    sd = p / math.sqrt(n)
    mass = stats.norm.cdf(-4.5, scale=sd) - stats.norm.cdf(-5.4, scale=sd)
    expect = log_prefactor(p, n) + math.log(mass * math.sqrt(2 * math.pi) * sd)
    assert est.log_mean_count == pytest.approx(expect, abs=1e-8)


def test_mixed_gaussian_weight_only():
    n = 25
    B, D = Interval(-1.9, -1.6), Interval(-7.0, -5.0)
    est = mean_crt_mixed(MIX34, n, B, D, det_override=1.0)
    cov = np.array([[1.0, 3.5], [3.5, 12.5]]) / n
    mvn = stats.multivariate_normal(mean=[0, 0], cov=cov)
    prob = (mvn.cdf([-1.6, -5.0]) - mvn.cdf([-1.9, -5.0])
            - mvn.cdf([-1.6, -7.0]) + mvn.cdf([-1.9, -7.0]))
    expect = log_prefactor(MIX34, n) + math.log(prob * 2 * math.pi * math.sqrt(np.linalg.det(cov)))
    assert est.log_mean_count == pytest.approx(expect, abs=1e-5)


def test_pure_window_monotone():
    sampler = GoeDeterminantSampler(29, 1000, 7)
    small = mean_crt_pure(3, 30, Interval(-1.7, -1.6), sampler=sampler)
    big = mean_crt_pure(3, 30, Interval(-1.8, -1.5), sampler=sampler)
    assert small.log_mean_count <= big.log_mean_count


def test_pure_convergence_n60():
    B = Interval(-math.inf, -1.6)
    sup = analytic_sup_pure(3, B)
    est = mean_crt_pure(3, 60, B, seed=1)
    assert abs(est.normalized - sup) <= 0.1


def test_pure_shrunk_window_near_zero():
    e0 = solve_pure_ground_state(3).e0
    est = mean_crt_pure(3, 60, Interval(-e0 - 0.01, -e0 + 0.01), seed=2)
    assert abs(est.normalized) <= 0.05


def test_mixed_box_n50():
    pred = solve_mixed_ground_state(MIX34)
    B = Interval(-pred.e0 - 0.05, -pred.e0 + 0.05)
    D = Interval(-pred.y0 - 0.5, -pred.y0 + 0.5)
    sup = analytic_sup_mixed(MIX34, B, D)
    X, Y = np.meshgrid(np.linspace(B.lo, B.hi, 101), np.linspace(D.lo, D.hi, 101))
    assert sup >= f_xy(MIX34, X, Y).max() - 1e-12
    est = mean_crt(MIX34, 50, B, D, seed=3)
    assert abs(est.normalized - sup) <= 0.15


def test_mixed_far_box_negative():
    B = Interval(-3.0, -2.5)
    est = mean_crt(MIX34, 40, B, seed=4)
    sup = analytic_sup_mixed(MIX34, B)
    assert sup < -1.0
    assert est.normalized < -1.0
