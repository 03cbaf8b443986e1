import math

import numpy as np
import pytest

from pspin_hessian.errors import MaxItersExceeded, NoConvergedRun
from pspin_hessian.hamiltonian import SpherePoint, sample_couplings
from pspin_hessian.mixture import MixtureSpec
from pspin_hessian.optimizer import (OptimizerConfig, minimize, multi_restart,
                                     restart_seed, restart_start)

P2 = MixtureSpec.pure(2)
P3 = MixtureSpec.pure(3)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(grad_tol=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)


def test_p2_matches_eigensolver():
    n = 400
    t = sample_couplings(P2, n, 21)
    best, _ = multi_restart(t, OptimizerConfig(restarts=5, seed=3))
    S = 0.5 * (t.tensors[2] + t.tensors[2].T)
    oracle = P2.coeffs[2] * np.linalg.eigvalsh(S)[0] / math.sqrt(n)
    assert best.converged
    assert abs(best.energy_density - oracle) <= 1e-6
    assert abs(best.energy_density + math.sqrt(2)) <= 0.05


def test_radial_density_at_critical_point():
    t = sample_couplings(P3, 40, 2)
    best, records = multi_restart(t, OptimizerConfig(restarts=8, seed=1))
    for r in records:
        if r.converged:
            assert abs(r.radial_density - 3 * r.energy_density) <= 1e-8


def test_fixed_point_restart():
    t = sample_couplings(P3, 30, 5)
    cfg = OptimizerConfig(restarts=1, seed=2)
    rec = minimize(t, cfg, restart_start(30, cfg, 0))
    again = minimize(t, cfg, rec.point)
    assert again.iterations <= 2
    assert again.energy_density == pytest.approx(rec.energy_density, abs=1e-10)


def test_single_restart_equals_minimize():
    t = sample_couplings(P3, 25, 8)
    cfg = OptimizerConfig(restarts=1, seed=44)
    best, records = multi_restart(t, cfg)
    direct = minimize(t, cfg, restart_start(25, cfg, 0))
    assert best.energy_density == direct.energy_density
    assert np.array_equal(best.point.coords, direct.point.coords)
    assert records[0].seed == restart_seed(cfg, 0)


def test_best_is_argmin():
    t = sample_couplings(P3, 30, 9)
    best, records = multi_restart(t, OptimizerConfig(restarts=12, seed=0))
    assert all(best.energy_density <= r.energy_density for r in records if r.converged)


def test_energy_trace_monotone():
    t = sample_couplings(P3, 30, 10)
    cfg = OptimizerConfig(restarts=1, seed=1, keep_trace=True)
    rec = minimize(t, cfg, restart_start(30, cfg, 0))
    trace = np.array(rec.trace)
    assert np.all(np.diff(trace) <= 1e-13 * np.maximum(1, np.abs(trace[:-1])))


def test_minimum_has_nonnegative_hessian():
    t = sample_couplings(P3, 40, 11)
    best, _ = multi_restart(t, OptimizerConfig(restarts=6, seed=2))
    assert best.normalized_hessian_eigs[0] > -1e-6
    assert best.grad_norm <= 1e-8 * math.sqrt(40)


def test_max_iters_reported():
    t = sample_couplings(P3, 30, 12)
    cfg = OptimizerConfig(restarts=1, max_iters=2, grad_tol=1e-14)
    start = restart_start(30, cfg, 0)
    with pytest.raises(MaxItersExceeded) as info:
        minimize(t, cfg, start, raise_on_failure=True)
    assert info.value.record is not None
    with pytest.raises(NoConvergedRun):
        multi_restart(t, cfg)


def test_restart_determinism():
    t = sample_couplings(P3, 30, 13)
    cfg = OptimizerConfig(restarts=4, seed=5)
    a = [r.energy_density for r in multi_restart(t, cfg)[1]]
    b = [r.energy_density for r in multi_restart(t, cfg)[1]]
    assert a == b
