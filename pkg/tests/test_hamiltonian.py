import math

import numpy as np
import pytest

from pspin_hessian.errors import DimensionMismatch, MemoryCapExceeded
from pspin_hessian.hamiltonian import (CouplingTensor, SpherePoint, big_sphere_H,
                                       derivatives, h_eval, radial_components,
                                       sample_couplings, tangent_basis, value_and_grad_batch)
from pspin_hessian.mixture import MixtureSpec, derive_moments, xi_eval

P3 = MixtureSpec.pure(3)
MIX34 = MixtureSpec.from_squared({3: 0.5, 4: 0.5})


def _point(n, seed):
    return SpherePoint.random(n, np.random.default_rng(seed))


def test_sampling_is_deterministic():
    a = sample_couplings(P3, 64, 7)
    b = sample_couplings(P3, 64, 7)
    assert np.array_equal(a.tensors[3], b.tensors[3])
    c = sample_couplings(P3, 64, 8)
    assert not np.array_equal(a.tensors[3], c.tensors[3])


def test_entry_mean():
    t = sample_couplings(P3, 100, 1)  # 10^6 entries
    assert abs(t.tensors[3].mean()) <= 0.005
    assert t.tensors[3].std() == pytest.approx(1.0, abs=0.005)


def test_memory_cap():
    with pytest.raises(MemoryCapExceeded):
        sample_couplings(P3, 2000, 0)


def test_sphere_point_validation():
    with pytest.raises(ValueError):
        SpherePoint(np.array([1.0, 1.0]))
    t = sample_couplings(P3, 5, 0)
    with pytest.raises(DimensionMismatch):
        h_eval(t, _point(6, 0))


def test_diagonal_quadratic_coupling():
    n = 9
    spec = MixtureSpec.pure(2)
    J = np.eye(n)
    t = CouplingTensor(spec=spec, n=n, seed=0, tensors={2: J})
    u = _point(n, 4)
    # h = gamma_2 <J, u (x) u> = gamma_2 |u|^2
    assert h_eval(t, u) == pytest.approx(spec.coeffs[2], abs=1e-14)


@pytest.mark.parametrize("spec", [P3, MIX34])
def test_two_step_definition_agrees(spec):
    n = 12
    t = sample_couplings(spec, n, 3)
    for k in range(5):
        u = _point(n, k)
        big = big_sphere_H(t, math.sqrt(n) * u.coords) / math.sqrt(n)
        assert h_eval(t, u) == pytest.approx(big, rel=1e-10, abs=1e-12)


def test_covariance_over_disorder():
    n, draws = 64, 2000
    u = _point(n, 11).coords
    v = np.random.default_rng(12).standard_normal(n)
    v -= (v @ u) * u
    v /= np.linalg.norm(v)
    w = 0.3 * u + math.sqrt(1 - 0.09) * v
    U = np.stack([u, w])
    vals = np.array([value_and_grad_batch(sample_couplings(P3, n, 1000 + i), U)[0]
                     for i in range(draws)])
    assert abs(np.mean(vals[:, 0] * vals[:, 1]) - xi_eval(P3, 0.3)) <= 0.1
    assert np.mean(vals[:, 0] ** 2) == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("p", [3, 4])
def test_radial_identity(p):
    spec = MixtureSpec.pure(p)
    t = sample_couplings(spec, 10, p)
    for k in range(100):
        s = _point(10, k)
        b = derivatives(t, s)
        assert abs(b.radial - p * b.value) <= 1e-10 * (1 + abs(b.value))


def test_radial_components_mixed():
    t = sample_couplings(MIX34, 10, 2)
    s = _point(10, 1)
    b = derivatives(t, s)
    assert sum(radial_components(t, s).values()) == pytest.approx(b.radial, rel=1e-12)


def _geodesic(u, d, s):
    return math.cos(s) * u + math.sin(s) * d


def test_tangent_gradient_fd():
    n = 15
    t = sample_couplings(MIX34, n, 9)
    s = _point(n, 2)
    b = derivatives(t, s)
    rng = np.random.default_rng(0)
    h = 1e-5
    for _ in range(5):
        d = rng.standard_normal(n)
        d -= (d @ s.coords) * s.coords
        d /= np.linalg.norm(d)
        plus = h_eval(t, SpherePoint.from_vector(_geodesic(s.coords, d, h)))
        minus = h_eval(t, SpherePoint.from_vector(_geodesic(s.coords, d, -h)))
        assert (plus - minus) / (2 * h) == pytest.approx(b.tangent_grad @ d, abs=1e-5)


def test_tangent_hessian_fd():
    n = 8
    t = sample_couplings(P3, n, 4)
    s = _point(n, 3)
    b = derivatives(t, s)
    h = 1e-4
    for i in range(n - 1):
        d = b.basis[:, i]
        vals = [h_eval(t, SpherePoint.from_vector(_geodesic(s.coords, d, k * h)))
                for k in (-1, 0, 1)]
        second = (vals[0] - 2 * vals[1] + vals[2]) / h**2
        assert second == pytest.approx(b.tangent_hessian[i, i], abs=1e-5)


def test_basis_coordinate_case():
    n = 6
    e1 = np.zeros(n)
    e1[0] = 1.0
    Q = tangent_basis(SpherePoint(e1))
    assert np.allclose(np.abs(Q[0]), 0.0)
    assert np.allclose(Q.T @ Q, np.eye(n - 1), atol=1e-12)


def test_basis_orthonormal_random():
    s = _point(30, 5)
    Q = tangent_basis(s)
    assert np.max(np.abs(Q.T @ Q - np.eye(29))) <= 1e-12
    assert np.max(np.abs(Q.T @ s.coords)) <= 1e-12


def test_hessian_basis_invariance():
    n = 12
    t = sample_couplings(MIX34, n, 6)
    s = _point(n, 6)
    b1 = derivatives(t, s)
    O, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((n - 1, n - 1)))
    b2 = derivatives(t, s, basis=b1.basis @ O)
    assert np.allclose(np.linalg.eigvalsh(b1.tangent_hessian),
                       np.linalg.eigvalsh(b2.tangent_hessian), atol=1e-8)


def test_hessian_entry_variances_goe_scaling():
    # (hess + radial I) / sqrt((N-1) xi'') should be a GOE of size N-1:
    # entries of hess + radial I have variance xi'' (1 + delta_ij)
    n, draws = 10, 500
    s = _point(n, 0)
    Q = tangent_basis(s)
    xipp = derive_moments(MIX34).xipp
    mats = []
    for i in range(draws):
        b = derivatives(sample_couplings(MIX34, n, 5000 + i), s, basis=Q)
        mats.append(b.tangent_hessian + b.radial * np.eye(n - 1))
    var = np.var(np.array(mats), axis=0)
    diag = np.mean(np.diag(var))
    off = np.mean(var[~np.eye(n - 1, dtype=bool)])
    assert diag == pytest.approx(2 * xipp, rel=0.15)
    assert off == pytest.approx(xipp, rel=0.15)


def test_dump_load_roundtrip(tmp_path):
    t = sample_couplings(MIX34, 7, 123)
    path = tmp_path / "t.bin"
    t.dump(path)
    raw = path.read_bytes()
    assert raw[:4] == b"PSPN"
    back = CouplingTensor.load(path)
    assert back.n == 7 and back.seed == 123
    for p in (3, 4):
        assert np.array_equal(back.tensors[p], t.tensors[p])
    s = _point(7, 0)
    assert h_eval(back, s) == pytest.approx(h_eval(t, s), rel=1e-14)
    assert len(raw) == 4 + 20 + 2 * 12 + 8 * (7**3 + 7**4)


def test_hessian_spread_is_order_sqrt_n():
    n = 200
    s = _point(n, 1)
    Q = tangent_basis(s)
    ratios = []
    for i in range(10):
        t = sample_couplings(P3, n, 7000 + i)
        b = derivatives(t, s, basis=Q)
        eigs = np.linalg.eigvalsh(b.tangent_hessian + b.radial * np.eye(n - 1))
        ratios.append(np.max(np.abs(eigs)) / math.sqrt((n - 1) * 6.0))
    assert 1.8 <= np.mean(ratios) <= 2.3
