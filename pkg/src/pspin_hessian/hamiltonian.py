"""Disorder sampling and derivatives of the p-spin field on the unit sphere.

Convention: points live on the unit sphere and the field is

    h(u) = H_N(sqrt(N) u) / sqrt(N) = sum_p gamma_p <J^(p), u^{(x)p}>,

so ``E[h(u) h(v)] = xi(u . v)`` and ``min_u h(u) / sqrt(N)`` is the ground
state energy density.
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, MemoryCapExceeded
from .mixture import MixtureSpec

DEFAULT_ENTRY_CAP = 2**27
UNIT_TOL = 1e-12

_MAGIC = b"PSPN"
_VERSION = 1


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1:
            raise DimensionMismatch("sphere point must be a vector")
        if abs(c @ c - 1.0) > UNIT_TOL:
            raise ValueError(f"|coords|^2 = {c @ c!r} is not 1")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "SpherePoint":
        return cls.from_vector(rng.standard_normal(n))

    @property
    def n(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True, eq=False)
class CouplingTensor:
    """Dense i.i.d. N(0,1) couplings, one unsymmetrized array of shape N^p per degree."""

    spec: MixtureSpec
    n: int
    seed: int
    tensors: Mapping[int, np.ndarray]
    _sym: dict = field(default_factory=dict, repr=False)

    def symmetric(self, p: int) -> np.ndarray:
        """Symmetrized copy of J^(p); cached. Derivatives are taken from it."""
        if p not in self._sym:
            J = self.tensors[p]
            perms = list(itertools.permutations(range(p)))
            S = np.array(J, copy=True)
            for perm in perms[1:]:
                S += J.transpose(perm)
            S /= len(perms)
            S.setflags(write=False)
            self._sym[p] = S
        return self._sym[p]

    def drop_cache(self):
        self._sym.clear()

    # -- binary dump / load ---------------------------------------------------

    def dump(self, path):
        """Little-endian layout: magic, version, N, degree count, seed, then a
        (degree, gamma_p) table, then each tensor's entries in row-major order."""
        degrees = sorted(self.tensors)
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<IIIQ", _VERSION, self.n, len(degrees), self.seed))
            for p in degrees:
                fh.write(struct.pack("<Id", p, self.spec.coeffs[p]))
            for p in degrees:
                fh.write(np.ascontiguousarray(self.tensors[p], dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "CouplingTensor":
        with open(path, "rb") as fh:
            if fh.read(4) != _MAGIC:
                raise ValueError(f"{path}: not a coupling dump")
            version, n, ndeg, seed = struct.unpack("<IIIQ", fh.read(20))
            if version != _VERSION:
                raise ValueError(f"{path}: unsupported version {version}")
            table = [struct.unpack("<Id", fh.read(12)) for _ in range(ndeg)]
            tensors = {}
            for p, _ in table:
                count = n**p
                arr = np.frombuffer(fh.read(8 * count), dtype="<f8")
                if arr.size != count:
                    raise ValueError(f"{path}: truncated data for degree {p}")
                arr = arr.astype(float).reshape((n,) * p)
                arr.setflags(write=False)
                tensors[p] = arr
        spec = MixtureSpec({p: g for p, g in table}, normalized=False)
        return cls(spec=spec, n=n, seed=seed, tensors=tensors)


@dataclass
class DerivativeBundle:
    value: float
    euclidean_grad: np.ndarray
    radial: float
    tangent_grad: np.ndarray
    tangent_hessian: np.ndarray
    basis: np.ndarray


def degree_seed(seed: int, p: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed) & (2**64 - 1), p])


def sample_couplings(spec: MixtureSpec, n: int, seed: int,
                     entry_cap: int = DEFAULT_ENTRY_CAP) -> CouplingTensor:
    if n < 2:
        raise ValueError("n must be >= 2")
    for p in spec.degrees:
        if n**p > entry_cap:
            raise MemoryCapExceeded(p, n**p, entry_cap)
    tensors = {}
    for p in spec.degrees:
        rng = np.random.default_rng(degree_seed(seed, p))
        arr = rng.standard_normal(n**p).reshape((n,) * p)
        arr.setflags(write=False)
        tensors[p] = arr
    return CouplingTensor(spec=spec, n=n, seed=int(seed), tensors=tensors)


def _check_dim(t: CouplingTensor, v: np.ndarray):
    if v.shape[-1] != t.n:
        raise DimensionMismatch(f"point has dimension {v.shape[-1]}, couplings have {t.n}")


def _full_contract(J: np.ndarray, u: np.ndarray) -> float:
    x = J.reshape(-1, u.shape[0]) @ u
    while x.size > 1:
        x = x.reshape(-1, u.shape[0]) @ u
    return float(x[0])


def big_sphere_H(t: CouplingTensor, x) -> float:
    """H_N at a point of the radius-sqrt(N) sphere, straight from the model sum."""
    x = np.asarray(x, dtype=float)
    _check_dim(t, x)
    n = t.n
    return sum(g * n ** (-(p - 1) / 2.0) * _full_contract(t.tensors[p], x)
               for p, g in t.spec.coeffs.items())


def h_components(t: CouplingTensor, s: SpherePoint) -> dict[int, float]:
    """Per-degree contributions gamma_p <J^(p), u^p> to h."""
    u = s.coords
    _check_dim(t, u)
    return {p: g * _full_contract(t.tensors[p], u) for p, g in t.spec.coeffs.items()}


def h_eval(t: CouplingTensor, s: SpherePoint) -> float:
    return sum(h_components(t, s).values())


def contract_batch(S: np.ndarray, U: np.ndarray, times: int) -> np.ndarray:
    """Contract ``times`` slots of the symmetric tensor S with each row of U.

    Returns an array of shape (K,) + (N,) * (p - times).
    """
    p, n = S.ndim, S.shape[0]
    k = U.shape[0]
    if times == 0:
        return np.broadcast_to(S, (k,) + S.shape)
    X = U @ S.reshape(n, -1)
    for _ in range(times - 1):
        X = np.matmul(X.reshape(k, -1, n), U[:, :, None])[..., 0]
    return X.reshape((k,) + (n,) * (p - times))


def value_and_grad_batch(t: CouplingTensor, U: np.ndarray):
    """h and its Euclidean gradient at each row of U (rows need not be unit)."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    _check_dim(t, U)
    vals = np.zeros(U.shape[0])
    grads = np.zeros_like(U)
    for p, g in t.spec.coeffs.items():
        T = contract_batch(t.symmetric(p), U, p - 1)
        grads += (g * p) * T
        vals += g * np.einsum("kn,kn->k", T, U)
    return vals, grads


def value_batch(t: CouplingTensor, U: np.ndarray):
    return value_and_grad_batch(t, U)[0]


def euclidean_hessian(t: CouplingTensor, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    _check_dim(t, u)
    A = np.zeros((t.n, t.n))
    for p, g in t.spec.coeffs.items():
        A += (g * p * (p - 1)) * contract_batch(t.symmetric(p), u[None, :], p - 2)[0]
    return A


def tangent_basis(s: SpherePoint) -> np.ndarray:
    """Orthonormal basis of the tangent space at s, as the columns of an N x (N-1)
    matrix: the last N-1 columns of the Householder reflector sending s to -/+e1."""
    u = s.coords
    v = u.copy()
    v[0] += 1.0 if u[0] >= 0 else -1.0
    H = np.eye(u.shape[0]) - 2.0 * np.outer(v, v) / (v @ v)
    return H[:, 1:]


def derivatives(t: CouplingTensor, s: SpherePoint, basis: np.ndarray | None = None
                ) -> DerivativeBundle:
    u = s.coords
    _check_dim(t, u)
    vals, grads = value_and_grad_batch(t, u[None, :])
    grad = grads[0]
    radial = float(u @ grad)
    tgrad = grad - radial * u
    Q = tangent_basis(s) if basis is None else basis
    A = euclidean_hessian(t, u)
    hess = Q.T @ A @ Q - radial * np.eye(Q.shape[1])
    hess = 0.5 * (hess + hess.T)
    return DerivativeBundle(value=float(vals[0]), euclidean_grad=grad, radial=radial,
                            tangent_grad=tgrad, tangent_hessian=hess, basis=Q)


def radial_components(t: CouplingTensor, s: SpherePoint) -> dict[int, float]:
    """Per-degree radial derivatives u . grad(h_p)."""
    u = s.coords
    out = {}
    for p, g in t.spec.coeffs.items():
        T = contract_batch(t.symmetric(p), u[None, :], p - 1)[0]
        out[p] = float(g * p * (T @ u))
    return out


def energy_density(value: float, n: int) -> float:
    return value / math.sqrt(n)
