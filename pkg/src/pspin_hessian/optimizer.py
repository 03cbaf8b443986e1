"""Projected gradient descent on the unit sphere, run for many starts at once.

All restarts advance together so that each iteration costs one matrix-matrix
contraction of the coupling tensor instead of K matrix-vector ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MaxItersExceeded, NoConvergedRun
from .hamiltonian import (CouplingTensor, SpherePoint, derivatives,
                          value_and_grad_batch)
from .mixture import derive_moments
from .seeding import derive_seed

# Relative size below which energy differences are rounding noise.
NOISE_FLOOR = 1e-13


@dataclass
class OptimizerConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    step0: float | None = None
    armijo: float = 1e-4
    restarts: int = 50
    seed: int = 0
    max_backtracks: int = 60
    keep_trace: bool = False

    def __post_init__(self):
        if self.max_iters < 1 or self.grad_tol <= 0 or self.armijo <= 0:
            raise ValueError("max_iters, grad_tol and armijo must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.step0 is not None and self.step0 <= 0:
            raise ValueError("step0 must be positive")

    def initial_step(self, t: CouplingTensor) -> float:
        if self.step0 is not None:
            return self.step0
        return 0.1 / math.sqrt(derive_moments(t.spec).xipp)


@dataclass
class CriticalPointRecord:
    point: SpherePoint
    energy_density: float
    radial_density: float
    grad_norm: float
    normalized_hessian_eigs: np.ndarray
    iterations: int
    converged: bool
    restart_index: int = 0
    seed: int | None = None
    trace: list = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return self.point.n

    def to_dict(self, with_point=False) -> dict:
        out = {
            "restart_index": self.restart_index,
            "seed": self.seed,
            "n": self.n,
            "energy_density": self.energy_density,
            "radial_density": self.radial_density,
            "grad_norm": self.grad_norm,
            "grad_density": self.grad_norm / math.sqrt(self.n),
            "iterations": self.iterations,
            "converged": self.converged,
            "lambda_min": float(self.normalized_hessian_eigs[0]),
            "normalized_hessian_eigs": self.normalized_hessian_eigs.tolist(),
        }
        if with_point:
            out["point"] = self.point.coords.tolist()
        return out


def _normalize_rows(V):
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _tangent(U, G):
    radial = np.einsum("kn,kn->k", U, G)
    return G - radial[:, None] * U


def minimize_batch(t: CouplingTensor, cfg: OptimizerConfig, starts,
                   seeds=None, indices=None) -> list[CriticalPointRecord]:
    """Descend from every row of ``starts``; returns one record per row.

    Steps use a Barzilai-Borwein trial length, then halve until the Armijo
    condition holds, so accepted energies never increase. Once the promised
    decrease drops below the rounding floor of h, a step that does not raise h
    beyond that floor is accepted instead.
    """
    U = _normalize_rows(np.atleast_2d(np.asarray(starts, dtype=float)))
    k, n = U.shape
    tol = cfg.grad_tol * math.sqrt(n)
    step0 = cfg.initial_step(t)
    max_step = 1e3 * step0

    h, G = value_and_grad_batch(t, U)
    G = _tangent(U, G)
    gn = np.linalg.norm(G, axis=1)
    steps = np.full(k, step0)
    prev_U = np.full_like(U, np.nan)
    prev_G = np.full_like(U, np.nan)
    iters = np.zeros(k, dtype=int)
    converged = gn <= tol
    active = ~converged
    traces = [[float(v)] for v in h] if cfg.keep_trace else None

    while active.any():
        idx = np.flatnonzero(active)
        # Barzilai-Borwein trial step where a previous step exists
        eta = steps[idx].copy()
        have = ~np.isnan(prev_U[idx, 0])
        if have.any():
            j = idx[have]
            s = U[j] - prev_U[j]
            y = G[j] - prev_G[j]
            sy = np.einsum("kn,kn->k", s, y)
            ss = np.einsum("kn,kn->k", s, s)
            ok = sy > 0
            bb = np.where(ok, ss / np.where(ok, sy, 1.0), 2.0 * eta[have])
            eta[have] = np.clip(bb, 1e-12, max_step)

        pending = np.ones(idx.size, dtype=bool)
        newU = np.empty((idx.size, n))
        newh = np.empty(idx.size)
        newG = np.empty((idx.size, n))
        for _ in range(cfg.max_backtracks + 1):
            if not pending.any():
                break
            loc = np.flatnonzero(pending)
            j = idx[loc]
            V = _normalize_rows(U[j] - eta[loc, None] * G[j])
            hv, gv = value_and_grad_batch(t, V)
            promised = cfg.armijo * eta[loc] * gn[j] ** 2
            floor = NOISE_FLOOR * np.maximum(1.0, np.abs(h[j]))
            accept = (hv <= h[j] - promised) | ((promised <= floor) & (hv <= h[j] + floor))
            acc = loc[accept]
            newU[acc] = V[accept]
            newh[acc] = hv[accept]
            newG[acc] = _tangent(V[accept], gv[accept])
            pending[acc] = False
            eta[loc[~accept]] *= 0.5

        moved = ~pending
        stalled = idx[pending]
        active[stalled] = False
        j = idx[moved]
        prev_U[j] = U[j]
        prev_G[j] = G[j]
        U[j] = newU[moved]
        h[j] = newh[moved]
        G[j] = newG[moved]
        gn[j] = np.linalg.norm(G[j], axis=1)
        steps[j] = eta[moved]
        iters[j] += 1
        if traces is not None:
            for jj in j:
                traces[jj].append(float(h[jj]))
        done = gn[j] <= tol
        converged[j[done]] = True
        active[j[done]] = False
        active[j[iters[j] >= cfg.max_iters]] = False

    records = []
    for i in range(k):
        point = SpherePoint.from_vector(U[i])
        records.append(_make_record(
            t, point, iters[i], bool(converged[i]),
            restart_index=i if indices is None else indices[i],
            seed=None if seeds is None else seeds[i],
            trace=traces[i] if traces is not None else []))
    return records


def _make_record(t, point, iterations, converged, restart_index=0, seed=None, trace=()):
    n = t.n
    b = derivatives(t, point)
    eigs = np.linalg.eigvalsh(b.tangent_hessian) / math.sqrt(n - 1)
    return CriticalPointRecord(
        point=point,
        energy_density=b.value / math.sqrt(n),
        radial_density=b.radial / math.sqrt(n),
        grad_norm=float(np.linalg.norm(b.tangent_grad)),
        normalized_hessian_eigs=np.sort(eigs),
        iterations=int(iterations),
        converged=converged,
        restart_index=restart_index,
        seed=seed,
        trace=list(trace),
    )


def minimize(t: CouplingTensor, cfg: OptimizerConfig, start: SpherePoint,
             raise_on_failure: bool = False) -> CriticalPointRecord:
    rec = minimize_batch(t, cfg, start.coords[None, :])[0]
    if raise_on_failure and not rec.converged:
        raise MaxItersExceeded(
            f"no convergence after {rec.iterations} iterations "
            f"(|grad|/sqrt(N) = {rec.grad_norm / math.sqrt(rec.n):.3e})", record=rec)
    return rec


def restart_seed(cfg: OptimizerConfig, index: int) -> int:
    return derive_seed(cfg.seed, "restart", index)


def restart_start(n: int, cfg: OptimizerConfig, index: int) -> SpherePoint:
    """Uniform start on the sphere for restart ``index``."""
    return SpherePoint.random(n, np.random.default_rng(restart_seed(cfg, index)))


def multi_restart(t: CouplingTensor, cfg: OptimizerConfig
                  ) -> tuple[CriticalPointRecord, list[CriticalPointRecord]]:
    seeds = [restart_seed(cfg, i) for i in range(cfg.restarts)]
    starts = np.stack([restart_start(t.n, cfg, i).coords for i in range(cfg.restarts)])
    records = minimize_batch(t, cfg, starts, seeds=seeds,
                             indices=list(range(cfg.restarts)))
    good = [r for r in records if r.converged]
    if not good:
        worst = max(records, key=lambda r: r.grad_norm)
        raise NoConvergedRun(
            f"none of {len(records)} restarts converged; worst |grad| = "
            f"{worst.grad_norm:.3e} after {worst.iterations} iterations", records=records)
    best = min(good, key=lambda r: (r.energy_density, r.restart_index))
    return best, records
