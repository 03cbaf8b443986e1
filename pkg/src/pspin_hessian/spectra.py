"""GOE sampling, semicircle laws and distances between spectral measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotConverged
from .mixture import MixtureSpec, derive_moments


@dataclass(frozen=True)
class SpectralMeasure:
    """Uniform-weight atoms, kept sorted."""

    eigs: np.ndarray

    def __post_init__(self):
        e = np.sort(np.asarray(self.eigs, dtype=float).ravel())
        if e.size == 0:
            raise ValueError("spectral measure needs at least one atom")
        e.setflags(write=False)
        object.__setattr__(self, "eigs", e)

    @property
    def size(self) -> int:
        return self.eigs.size

    @property
    def lambda_min(self) -> float:
        return float(self.eigs[0])

    def shifted(self, delta: float) -> "SpectralMeasure":
        return SpectralMeasure(self.eigs + delta)


@dataclass(frozen=True)
class SemicircleParams:
    center: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("semicircle radius must be positive")

    @property
    def left_edge(self) -> float:
        return self.center - self.radius


STANDARD_SEMICIRCLE = SemicircleParams(0.0, 2.0)


# ---------------------------------------------------------------------------
# GOE


def goe_sample(n: int, seed=None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Symmetric n x n matrix with E M_ij^2 = (1 + delta_ij) / n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) / math.sqrt(n)
    upper = np.triu(A, 1)
    return upper + upper.T + np.diag(np.diag(A) * math.sqrt(2.0))


def goe_eigs(n: int, seed=None, rng=None) -> np.ndarray:
    return np.linalg.eigvalsh(goe_sample(n, seed=seed, rng=rng))


# ---------------------------------------------------------------------------
# semicircle closed forms


def _t(params, x):
    return np.clip((np.asarray(x, dtype=float) - params.center) / params.radius, -1.0, 1.0)


def semicircle_pdf(params: SemicircleParams, x):
    x = np.asarray(x, dtype=float)
    r = params.radius
    d = r * r - (x - params.center) ** 2
    out = np.where(d > 0, 2.0 / (math.pi * r * r) * np.sqrt(np.maximum(d, 0.0)), 0.0)
    return out if out.ndim else float(out)


def semicircle_cdf(params: SemicircleParams, x):
    t = _t(params, x)
    out = 0.5 + (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / math.pi
    return out if out.ndim else float(out)


def semicircle_partial_mean(params: SemicircleParams, x):
    """int_{-inf}^{x} s sigma(ds)."""
    t = _t(params, x)
    out = (params.center * semicircle_cdf(params, x)
           - 2.0 * params.radius / (3.0 * math.pi) * (1.0 - t * t) ** 1.5)
    return out if np.ndim(out) else float(out)


def semicircle_cdf_integral(params: SemicircleParams, x):
    """int_{-inf}^{x} CDF(s) ds, linear to the right of the support."""
    x = np.asarray(x, dtype=float)
    r = params.radius
    t = _t(params, x)
    s = np.sqrt(1.0 - t * t)

    def inner(tt, ss):
        return r * ((tt + 1.0) / 2.0 + (-(ss**3) / 3.0 + tt * np.arcsin(tt) + ss - math.pi / 2.0) / math.pi)

    out = inner(t, s) + np.maximum(x - (params.center + r), 0.0)
    return out if out.ndim else float(out)


def semicircle_quantile(params: SemicircleParams, q, iters: int = 64):
    """Inverse CDF by vectorized bisection on [-1, 1] (the CDF is strictly increasing)."""
    q = np.asarray(q, dtype=float)
    lo = np.full(q.shape, -1.0)
    hi = np.full(q.shape, 1.0)
    unit = SemicircleParams(0.0, 1.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = semicircle_cdf(unit, mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = params.center + params.radius * 0.5 * (lo + hi)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# distances


def _as_measure(m):
    if isinstance(m, (SpectralMeasure, SemicircleParams)):
        return m
    return SpectralMeasure(m)


def _w1_discrete(a: np.ndarray, b: np.ndarray) -> float:
    xs = np.concatenate([a, b])
    xs.sort()
    fa = np.searchsorted(a, xs[:-1], side="right") / a.size
    fb = np.searchsorted(b, xs[:-1], side="right") / b.size
    return float(np.sum(np.abs(fa - fb) * np.diff(xs)))


def _w1_vs_semicircle(a: np.ndarray, sc: SemicircleParams) -> float:
    n = a.size
    levels = np.arange(1, n) / n
    knots = np.concatenate([a, semicircle_quantile(sc, levels), [sc.left_edge, sc.center + sc.radius]])
    knots.sort()
    lo, hi = knots[:-1], knots[1:]
    f_emp = np.searchsorted(a, 0.5 * (lo + hi), side="right") / n
    area_sc = semicircle_cdf_integral(sc, hi) - semicircle_cdf_integral(sc, lo)
    return float(np.sum(np.abs(f_emp * (hi - lo) - area_sc)))


def w1_distance(a, b) -> float:
    """Exact Wasserstein-1 distance: L1 distance between the two CDFs."""
    a = _as_measure(a)
    b = _as_measure(b)
    if isinstance(a, SemicircleParams):
        a, b = b, a
    if isinstance(a, SemicircleParams):
        raise TypeError("at least one argument must be an empirical measure")
    if isinstance(b, SemicircleParams):
        return _w1_vs_semicircle(a.eigs, b)
    return _w1_discrete(a.eigs, b.eigs)


def _test_functions(grid: np.ndarray):
    """Knots/values of clamped ramps x -> clip(x - g, -1, 1) and tents
    x -> max(0, 1 - |x - g|); all are 1-Lipschitz and bounded by 1."""
    for g in grid:
        yield np.array([g - 1.0, g + 1.0]), np.array([-1.0, 1.0])
        yield np.array([g - 1.0, g, g + 1.0]), np.array([0.0, 1.0, 0.0])


def _integrate_pl(knots, values, m) -> float:
    """int f dm for f piecewise linear, constant outside [knots[0], knots[-1]]."""
    if isinstance(m, SpectralMeasure):
        return float(np.mean(np.interp(m.eigs, knots, values)))
    F = semicircle_cdf(m, knots)
    M = semicircle_partial_mean(m, knots)
    total = values[0] * F[0] + values[-1] * (1.0 - F[-1])
    for i in range(knots.size - 1):
        slope = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i])
        icpt = values[i] - slope * knots[i]
        total += icpt * (F[i + 1] - F[i]) + slope * (M[i + 1] - M[i])
    return float(total)


def default_grid(a, b, step: float = 0.05) -> np.ndarray:
    lo, hi = [], []
    for m in (a, b):
        if isinstance(m, SemicircleParams):
            lo.append(m.left_edge)
            hi.append(m.center + m.radius)
        else:
            lo.append(m.eigs[0])
            hi.append(m.eigs[-1])
    return np.arange(min(lo) - 1.0, max(hi) + 1.0 + step, step)


def bl_lower_bound(a, b, grid=None) -> float:
    """Lower bound on the bounded-Lipschitz distance from a fixed dictionary
    of test functions centred on ``grid``; always <= d(a, b) <= W1(a, b)."""
    a = _as_measure(a)
    b = _as_measure(b)
    grid = default_grid(a, b) if grid is None else np.asarray(grid, dtype=float)
    best = 0.0
    for knots, vals in _test_functions(grid):
        best = max(best, abs(_integrate_pl(knots, vals, a) - _integrate_pl(knots, vals, b)))
    return best


# ---------------------------------------------------------------------------
# Hessian spectra at located critical points


def normalized_hessian_spectrum(rec) -> SpectralMeasure:
    if not rec.converged:
        raise NotConverged("critical point record did not converge")
    return SpectralMeasure(rec.normalized_hessian_eigs)


def predicted_comparator(rec, spec: MixtureSpec) -> SemicircleParams:
    """Semicircle the normalized spectrum should follow at this point:
    centre -r sqrt(N/(N-1)) from the achieved radial density r, radius 2 sqrt(xi'')."""
    n = rec.n
    return SemicircleParams(center=-rec.radial_density * math.sqrt(n / (n - 1)),
                            radius=2.0 * math.sqrt(derive_moments(spec).xipp))


def spectrum_report(rec, spec: MixtureSpec) -> dict:
    mu = normalized_hessian_spectrum(rec)
    sc = predicted_comparator(rec, spec)
    return {
        "center": sc.center,
        "radius": sc.radius,
        "w1": w1_distance(mu, sc),
        "bl_lower": bl_lower_bound(mu, sc),
        "lambda_min": mu.lambda_min,
        "predicted_lambda_min": sc.left_edge,
        "lambda_min_gap": abs(mu.lambda_min - sc.left_edge),
    }
