"""Finite-N Kac-Rice integrals for the mean number of critical points.

Determinant expectations E|det(GOE_m - t I)| are Monte-Carlo averages over
one fixed set of GOE eigenvalue draws, reused at every quadrature node. The
integral is then itself a sample mean of per-draw integrals, which gives an
honest standard error despite the shared draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.optimize import minimize as sp_minimize
from scipy.special import gammaln, log_ndtr, logsumexp

from .analytic import complexity_R, f_xy, sigma_matrix
from .errors import DegenerateSigma, EmptyRegion
from .mixture import MixtureSpec, derive_moments
from .seeding import derive_rng
from .spectra import goe_sample

DROP = 40.0          # log-integrand drop (from the running max) where tails are cut
SEARCH_LIMIT = 200.0
QUAD_TOL = 1e-7


@dataclass(frozen=True)
class Interval:
    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if not self.lo < self.hi:
            raise EmptyRegion(f"empty interval ({self.lo}, {self.hi})")

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """``"-inf,-1.6"`` style; either side may be ``inf``/``-inf``."""
        lo, hi = (float(v) for v in text.split(","))
        return cls(lo, hi)

    def scaled(self, k: float) -> "Interval":
        a, b = self.lo * k, self.hi * k
        return Interval(min(a, b), max(a, b))

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def to_list(self):
        return [self.lo, self.hi]


REAL_LINE = Interval()


@dataclass
class DetMomentEstimate:
    n: int
    t: float
    first_moment: float
    second_moment: float
    log_first: float
    log_second: float
    samples: int
    std_error_first: float
    std_error_second: float


@dataclass
class CrtEstimate:
    n: int
    energy_window: Interval
    radial_window: Interval
    log_mean_count: float
    normalized: float
    mc_samples: int
    std_error: float
    nodes: int = 0

    @property
    def normalized_std_error(self) -> float:
        return self.std_error / self.n

    def to_dict(self):
        out = asdict(self)
        out["energy_window"] = self.energy_window.to_list()
        out["radial_window"] = self.radial_window.to_list()
        return out


class GoeDeterminantSampler:
    """Fixed draws of GOE_m eigenvalues; |det(GOE_m - t I)| for any t from them."""

    def __init__(self, m: int, samples: int, seed: int):
        if m < 1:
            raise ValueError("matrix size must be >= 1")
        if samples < 2:
            raise ValueError("need at least two samples")
        self.m = m
        self.samples = samples
        self.seed = seed
        rng = derive_rng(seed, "goe-det", m)
        self.eigs = np.stack([np.linalg.eigvalsh(goe_sample(m, rng=rng))
                              for _ in range(samples)])

    def log_abs_det(self, t) -> np.ndarray:
        """Array (samples, len(t)) of log|det(GOE - t I)|."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((self.samples, t.size))
        chunk = max(1, 2_000_000 // (self.samples * self.m))
        for i in range(0, t.size, chunk):
            tt = t[i:i + chunk]
            out[:, i:i + chunk] = np.log(np.abs(self.eigs[:, :, None] - tt)).sum(axis=1)
        return out

    def moments(self, t: float) -> DetMomentEstimate:
        L = self.log_abs_det([t])[:, 0]
        s = self.samples
        log1 = float(logsumexp(L) - math.log(s))
        log2 = float(logsumexp(2 * L) - math.log(s))
        m1 = np.max(L)
        m2 = 2 * m1
        se1 = math.exp(m1) * float(np.std(np.exp(L - m1), ddof=1)) / math.sqrt(s)
        se2 = math.exp(m2) * float(np.std(np.exp(2 * L - m2), ddof=1)) / math.sqrt(s)
        return DetMomentEstimate(n=self.m, t=float(t), first_moment=_safe_exp(log1),
                                 second_moment=_safe_exp(log2), log_first=log1,
                                 log_second=log2, samples=s, std_error_first=se1,
                                 std_error_second=se2)


def _safe_exp(x):
    return math.exp(x) if x < 709 else math.inf


def det_moment_mc(n: int, t: float, samples: int, seed: int) -> DetMomentEstimate:
    if samples < 100:
        raise ValueError("det_moment_mc needs samples >= 100")
    return GoeDeterminantSampler(n, samples, seed).moments(t)


# ---------------------------------------------------------------------------
# prefactors


def log_prefactor_pure(p: int, n: int) -> float:
    if n < 3:
        raise ValueError("n must be >= 3")
    return (0.5 * math.log(n) + 0.5 * (n - 1) * math.log(n - 1)
            + 0.5 * (n - 1) * math.log(p - 1) - 0.5 * (n - 2) * math.log(2.0)
            - math.log(p) - float(gammaln(n / 2.0)))


def log_prefactor_mixed(spec: MixtureSpec, n: int) -> float:
    if n < 3:
        raise ValueError("n must be >= 3")
    sig = sigma_matrix(spec)
    if sig.det <= 0:
        raise DegenerateSigma(f"det Sigma = {sig.det:.3e}")
    m = derive_moments(spec)
    return (0.5 * math.log(n) + 0.5 * (n - 1) * math.log(n - 1)
            + 0.5 * (n - 1) * math.log(m.xipp) - 0.5 * (n - 1) * math.log(2.0)
            - float(gammaln(n / 2.0)) - 0.5 * (n - 1) * math.log(m.xip)
            - 0.5 * math.log(math.pi * sig.det))


def log_prefactor(spec_or_p, n: int) -> float:
    if isinstance(spec_or_p, MixtureSpec):
        if spec_or_p.is_pure:
            return log_prefactor_pure(spec_or_p.pure_degree, n)
        return log_prefactor_mixed(spec_or_p, n)
    return log_prefactor_pure(int(spec_or_p), n)


# ---------------------------------------------------------------------------
# 1-D log-space quadrature with shared MC draws


def _truncate(logf, lo: float, hi: float, scale: float) -> tuple[float, float]:
    """Shrink [lo, hi] to where logf stays within DROP of its running max.

    The scan starts at the window point nearest 0 (where the Gaussian weight
    peaks) and walks outward, so far-away or infinite ends cost nothing.
    """
    anchor = min(max(0.0, lo), hi)
    best0 = logf(np.array([anchor]))[0]
    ends = []
    for direction, end in ((-1, lo), (1, hi)):
        y, best, step = anchor, best0, 0.05 * scale
        while True:
            y += direction * step
            if (y - end) * direction >= 0:
                y = end
                break
            v = logf(np.array([y]))[0]
            best = max(best, v)
            if v < best - DROP or abs(y - anchor) > SEARCH_LIMIT * scale:
                break
            step *= 1.1
        ends.append(y)
    return ends[0], ends[1]


def _simpson_weights(k: int, h: float) -> np.ndarray:
    w = np.ones(k)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def _integrate(log_gauss, log_det_rows, lo, hi, samples):
    """Return (log I, se of log I, nodes): I = mean_s sum_j w_j exp(g_j + L_sj)."""
    prev = None
    k = 257
    while True:
        ys = np.linspace(lo, hi, k)
        logw = np.log(_simpson_weights(k, (hi - lo) / (k - 1)))
        A = log_det_rows(ys) + (log_gauss(ys) + logw)[None, :]
        logz = logsumexp(A, axis=1)
        log_i = float(logsumexp(logz) - math.log(samples))
        if prev is not None and abs(log_i - prev) < QUAD_TOL or k > 8193:
            break
        prev = log_i
        k = 2 * k - 1
    if samples < 2:
        return log_i, 0.0, k
    z = np.exp(logz - logz.max())
    se = float(np.std(z, ddof=1) / math.sqrt(samples) / np.mean(z))
    return log_i, se, k


def _det_rows(sampler, scale, det_override):
    if det_override is not None:
        c = math.log(det_override)
        return lambda ys: np.full((1, np.size(ys)), c)
    return lambda ys: sampler.log_abs_det(scale * ys)


def mean_crt_pure(p: int, n: int, energy_window: Interval = REAL_LINE,
                  radial_window: Interval = REAL_LINE, samples: int = 2000, seed: int = 0,
                  sampler: GoeDeterminantSampler | None = None,
                  det_override: float | None = None) -> CrtEstimate:
    if p < 3:
        raise ValueError("mean_crt_pure needs p >= 3")
    region = radial_window.intersect(energy_window.scaled(p))
    if det_override is None and sampler is None:
        sampler = GoeDeterminantSampler(n - 1, samples, seed)
    nsamp = 1 if det_override is not None else sampler.samples
    tau = math.sqrt(n) / math.sqrt((n - 1) * p * (p - 1))
    log_det = _det_rows(sampler, tau, det_override)
    log_gauss = lambda ys: -n * ys * ys / (2.0 * p * p)

    def logf(ys):
        return log_gauss(ys) + logsumexp(log_det(ys), axis=0) - math.log(nsamp)

    lo, hi = _truncate(logf, region.lo, region.hi, scale=p)
    log_i, se, k = _integrate(log_gauss, log_det, lo, hi, nsamp)
    total = log_prefactor_pure(p, n) + log_i
    return CrtEstimate(n=n, energy_window=energy_window, radial_window=radial_window,
                       log_mean_count=total, normalized=total / n, mc_samples=nsamp,
                       std_error=se, nodes=k)


def log_gauss_mass(alpha, beta):
    """log(Phi(beta) - Phi(alpha)) for alpha < beta, accurate in both tails."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    flip = alpha > 0
    a = np.where(flip, -beta, alpha)
    b = np.where(flip, -alpha, beta)
    lb = log_ndtr(b)
    la = log_ndtr(a)
    with np.errstate(divide="ignore"):
        return lb + np.log1p(-np.exp(la - lb))


def mean_crt_mixed(spec: MixtureSpec, n: int, energy_window: Interval = REAL_LINE,
                   radial_window: Interval = REAL_LINE, samples: int = 2000,
                   seed: int = 0, sampler: GoeDeterminantSampler | None = None,
                   det_override: float | None = None) -> CrtEstimate:
    """2-D Kac-Rice integral over energy x radial windows.

    The x-integral of the Gaussian weight is done in closed form (error
    functions); the y-integral by Simpson quadrature.
    """
    sig = sigma_matrix(spec)
    if sig.det <= 0:
        raise DegenerateSigma(f"det Sigma = {sig.det:.3e}")
    m = derive_moments(spec)
    if det_override is None and sampler is None:
        sampler = GoeDeterminantSampler(n - 1, samples, seed)
    nsamp = 1 if det_override is not None else sampler.samples
    tau = math.sqrt(n) / math.sqrt((n - 1) * m.xipp)
    log_det = _det_rows(sampler, tau, det_override)
    sx = math.sqrt(sig.det / (n * sig.m22))
    a, b = energy_window.lo, energy_window.hi

    def log_gauss(ys):
        mu = sig.m12 * ys / sig.m22
        mass = log_gauss_mass((a - mu) / sx, (b - mu) / sx)
        return (-n * ys * ys / (2.0 * sig.m22) + 0.5 * math.log(2.0 * math.pi) + math.log(sx)
                + mass)

    def logf(ys):
        return log_gauss(ys) + logsumexp(log_det(ys), axis=0) - math.log(nsamp)

    lo, hi = _truncate(logf, radial_window.lo, radial_window.hi, scale=math.sqrt(m.xipp))
    log_i, se, k = _integrate(log_gauss, log_det, lo, hi, nsamp)
    total = log_prefactor_mixed(spec, n) + log_i
    return CrtEstimate(n=n, energy_window=energy_window, radial_window=radial_window,
                       log_mean_count=total, normalized=total / n, mc_samples=nsamp,
                       std_error=se, nodes=k)


def mean_crt(spec: MixtureSpec, n: int, energy_window=REAL_LINE, radial_window=REAL_LINE,
             samples=2000, seed=0, sampler=None) -> CrtEstimate:
    if spec.is_pure:
        return mean_crt_pure(spec.pure_degree, n, energy_window, radial_window,
                             samples=samples, seed=seed, sampler=sampler)
    return mean_crt_mixed(spec, n, energy_window, radial_window, samples=samples,
                          seed=seed, sampler=sampler)


# ---------------------------------------------------------------------------
# limits


def _clip(iv: Interval, bound: float) -> tuple[float, float]:
    return max(iv.lo, -bound), min(iv.hi, bound)


def analytic_sup_pure(p: int, energy_window=REAL_LINE, radial_window=REAL_LINE,
                      bound: float = 60.0) -> float:
    """sup of R(y) over y in D with y/p in B."""
    lo, hi = _clip(radial_window.intersect(energy_window.scaled(p)), bound)
    ys = np.linspace(lo, hi, 20001)
    vals = complexity_R(p, ys)
    # include open endpoints through their limits
    return float(max(vals.max(), complexity_R(p, lo), complexity_R(p, hi)))


def analytic_sup_mixed(spec: MixtureSpec, energy_window=REAL_LINE,
                       radial_window=REAL_LINE, bound: float = 60.0) -> float:
    """sup of F over the box; F is jointly concave so a grid seed plus a bounded
    local polish finds it."""
    xl, xh = _clip(energy_window, bound)
    yl, yh = _clip(radial_window, bound)
    X, Y = np.meshgrid(np.linspace(xl, xh, 201), np.linspace(yl, yh, 801), indexing="ij")
    V = f_xy(spec, X, Y)
    i = np.unravel_index(np.argmax(V), V.shape)
    res = sp_minimize(lambda v: -f_xy(spec, v[0], v[1]), x0=[X[i], Y[i]],
                      bounds=[(xl, xh), (yl, yh)], method="L-BFGS-B")
    return float(max(V[i], -res.fun))
