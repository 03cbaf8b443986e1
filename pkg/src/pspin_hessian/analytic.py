"""Closed-form complexity functions and the ground-state equations built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import brentq

from .errors import (DegenerateSigma, NoAlphaFound, NoSignChange, NotPureLike,
                     RootNotBracketed)
from .mixture import MixtureClass, MixtureSpec, derive_moments, e_inf_thresholds

DEGENERATE_DET = 1e-14
ALPHA_SCHEDULE = (1.5, 2.0, 3.0, 5.0, 8.0)
# Lipschitz constant of psi_star: |psi_star'| peaks at 1 on |x| = 2.
PSI_STAR_LIPSCHITZ = 1.0


# ---------------------------------------------------------------------------
# one-dimensional special functions


def psi_star(x):
    """Log-potential of the standard semicircle, int log|x - t| sigma_sc(dt).

    Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    root = np.sqrt(np.maximum(ax * ax - 4.0, 0.0))
    tail = ax / 4.0 * root - np.log(np.maximum(root / 2.0 + ax / 2.0, 1.0))
    out = x * x / 4.0 - 0.5 - np.where(ax > 2.0, tail, 0.0)
    return out if out.ndim else float(out)


def psi_star_prime(x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inner = x / 2.0
    root = np.sqrt(np.maximum(ax * ax - 4.0, 0.0))
    out = np.where(ax <= 2.0, inner, (x - np.sign(x) * root) / 2.0)
    return out if out.ndim else float(out)


def psi_star_second(x):
    """Second derivative; at |x| = 2 the inner one-sided value 1/2 is returned."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        outer = 0.5 * (1.0 - ax / np.sqrt(ax * ax - 4.0))
    out = np.where(ax <= 2.0, 0.5, outer)
    return out if out.ndim else float(out)


def big_phi(x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    root = np.sqrt(np.maximum(ax * ax - 2.0, 0.0))
    val = -ax * root / 2.0 + np.log(np.maximum(ax + root, 1e-300) / math.sqrt(2.0))
    out = np.where(ax >= math.sqrt(2.0), val, 0.0)
    return out if out.ndim else float(out)


def complexity_R(p: int, y):
    """Pure p-spin complexity as a function of the radial density y."""
    if p < 3:
        raise ValueError("complexity_R needs p >= 3")
    y = np.asarray(y, dtype=float)
    out = (0.5 * math.log(p - 1)
           - (p - 2) * y * y / (4.0 * p * p * (p - 1))
           + big_phi(y / math.sqrt(2.0 * p * (p - 1))))
    return out if np.ndim(out) else float(out)


def complexity_R_psi_form(p: int, y):
    """Same function written through psi_star; used as an algebraic cross-check."""
    y = np.asarray(y, dtype=float)
    out = (0.5 + 0.5 * math.log(p - 1) - y * y / (2.0 * p * p)
           + psi_star(y / math.sqrt(p * (p - 1))))
    return out if np.ndim(out) else float(out)


def theta_pure(p: int, u):
    """Pure p-spin complexity in the energy variable u (R evaluated at p*u)."""
    return complexity_R(p, p * np.asarray(u, dtype=float))


# ---------------------------------------------------------------------------
# mixed models


@dataclass(frozen=True)
class SigmaMatrix:
    m11: float
    m12: float
    m22: float
    det: float

    @property
    def m21(self):
        return self.m12

    def as_array(self):
        return np.array([[self.m11, self.m12], [self.m12, self.m22]])


def sigma_matrix(spec: MixtureSpec) -> SigmaMatrix:
    m = derive_moments(spec)
    m22 = m.xipp + m.xip
    return SigmaMatrix(m11=m.xi1, m12=m.xip, m22=m22, det=m.xi1 * m22 - m.xip**2)


def _require_nondegenerate(spec):
    sig = sigma_matrix(spec)
    if sig.det <= DEGENERATE_DET:
        raise DegenerateSigma(
            f"det Sigma = {sig.det:.3e}; pure models go through complexity_R")
    return sig, derive_moments(spec)


def quad_form(sig: SigmaMatrix, x, y):
    """(x, y) Sigma^{-1} (x, y)^T."""
    return (sig.m22 * x * x - 2.0 * sig.m12 * x * y + sig.m11 * y * y) / sig.det


def f_xy(spec: MixtureSpec, x, y):
    """Mixed complexity F(x, y) in energy density x and radial density y."""
    sig, m = _require_nondegenerate(spec)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = (0.5 + 0.5 * math.log(m.xipp / m.xip) - 0.5 * quad_form(sig, x, y)
           + psi_star(y / math.sqrt(m.xipp)))
    return out if np.ndim(out) else float(out)


def df_dy(spec: MixtureSpec, x, y):
    sig, m = _require_nondegenerate(spec)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = math.sqrt(m.xipp)
    out = (sig.m12 * x - sig.m11 * y) / sig.det + psi_star_prime(y / s) / s
    return out if np.ndim(out) else float(out)


def d2f_dy2(spec: MixtureSpec, x, y):
    sig, m = _require_nondegenerate(spec)
    y = np.asarray(y, dtype=float)
    out = -sig.m11 / sig.det + psi_star_second(y / math.sqrt(m.xipp)) / m.xipp
    out = out + 0.0 * np.asarray(x, dtype=float)
    return out if np.ndim(out) else float(out)


def df_dx(spec: MixtureSpec, x, y):
    sig, _ = _require_nondegenerate(spec)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = (sig.m12 * y - sig.m22 * x) / sig.det
    return out if np.ndim(out) else float(out)


def curvature_constant(spec: MixtureSpec) -> float:
    """c > 0 bounding d2F/dy2 <= -c below the branch point y = -2 sqrt(xi'')."""
    m = derive_moments(spec)
    den = m.xipp + m.xip - m.xip**2
    return (m.xipp - m.xip + m.xip**2) / (2.0 * m.xipp * den)


def argmax_y(spec: MixtureSpec, x: float) -> float:
    """Maximizer of F(x, .) over y <= 0 (F is strictly concave in y)."""
    m = derive_moments(spec)
    lo = -40.0 * math.sqrt(m.xipp)
    g = lambda y: df_dy(spec, x, y)
    if g(0.0) <= 0.0 and g(lo) <= 0.0:
        for _ in range(20):
            lo *= 2.0
            if g(lo) > 0.0:
                break
        else:
            raise RootNotBracketed(f"dF/dy has no sign change for x={x}")
    if g(0.0) >= 0.0:
        return 0.0
    return brentq(g, lo, 0.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def sup_f(spec: MixtureSpec, x: float) -> tuple[float, float]:
    """Return ``(sup_y F(x, y), argmax)``; the search is restricted to y <= 0."""
    y = argmax_y(spec, x)
    return f_xy(spec, x, y), y


# ---------------------------------------------------------------------------
# ground states


@dataclass
class PredictionSet:
    klass: MixtureClass
    is_pure: bool
    e0: float
    center: float
    radius: float
    e_inf_pure: float | None
    e_inf_prime: float
    e_inf_mixed: float
    z: float | None = None
    y0: float | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def lambda_min(self) -> float:
        return self.center - self.radius

    def to_dict(self) -> dict:
        out = asdict(self)
        out["klass"] = self.klass.value
        out["lambda_min"] = self.lambda_min
        return out


def _small_z_series(z):
    # (1+z) log(1+z)/z^2 - 1/z = sum_{k>=0} (-1)^k z^k / ((k+1)(k+2))
    return sum((-1) ** k * z**k / ((k + 1) * (k + 2)) for k in range(12))


def pz_lhs(z: float) -> float:
    """(1+z)/z^2 log(1+z) - 1/z, with a series near z = 0."""
    if z < 1e-3:
        return _small_z_series(z)
    return (1.0 + z) * math.log1p(z) / (z * z) - 1.0 / z


def pz_residual(p: int, z: float) -> float:
    return pz_lhs(z) - 1.0 / p


def energy_from_z(p: int, z: float) -> float:
    return math.sqrt(p) / math.sqrt(z + 1.0) * (1.0 + z / p)


def solve_pure_ground_state(p: int) -> PredictionSet:
    if p < 3:
        raise ValueError("solve_pure_ground_state needs p >= 3")
    lo, hi = 1e-9, 10.0 * p
    f_lo, f_hi = pz_residual(p, lo), pz_residual(p, hi)
    if f_lo * f_hi > 0:
        raise RootNotBracketed(f"z-equation has no sign change on [{lo}, {hi}] for p={p}")
    z = brentq(lambda t: pz_residual(p, t), lo, hi, xtol=1e-15,
               rtol=4 * np.finfo(float).eps, maxiter=500)
    e0 = energy_from_z(p, z)
    center = p * e0
    radius = 2.0 * math.sqrt(p * (p - 1))
    assert center > radius, "edge inequality p E0 > 2 sqrt(p(p-1)) violated"
    spec = MixtureSpec.pure(p)
    pure, prime, mixed = e_inf_thresholds(spec)
    return PredictionSet(
        klass=derive_moments(spec).klass, is_pure=True, e0=e0, center=center,
        radius=radius, e_inf_pure=pure, e_inf_prime=prime, e_inf_mixed=mixed, z=z,
        residuals={
            "pz_equation": pz_residual(p, z),
            "R_at_minus_center": complexity_R(p, -center),
            "edge_margin": center - radius,
        },
    )


def solve_mixed_ground_state(spec: MixtureSpec, bracket=(-3.0, None)) -> PredictionSet:
    """Ground-state energy -E0 as the smallest zero of x -> sup_y F(x, y)."""
    m = derive_moments(spec)
    if m.klass is not MixtureClass.PURE_LIKE:
        raise NotPureLike(f"mixture is {m.klass.value} (G = {m.g_value:.4g})")
    _require_nondegenerate(spec)
    pure, prime, mixed = e_inf_thresholds(spec)
    lo = bracket[0]
    hi = -mixed if bracket[1] is None else bracket[1]
    g = lambda x: sup_f(spec, x)[0]
    g_hi = g(hi)
    if g_hi <= 0:
        raise NoSignChange(f"sup_y F({hi}, y) = {g_hi:.3g} is not positive")
    g_lo = g(lo)
    for _ in range(30):
        if g_lo < 0:
            break
        lo *= 1.5
        g_lo = g(lo)
    else:
        raise NoSignChange("sup_y F stays nonnegative after widening the bracket")
    x0 = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    f0, ystar = sup_f(spec, x0)
    e0, y0 = -x0, -ystar
    radius = 2.0 * math.sqrt(m.xipp)
    return PredictionSet(
        klass=m.klass, is_pure=False, e0=e0, center=y0, radius=radius,
        e_inf_pure=pure, e_inf_prime=prime, e_inf_mixed=mixed, y0=y0,
        residuals={
            "F": f0,
            "dF_dy": df_dy(spec, x0, ystar),
            "y0_minus_edge": y0 - radius,
        },
    )


def predict(spec: MixtureSpec) -> PredictionSet:
    """Dispatch to the pure or mixed solver."""
    if spec.is_pure:
        p = spec.pure_degree
        if p == 2:
            return _predict_p2(spec)
        return solve_pure_ground_state(p)
    return solve_mixed_ground_state(spec)


def _predict_p2(spec):
    # z -> 0 limit of the pure formulas: E0 = sqrt(2), center 2 sqrt(2) = radius.
    pure, prime, mixed = e_inf_thresholds(spec)
    e0 = math.sqrt(2.0)
    return PredictionSet(
        klass=derive_moments(spec).klass, is_pure=True, e0=e0, center=2.0 * e0,
        radius=2.0 * math.sqrt(2.0), e_inf_pure=pure, e_inf_prime=prime,
        e_inf_mixed=mixed, z=0.0, residuals={"edge_margin": 0.0},
    )


# ---------------------------------------------------------------------------
# strip negativity around the maximizer


@dataclass
class StripReport:
    eps: float
    alpha: float
    beta: float
    max_outside: float
    max_inside: float
    k_cut: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def strip_check(spec: MixtureSpec, eps: float, pred: PredictionSet | None = None,
                nx: int = 41, ny: int = 4001) -> StripReport:
    """Grid check that F < 0 off a sqrt(eps)-strip around (-E0, -y0).

    ``alpha`` is the smallest value of the schedule that works; ``beta`` is the
    bound 3 alpha (y0 + xi' E0) / (2 den) + alpha L / sqrt(xi''), against which
    the inner maximum is compared (as ``max_inside <= beta sqrt(eps)``).
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    pred = pred or solve_mixed_ground_state(spec)
    m = derive_moments(spec)
    e0, y0 = pred.e0, pred.y0
    den = m.xipp + m.xip - m.xip**2
    k_cut = 10.0 * math.sqrt(m.xipp)

    if eps == 0:
        inner = f_xy(spec, -e0, -y0)
        return StripReport(eps=0.0, alpha=ALPHA_SCHEDULE[0], beta=0.0,
                           max_outside=-math.inf, max_inside=inner, k_cut=k_cut,
                           passed=abs(inner) <= 1e-8)

    # open interval in x: drop the endpoints of the closed grid
    xs = np.linspace(-e0 - eps, -e0 + eps, nx + 2)[1:-1]
    ys = np.linspace(-k_cut, 0.0, ny)
    rt = math.sqrt(eps)
    last_bad = None
    for alpha in ALPHA_SCHEDULE:
        half = alpha * rt
        y_out = ys[np.abs(ys + y0) >= half]
        y_in = np.linspace(-y0 - half, -y0 + half, 401)[1:-1]
        X, Y = np.meshgrid(xs, y_out, indexing="ij")
        vals = f_xy(spec, X, Y)
        idx = np.unravel_index(np.argmax(vals), vals.shape)
        max_out = float(vals[idx])
        if max_out >= 0:
            last_bad = (float(X[idx]), float(Y[idx]), max_out)
            continue
        Xi, Yi = np.meshgrid(xs, y_in, indexing="ij")
        max_in = float(np.max(f_xy(spec, Xi, Yi)))
        beta = (3.0 * alpha * (y0 + m.xip * e0) / (2.0 * den)
                + alpha * PSI_STAR_LIPSCHITZ / math.sqrt(m.xipp))
        return StripReport(eps=eps, alpha=alpha, beta=beta, max_outside=max_out,
                           max_inside=max_in, k_cut=k_cut,
                           passed=max_in <= beta * rt)
    raise NoAlphaFound(f"no alpha in {ALPHA_SCHEDULE} gives F < 0 off the strip; "
                       f"violation at (x, y, F) = {last_bad}", point=last_bad)
