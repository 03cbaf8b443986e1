"""Mixture covariance xi(x) = sum_p gamma_p^2 x^p and its classification."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .errors import InvalidSpec

DEFAULT_P_MAX = 32
NORMALIZATION_TOL = 1e-12
CRITICAL_BAND = 1e-12


class MixtureClass(str, enum.Enum):
    PURE_LIKE = "PureLike"
    CRITICAL = "Critical"
    FULL = "Full"


@dataclass(frozen=True)
class MixtureSpec:
    """Finite mixture given by nonnegative coefficients gamma_p (not squared).

    Use :meth:`from_squared` / :meth:`parse` when starting from gamma_p^2,
    which is what the JSON and CLI formats carry.
    """

    coeffs: Mapping[int, float]
    normalized: bool = True
    p_max: int = DEFAULT_P_MAX

    def __post_init__(self):
        cleaned = {}
        for p, g in dict(self.coeffs).items():
            if int(p) != p:
                raise InvalidSpec(f"degree {p!r} is not an integer")
            p = int(p)
            g = float(g)
            if p < 2:
                raise InvalidSpec(f"degree {p} < 2")
            if p > self.p_max:
                raise InvalidSpec(f"degree {p} exceeds p_max={self.p_max}")
            if not math.isfinite(g) or g < 0:
                raise InvalidSpec(f"gamma_{p} must be finite and >= 0, got {g}")
            if g > 0:
                cleaned[p] = g
        if not cleaned:
            raise InvalidSpec("at least one gamma_p must be positive")
        if self.normalized:
            total = sum(g * g for g in cleaned.values())
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise InvalidSpec(f"sum of gamma_p^2 is {total!r}, expected 1")
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(cleaned.items()))))

    # -- construction ------------------------------------------------------

    @classmethod
    def pure(cls, p: int) -> "MixtureSpec":
        return cls({p: 1.0})

    @classmethod
    def from_squared(cls, squared: Mapping[int, float], normalized=True,
                     p_max=DEFAULT_P_MAX) -> "MixtureSpec":
        bad = {p: v for p, v in squared.items() if float(v) < 0}
        if bad:
            raise InvalidSpec(f"negative squared coefficients: {bad}")
        return cls({int(p): math.sqrt(float(v)) for p, v in squared.items()},
                   normalized=normalized, p_max=p_max)

    @classmethod
    def from_json(cls, obj) -> "MixtureSpec":
        """Accepts ``{"gamma2": 0.5, "gamma3": 0.5}`` (a dict or JSON text)."""
        if isinstance(obj, str):
            obj = json.loads(obj)
        squared = {}
        for key, val in obj.items():
            if not key.startswith("gamma"):
                raise InvalidSpec(f"unexpected key {key!r}")
            try:
                squared[int(key[5:])] = float(val)
            except ValueError as exc:
                raise InvalidSpec(f"bad key {key!r}") from exc
        return cls.from_squared(squared)

    @classmethod
    def parse(cls, text: str) -> "MixtureSpec":
        """Parse ``"3:0.5,4:0.5"`` (degree:gamma_p^2), or a bare degree ``"3"``,
        or a JSON object."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_json(text)
        if ":" not in text:
            try:
                return cls.pure(int(text))
            except ValueError as exc:
                raise InvalidSpec(f"cannot parse spec {text!r}") from exc
        squared = {}
        for item in text.split(","):
            try:
                p, v = item.split(":")
                squared[int(p)] = float(v)
            except ValueError as exc:
                raise InvalidSpec(f"cannot parse spec item {item!r}") from exc
        return cls.from_squared(squared)

    def to_json(self) -> dict:
        return {f"gamma{p}": g * g for p, g in self.coeffs.items()}

    def to_text(self) -> str:
        return ",".join(f"{p}:{g * g!r}" for p, g in self.coeffs.items())

    # -- accessors ---------------------------------------------------------

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(self.coeffs)

    @property
    def gamma2(self) -> dict[int, float]:
        return {p: g * g for p, g in self.coeffs.items()}

    @property
    def is_pure(self) -> bool:
        return len(self.coeffs) == 1

    @property
    def pure_degree(self) -> int | None:
        return self.degrees[0] if self.is_pure else None


@dataclass(frozen=True)
class DerivedMoments:
    xi1: float
    xip: float
    xipp: float
    g_value: float
    klass: MixtureClass
    is_pure: bool


def xi_eval(spec: MixtureSpec, x: float) -> float:
    return sum(g2 * x**p for p, g2 in spec.gamma2.items())


def xi_derivative(spec: MixtureSpec, x: float, order: int = 1) -> float:
    total = 0.0
    for p, g2 in spec.gamma2.items():
        if order > p:
            continue
        falling = math.perm(p, order)
        total += g2 * falling * x ** (p - order)
    return total


def g_function(xip: float, xipp: float) -> float:
    """G(xi', xi'') whose sign decides pure-like / critical / full."""
    return (math.log(xipp / xip)
            - (xipp - xip) * (xipp - xip + xip**2) / (xipp * xip**2))


def classify_g(g: float) -> MixtureClass:
    if abs(g) <= CRITICAL_BAND:
        return MixtureClass.CRITICAL
    return MixtureClass.PURE_LIKE if g > 0 else MixtureClass.FULL


def derive_moments(spec: MixtureSpec) -> DerivedMoments:
    g2 = spec.gamma2
    xi1 = sum(g2.values())
    xip = sum(p * v for p, v in g2.items())
    xipp = sum(p * (p - 1) * v for p, v in g2.items())
    g = g_function(xip, xipp)
    return DerivedMoments(xi1=xi1, xip=xip, xipp=xipp, g_value=g,
                          klass=classify_g(g), is_pure=spec.is_pure)


def e_inf_thresholds(spec: MixtureSpec) -> tuple[float | None, float, float]:
    """Return ``(E_inf(p) or None, E'_inf(xi), E_inf(mixed))``."""
    m = derive_moments(spec)
    pure = None
    if spec.is_pure:
        p = spec.pure_degree
        pure = 2.0 * math.sqrt((p - 1) / p)
    prime = 2.0 * m.xip * math.sqrt(m.xipp) / (m.xip + m.xipp)
    mixed = (m.xipp + m.xip**2 - m.xip) / (m.xip * math.sqrt(m.xipp))
    return pure, prime, mixed
