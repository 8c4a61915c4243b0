"""Hyperbolic-disk geometry for the threshold random hyperbolic graph model.

Points live on a disk of radius ``R = 2 ln n + C``. Radii follow the density
``alpha sinh(alpha r) / (cosh(alpha R) - 1)`` and angles are uniform. Two
points are adjacent iff their hyperbolic distance is below ``R``.

Scalar kernels that the sweep engine also needs are compiled with numba and
remain callable from Python, so both paths share one implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from numba import njit

TWO_PI = 2.0 * math.pi
LN2 = math.log(2.0)


def radius_from_size(n: int, C: float) -> float:
    """Disk radius ``R = 2 ln n + C``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * math.log(n) + C


def radial_const_from_avg_degree(d_bar: float, alpha: float) -> float:
    """Invert the leading term of the average-degree formula for ``C``."""
    if alpha <= 0.5:
        raise ValueError("alpha must exceed 1/2")
    if d_bar <= 0:
        raise ValueError("average degree must be positive")
    return -2.0 * math.log(d_bar * math.pi / 2.0 * ((alpha - 0.5) / alpha) ** 2)


def expected_avg_degree(C: float, alpha: float) -> float:
    """Leading-order average degree ``(2/pi) (alpha/(alpha-1/2))^2 e^{-C/2}``."""
    if alpha <= 0.5:
        raise ValueError("alpha must exceed 1/2")
    return 2.0 / math.pi * (alpha / (alpha - 0.5)) ** 2 * math.exp(-C / 2.0)


def alpha_from_gamma(gamma: float) -> float:
    if gamma <= 2.0:
        raise ValueError("gamma must exceed 2")
    return (gamma - 1.0) / 2.0


def gamma_from_alpha(alpha: float) -> float:
    if alpha <= 0.5:
        raise ValueError("alpha must exceed 1/2")
    return 2.0 * alpha + 1.0


@dataclass(frozen=True)
class ModelParams:
    """Parameters that fully determine a generated graph."""

    n: int
    alpha: float
    C: float
    seed: int = 0
    P: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.P < 1:
            raise ValueError("P must be >= 1")
        if not self.alpha > 0.5:
            raise ValueError("alpha must exceed 1/2")
        if not self.R > 0:
            raise ValueError(f"disk radius must be positive (R={self.R})")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def R(self) -> float:
        return radius_from_size(self.n, self.C)

    @property
    def gamma(self) -> float:
        return gamma_from_alpha(self.alpha)

    @property
    def expected_avg_degree(self) -> float:
        return expected_avg_degree(self.C, self.alpha)

    @classmethod
    def create(
        cls,
        n: int,
        *,
        alpha: float | None = None,
        gamma: float | None = None,
        avg_degree: float | None = None,
        C: float | None = None,
        seed: int = 0,
        P: int = 1,
    ) -> "ModelParams":
        """Build from exactly one of alpha/gamma and one of avg_degree/C."""
        if (alpha is None) == (gamma is None):
            raise ValueError("give exactly one of alpha, gamma")
        if (avg_degree is None) == (C is None):
            raise ValueError("give exactly one of avg_degree, C")
        a = alpha if alpha is not None else alpha_from_gamma(gamma)
        c = C if C is not None else radial_const_from_avg_degree(avg_degree, a)
        return cls(n=n, alpha=a, C=c, seed=seed, P=P)


@dataclass(frozen=True)
class PolarPoint:
    r: float
    theta: float


@dataclass(frozen=True)
class PrecomputedPoint:
    """A point with the cached terms used by the trig-free adjacency test."""

    id: int
    point: PolarPoint
    coth_r: float
    inv_sinh_r: float
    cos_theta: float
    sin_theta: float

    @classmethod
    def from_polar(cls, id: int, r: float, theta: float) -> "PrecomputedPoint":
        if not r > 0:
            raise ValueError("radius must be positive for precomputation")
        s = math.sinh(r)
        return cls(id, PolarPoint(r, theta), math.cosh(r) / s, 1.0 / s,
                   math.cos(theta), math.sin(theta))


def radial_density(r: float, alpha: float, R: float) -> float:
    # cosh(x) - 1 == 2 sinh(x/2)^2, which avoids cancellation for small x
    return alpha * math.sinh(alpha * r) / (2.0 * math.sinh(alpha * R / 2.0) ** 2)


def radial_cdf(r: float, alpha: float, R: float) -> float:
    """Exact mass of the ball of radius ``r`` around the origin."""
    return (math.sinh(alpha * r / 2.0) / math.sinh(alpha * R / 2.0)) ** 2


def annulus_mass(lo: float, hi: float, alpha: float, R: float) -> float:
    """``(cosh(alpha hi) - cosh(alpha lo)) / (cosh(alpha R) - 1)`` without cancellation."""
    num = 2.0 * math.sinh(alpha * (hi + lo) / 2.0) * math.sinh(alpha * (hi - lo) / 2.0)
    return num / (2.0 * math.sinh(alpha * R / 2.0) ** 2)


def hyperbolic_distance(p: PolarPoint, q: PolarPoint) -> float:
    # cosh r cosh s - sinh r sinh s cos(t) rewritten as a sum of nonnegative
    # terms: cosh(r - s) + 2 sinh r sinh s sin^2(t/2)
    h = math.sin((p.theta - q.theta) / 2.0)
    arg = math.cosh(p.r - q.r) + 2.0 * math.sinh(p.r) * math.sinh(q.r) * h * h
    if arg < 1.0:
        assert 1.0 - arg < 1e-9
        arg = 1.0
    return math.acosh(arg)


@njit(cache=True)
def angular_deviation(r: float, b: float, R: float) -> float:
    """Largest angle at which points at radii ``r`` and ``b`` are within ``R``.

    Evaluated as ``2 atan2(sqrt(cosh R - cosh(r-b)), sqrt(cosh(r+b) - cosh R))``
    with both differences written as products of sinh terms, which is exact
    at the ``r + b = R`` branch and keeps precision for tiny angles.
    """
    if r + b < R:
        return math.pi
    if abs(r - b) >= R:
        return 0.0
    num = math.sqrt(math.sinh((R + r - b) / 2.0)) * math.sqrt(math.sinh((R - r + b) / 2.0))
    den = math.sqrt(math.sinh((r + b + R) / 2.0)) * math.sqrt(math.sinh((r + b - R) / 2.0))
    return 2.0 * math.atan2(num, den)


@njit(cache=True)
def angular_deviation_precomputed(coth_r: float, inv_sinh_r: float,
                                  coth_l: float, cosh_r_over_sinh_l: float) -> float:
    """Arccos form using per-point and per-boundary constants.

    Loses relative precision for very small angles; the sweep uses
    :func:`angular_deviation` and this form is kept for cross-checks.
    """
    x = coth_r * coth_l - cosh_r_over_sinh_l * inv_sinh_r
    if x < -1.0:
        x = -1.0
    elif x > 1.0:
        x = 1.0
    return math.acos(x)


@njit(cache=True)
def adjacent_fields(cos_p: float, sin_p: float, coth_p: float, isinh_p: float,
                    cos_q: float, sin_q: float, coth_q: float, isinh_q: float,
                    cosh_R: float) -> bool:
    return cos_p * cos_q + sin_p * sin_q > coth_p * coth_q - cosh_R * isinh_p * isinh_q


def is_adjacent_precomputed(p: PrecomputedPoint, q: PrecomputedPoint, cosh_R: float) -> bool:
    return adjacent_fields(p.cos_theta, p.sin_theta, p.coth_r, p.inv_sinh_r,
                           q.cos_theta, q.sin_theta, q.coth_r, q.inv_sinh_r, cosh_R)


def overestimation_factor(x: float, alpha: float) -> float:
    """Candidate-mass overestimation of an annulus of height ``x``."""
    if not x > 0 or not alpha > 0.5:
        raise ValueError("need x > 0 and alpha > 1/2")
    return (alpha - 0.5) / alpha * math.expm1(alpha * x) / math.expm1((alpha - 0.5) * x)
