"""Hyperbolic 3-space numerics in the upper half-space model.

Covers point distances, triangle areas, ball volumes, Margulis tube
geometry and the thick-part constant ``C1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

DEFAULT_EPSILON = 0.104


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError(f"height must be positive, got {self.z}")


@dataclass(frozen=True)
class TubeGeometry:
    radius: float
    core_length: float

    def __post_init__(self):
        if self.radius <= 0 or self.core_length <= 0:
            raise ValueError("tube radius and core length must be positive")

    @property
    def meridian_length(self) -> float:
        return 2 * math.pi * math.sinh(self.radius)

    @property
    def boundary_area(self) -> float:
        r = self.radius
        return 2 * math.pi * math.sinh(r) * math.cosh(r) * self.core_length

    @property
    def volume(self) -> float:
        return math.pi * math.sinh(self.radius) ** 2 * self.core_length


@dataclass(frozen=True)
class MargulisConfig:
    epsilon_tilde: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not 0 < self.epsilon_tilde <= 0.7:
            raise ValueError(f"epsilon_tilde must lie in (0, 0.7], got {self.epsilon_tilde}")


def distance(p: HPoint, q: HPoint) -> float:
    d2 = (p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2
    # acosh(1 + t) computed without cancellation for small t
    t = d2 / (2 * p.z * q.z)
    return math.log1p(t + math.sqrt(t * (t + 2)))


def ideal_triangle_area(angles: Sequence[float]) -> float:
    """Area of a hyperbolic triangle with the given interior angles (angle defect)."""
    if len(angles) != 3 or any(a < 0 for a in angles):
        raise ValueError("need three nonnegative angles")
    s = sum(angles)
    if s >= math.pi:
        raise ValueError(f"angle sum {s} is not below pi")
    return math.pi - s


def triangle_angles(a: float, b: float, c: float) -> tuple[float, float, float]:
    """Interior angles opposite sides ``a, b, c`` by the hyperbolic law of cosines."""

    def angle(opp, s1, s2):
        cos_t = (math.cosh(s1) * math.cosh(s2) - math.cosh(opp)) / (math.sinh(s1) * math.sinh(s2))
        return math.acos(max(-1.0, min(1.0, cos_t)))

    return angle(a, b, c), angle(b, c, a), angle(c, a, b)


def straight_complex_area_bound(ellP: int) -> float:
    """Area bound for the straight complex of a triangular presentation: pi per triangle."""
    if ellP % 3:
        raise ValueError("triangular presentations have length divisible by 3")
    return math.pi * (ellP // 3)


def ball_volume(r: float) -> float:
    if r <= 0:
        raise ValueError("radius must be positive")
    if r < 1e-2:
        # series of sinh(2r) - 2r avoids cancellation
        x = 2 * r
        return math.pi * (x**3 / 6 + x**5 / 120 + x**7 / 5040 + x**9 / 362880)
    return math.pi * (math.sinh(2 * r) - 2 * r)


def c1(cfg: MargulisConfig) -> float:
    e = cfg.epsilon_tilde
    return 2 * e * (math.pi + 2) / ball_volume(e / 4)


def c1_tight(cfg: MargulisConfig) -> float:
    """``C1`` with each covering ball contributing its own diameter ``eps/2``."""
    e = cfg.epsilon_tilde
    return (e / 2) * (math.pi + 2) / ball_volume(e / 4)


def deep_tube_bound(C: float, ellP: float, c1_value: float) -> float:
    """Depth guaranteed for some Margulis tube when ``diam(M) >= C * ellP``."""
    if not C > c1_value + 1:
        raise ValueError(f"C={C} must exceed C1 + 1 = {c1_value + 1}")
    return 0.5 * (C - 1) * ellP


def deep_tube_bound_from_volume(diam: float, vol: float, c1_value: float) -> float:
    return 0.5 * (diam - c1_value * vol)


def log_sinh(x: float) -> float:
    if x <= 0:
        raise ValueError("x must be positive")
    return x + math.log1p(-math.exp(-2 * x)) - math.log(2)


def meridian_lower_bound(C: float, ellP: float) -> float:
    """``2 pi sinh(C * ellP / 2)``; ``inf`` when the value overflows a float."""
    if C <= 0 or ellP <= 0:
        raise ValueError("C and ellP must be positive")
    try:
        return 2 * math.pi * math.sinh(0.5 * C * ellP)
    except OverflowError:
        return math.inf


def meridian_exceeds_short_boundary(C: float, ellP: float) -> bool:
    """Whether every meridian power is longer than the ``2 pi ellP`` boundary budget."""
    return log_sinh(0.5 * C * ellP) > math.log(ellP)


def tube_area_volume_ratio(L: float) -> float:
    if L <= 0:
        raise ValueError("tube radius must be positive")
    return 2.0 / math.tanh(L)


def find_short_level(level_lengths: Sequence[float], total_area: float) -> float:
    """Pick a level ``s0`` in (0, 1) whose level-set length is below ``total_area``.

    ``level_lengths[i]`` is the length on the i-th of ``n`` equal cells of
    [0, 1]; the returned ``s0`` is that cell's midpoint.  Requires the
    coarea hypothesis ``integral <= total_area``.
    """
    vals = np.asarray(level_lengths, dtype=float)
    if vals.ndim != 1 or len(vals) == 0:
        raise ValueError("need a nonempty 1-d profile")
    if (vals < 0).any():
        raise ValueError("level lengths must be nonnegative")
    integral = float(vals.mean())
    if integral > total_area:
        raise ValueError(f"coarea hypothesis violated: integral {integral} > area {total_area}")
    idx = np.flatnonzero(vals < total_area)
    if len(idx) == 0:
        raise ValueError("profile is constant at the area; no strict short level exists")
    i = int(idx[0])
    return (i + 0.5) / len(vals)


# -- half-ball slack near a tube boundary ----------------------------------


def _ball_volume_in_cone(rho: float, t: float | None) -> float:
    # t = 1/sinh(L); t=None integrates the whole ball (used as a self-check)
    zc, R = math.cosh(rho), math.sinh(rho)

    def slice_area(z):
        a2 = R * R - (z - zc) ** 2
        if a2 <= 0:
            return 0.0
        a = math.sqrt(a2)

        def chord(y):
            full = 2 * math.sqrt(max(a2 - y * y, 0.0))
            if t is None:
                return full
            q = z * z - (y * t) ** 2
            if q <= 0:
                return 0.0
            # u <= (sqrt(q) - 1) / t, written without cancellation
            ub = (q - 1) / (t * (math.sqrt(q) + 1)) if t > 0 else math.copysign(math.inf, q - 1)
            return min(max(ub + full / 2, 0.0), full)

        val, _ = integrate.quad(chord, -a, a, epsabs=1e-11 * a2, epsrel=1e-8, limit=100)
        return val / z**3

    pts = [1.0] if t is not None and zc - R < 1.0 < zc + R else None
    with warnings.catch_warnings():
        # the clipped chord has kinks; quad still converges to ~1e-12 relative
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(
            slice_area, zc - R, zc + R, points=pts, epsabs=1e-10 * R**3, epsrel=1e-8, limit=100
        )
    return val


def ball_inside_tube_volume(rho: float, L: float) -> float:
    """Volume of ``B(x, rho)`` inside the tube of radius ``L`` for ``x`` on its boundary.

    The tube around the z-axis is the cone ``r <= z sinh(L)``; with ``x`` at
    ``(sinh L, 0, 1)`` the hyperbolic ball is the Euclidean ball of radius
    ``sinh(rho)`` centred at height ``cosh(rho)``.  Coordinates are shifted by
    ``sinh L`` so the integrand never overflows; for ``L`` past about 40 the
    cone coincides with the horoball ``z >= 1`` to double precision.
    """
    if rho <= 0 or L <= 0:
        raise ValueError("rho and L must be positive")
    t = 2 * math.exp(-L) / -math.expm1(-2 * L)  # 1 / sinh(L)
    return _ball_volume_in_cone(rho, t)


def half_ball_slack(rho: float, L: float) -> float:
    """``vol(B)/2 - vol(B inside tube)`` for a ball of radius ``rho`` centred on the tube boundary."""
    return 0.5 * ball_volume(rho) - ball_inside_tube_volume(rho, L)
