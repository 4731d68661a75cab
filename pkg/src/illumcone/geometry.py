"""Right circular cones with apex on the unit sphere and base circle on a concentric sphere.

A cone is fixed by four numbers: the radius ``R`` of the sphere carrying the
base circle, the apex-to-base-circle distance ``d``, the half-opening angle
``alpha`` between the axis and a generatrix, and the angular radius ``beta``
of the base cap on the ``R``-sphere, measured from the antipode of the apex.
Only ``R`` and ``d`` are free; the angles follow from the law of cosines in
the axial section (origin, apex, base point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import stream
from ._search import bisect

UNIT_TOL = 1e-12
ORTHO_TOL = 1e-10


class ConeDomainError(ValueError):
    """Raised when (R, d) does not describe a nondegenerate cone."""


def as_direction(v) -> np.ndarray:
    """Validate ``v`` as a unit vector of dimension >= 2 and return it as a float array."""
    a = np.asarray(v, dtype=float)
    if a.ndim != 1 or a.shape[0] < 2:
        raise ValueError(f"direction must be a vector of dimension >= 2, got shape {a.shape}")
    if abs(np.linalg.norm(a) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction is not a unit vector (norm {np.linalg.norm(a)!r})")
    return a


def unit(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def basis_vector(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def angle(u, v) -> float:
    """Spherical distance between unit vectors, accurate near 0 and pi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(2.0 * math.atan2(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def pairwise_angles(points: np.ndarray) -> np.ndarray:
    """Matrix of spherical distances between the rows of ``points``."""
    p = np.asarray(points, dtype=float)
    diff = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)
    summ = np.linalg.norm(p[:, None, :] + p[None, :, :], axis=-1)
    return 2.0 * np.arctan2(diff, summ)


def angles_to(points: np.ndarray, v) -> np.ndarray:
    """Spherical distances from each row of ``points`` to ``v``."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(v, dtype=float)
    return 2.0 * np.arctan2(np.linalg.norm(p - v, axis=-1), np.linalg.norm(p + v, axis=-1))


def tangent_basis(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to unit vector ``x``, as rows.

    Built from a Householder reflection taking e1 to -x, so the result is a
    deterministic function of ``x``; for ``x = e1`` it is ``e2, ..., en``.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    v = basis_vector(n, 0) + x if x[0] >= 0 else basis_vector(n, 0) - x
    H = np.eye(n) - 2.0 * np.outer(v, v) / float(v @ v)
    return H[1:].copy()


@dataclass(frozen=True)
class ConeParams:
    R: float
    d: float
    alpha: float
    beta: float

    @property
    def cap_radius(self) -> float:
        """Angular radius pi/2 - alpha of the cap of directions that may illuminate the apex."""
        return math.pi / 2 - self.alpha

    @property
    def base_chord(self) -> float:
        """Diameter 2 R sin(beta) of the base circle."""
        return 2.0 * self.R * math.sin(self.beta)

    @property
    def diameter_ok(self) -> bool:
        return self.base_chord <= self.d

    def as_dict(self) -> dict:
        return {"R": self.R, "d": self.d, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class SphericalCap:
    center: np.ndarray
    radius: float
    carrier: float = 1.0

    def __post_init__(self):
        if not 0 < self.radius < math.pi:
            raise ValueError(f"cap radius must lie in (0, pi), got {self.radius}")
        if self.carrier <= 0:
            raise ValueError("carrier radius must be positive")

    def contains(self, v, tol: float = 1e-12) -> bool:
        return angle(self.center, unit(v)) <= self.radius + tol


@dataclass(frozen=True)
class Cone:
    apex: np.ndarray
    params: ConeParams

    def __post_init__(self):
        object.__setattr__(self, "apex", as_direction(self.apex))

    @property
    def dimension(self) -> int:
        return self.apex.shape[0]


def derive_cone_params(R: float, d: float) -> ConeParams:
    """Half-opening angle and base-cap radius of the cone with base sphere radius ``R`` and slant ``d``.

    ``cos alpha = (1 - R^2 + d^2) / (2d)`` and ``cos beta = (d^2 - R^2 - 1) / (2R)``;
    with ``d = 2R`` these reduce to ``(3R^2 + 1) / (4R)`` and ``(3R^2 - 1) / (2R)``.
    """
    R = float(R)
    d = float(d)
    if not R > 0:
        raise ConeDomainError(f"R must be positive, got {R}")
    if not abs(R - 1.0) < d < R + 1.0:
        raise ConeDomainError(f"d={d} outside ({abs(R - 1.0)}, {R + 1.0}): degenerate or empty base circle")
    cos_alpha = (1.0 - R * R + d * d) / (2.0 * d)
    cos_beta = (d * d - R * R - 1.0) / (2.0 * R)
    if not (-1.0 <= cos_alpha <= 1.0 and -1.0 <= cos_beta <= 1.0):
        raise ConeDomainError(f"arccos argument out of range (cos alpha={cos_alpha}, cos beta={cos_beta})")
    if cos_beta <= 0.0:
        raise ConeDomainError(f"base cap radius beta >= pi/2 (cos beta={cos_beta})")
    return ConeParams(R=R, d=d, alpha=math.acos(cos_alpha), beta=math.acos(cos_beta))


@dataclass(frozen=True)
class OptimalConstants:
    R0: float
    d0: float
    alpha0: float
    beta0: float
    tau: float

    @property
    def params(self) -> ConeParams:
        return ConeParams(self.R0, self.d0, self.alpha0, self.beta0)


def closed_form_constants() -> OptimalConstants:
    """The optimal cone in closed form (radicals in sqrt(33))."""
    s = math.sqrt(33.0)
    R0 = math.sqrt((9.0 + s) / 2.0) / 3.0
    beta0 = math.acos(math.sqrt((15.0 + s) / 2.0) / 4.0)
    alpha0 = math.pi / 2 - 2.0 * beta0
    tau = math.sqrt((111.0 - s) / 6.0) / 4.0
    return OptimalConstants(R0, 2.0 * R0, alpha0, beta0, tau)


def _slack_on_diagonal(R: float) -> float:
    # 2 beta + alpha - pi/2 with d = 2R; decreasing from pi on (1/sqrt3, 1)
    p = derive_cone_params(R, 2.0 * R)
    return 2.0 * p.beta + p.alpha - math.pi / 2


def solve_optimal_R(tol: float = 1e-12) -> OptimalConstants:
    """Radius R0 for which the cone with d = 2R satisfies 2 beta + alpha = pi/2.

    Bisection on (1/sqrt(3), 1). At the root ``sin(2 beta) = cos(alpha)`` holds;
    that equation alone has a second root near 1/sqrt(3) where
    ``2 beta = pi/2 + alpha``, which is why the bracketed function is the
    angle sum rather than the sine identity.
    """
    lo = 1.0 / math.sqrt(3.0) + 1e-6
    hi = 1.0 - 1e-9
    R0 = bisect(_slack_on_diagonal, lo, hi, tol=tol)
    p = derive_cone_params(R0, 2.0 * R0)
    return OptimalConstants(R0=R0, d0=p.d, alpha0=p.alpha, beta0=p.beta, tau=1.0 / math.cos(p.alpha))


def optimum_params() -> ConeParams:
    return solve_optimal_R().params


def base_circle_point(cone: Cone, tangent_direction) -> np.ndarray:
    """Point ``R(-cos(beta) x + sin(beta) t)`` of the base circle of the cone at apex ``x``."""
    t = as_direction(tangent_direction)
    x = cone.apex
    if t.shape != x.shape:
        raise ValueError("tangent and apex dimensions differ")
    if abs(float(t @ x)) > ORTHO_TOL:
        raise ValueError(f"tangent direction not orthogonal to apex (dot {float(t @ x):.3g})")
    p = cone.params
    return p.R * (-math.cos(p.beta) * x + math.sin(p.beta) * t)


def tangent_samples(x: np.ndarray, resolution: int, seed: int = 0, key: tuple = ()) -> np.ndarray:
    """Unit tangent directions at ``x`` used to sample a base circle.

    n = 2: the two tangents. n = 3: ``resolution`` equally spaced angles, so
    doubling the resolution keeps every earlier sample. n > 3: seeded Gaussian
    directions projected onto the tangent space; a larger resolution extends
    the same stream.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    B = tangent_basis(x)
    if n == 2:
        return np.vstack([B[0], -B[0]])
    if n == 3:
        t = 2.0 * math.pi * np.arange(resolution) / resolution
        return np.cos(t)[:, None] * B[0] + np.sin(t)[:, None] * B[1]
    g = stream(seed, *key).standard_normal((resolution, n - 1))
    return unit(g @ B)


def base_circle_points(cone: Cone, tangents: np.ndarray) -> np.ndarray:
    p = cone.params
    return p.R * (-math.cos(p.beta) * cone.apex[None, :] + math.sin(p.beta) * np.asarray(tangents))


def cone_extreme_points(cone: Cone, resolution: int, seed: int = 0, key: tuple = ()) -> np.ndarray:
    """Apex followed by sampled base-circle points, one row per point.

    The cone is the convex hull of these, so they suffice for diameter bounds.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    tangents = tangent_samples(cone.apex, resolution, seed=seed, key=key)
    return np.vstack([cone.apex[None, :], base_circle_points(cone, tangents)])
