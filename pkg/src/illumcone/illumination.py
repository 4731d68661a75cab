"""Which directions can illuminate a cone apex, and counting lower bounds on the illumination number.

An apex x of a cone Q(x) lying on the boundary of a convex body of diameter
d can only be illuminated by directions in the cap C(-x, pi/2 - alpha). The
lower bound follows by counting: if no direction lies in more than M of the
caps C(-x, phi), at least ceil(|X| / M) directions are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._search import golden_max
from .diameter import Configuration, verify_configuration
from .geometry import (Cone, ConeParams, SphericalCap, angle, as_direction, base_circle_points,
                       tangent_samples, unit)
from .sphere import ANGLE_TOL, candidate_directions, max_multiplicity

DEFAULT_EPSILON = 1e-3
MAX_ALPHA = math.pi / 6


@dataclass(frozen=True)
class IlluminationCap:
    cap: SphericalCap

    @property
    def center(self) -> np.ndarray:
        return self.cap.center

    @property
    def radius(self) -> float:
        return self.cap.radius


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha <= MAX_ALPHA + 1e-15:
        raise ValueError(f"alpha must lie in (0, pi/6], got {alpha}")


def illumination_cap(apex, alpha: float) -> IlluminationCap:
    """Cap C(-apex, pi/2 - alpha) holding every direction that can illuminate the apex."""
    _check_alpha(alpha)
    x = as_direction(apex)
    return IlluminationCap(SphericalCap(center=-x, radius=math.pi / 2 - alpha, carrier=1.0))


def is_blocked(apex, ell, params: ConeParams) -> tuple[bool, float]:
    """Whether ``ell`` lies strictly outside the illumination cap of ``apex``, with the signed angular margin."""
    _check_alpha(params.alpha)
    x = as_direction(apex)
    ell = as_direction(ell)
    margin = angle(ell, -x) - (math.pi / 2 - params.alpha)
    return margin > 0, margin


def _gain(x: np.ndarray, ell: np.ndarray, params: ConeParams, tangents: np.ndarray) -> np.ndarray:
    # <ell, x - b> for base points b(t)
    b = base_circle_points(Cone(x, params), tangents)
    return (x - b) @ ell


def witness_search(apex, ell, params: ConeParams, resolution: int = 256, seed: int = 0) -> tuple[np.ndarray, float]:
    """Base-circle point b maximizing <ell, apex - b>, and that maximum.

    Uniform sampling of the circle followed by a golden-section refinement on
    the great circle of tangents through the best sample.
    """
    x = as_direction(apex)
    ell = as_direction(ell)
    n = x.shape[0]
    T = tangent_samples(x, resolution, seed=seed)
    g = _gain(x, ell, params, T)
    k = int(np.argmax(g))
    t_best = T[k]
    if n >= 3:
        # refine along the great circle through t_best heading up the gradient -ell_perp
        grad = -(ell - (ell @ x) * x)
        grad = grad - (grad @ t_best) * t_best
        if np.linalg.norm(grad) > 1e-15:
            u = grad / np.linalg.norm(grad)
            axial = (1.0 + params.R * math.cos(params.beta)) * float(ell @ x)
            radial = params.R * math.sin(params.beta)
            lt, lu = float(ell @ t_best), float(ell @ u)

            def f(s):
                return axial - radial * (math.cos(s) * lt + math.sin(s) * lu)

            # a sinusoid in s whose peak lies in [0, pi] once u points uphill
            s, fs = golden_max(f, 0.0, math.pi, iters=90)
            if fs > g[k]:
                t_best = unit(math.cos(s) * t_best + math.sin(s) * u)
    b = base_circle_points(Cone(x, params), t_best[None, :])[0]
    return b, float((x - b) @ ell)


def blocking_witness(apex, ell, params: ConeParams, resolution: int = 256, seed: int = 0) -> np.ndarray | None:
    """A base point b with <ell, apex - b> > 0, or None.

    With such a b, apex + t*ell is farther than d from b for small t > 0, so
    no body of diameter d containing the cone is entered in direction ell.
    """
    _check_alpha(params.alpha)
    b, value = witness_search(apex, ell, params, resolution=resolution, seed=seed)
    return b if value > 0 else None


@dataclass
class Certificate:
    n_apexes: int
    dimension: int
    params: ConeParams
    epsilon: float
    phi: float
    diameter: dict
    multiplicity: dict
    lower_bound: int
    certified: bool
    caveats: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "config": {"n_apexes": self.n_apexes, "dimension": self.dimension},
            "params": self.params.as_dict(),
            "verdicts": {"diameter": self.diameter},
            "epsilon": self.epsilon,
            "phi": self.phi,
            "multiplicity": self.multiplicity,
            "lower_bound": self.lower_bound,
            "certified": self.certified,
            "statement": "lower bound on the illumination number of every constant-width completion of the union of cones",
            "caveats": self.caveats,
        }


def _precondition_caveats(config: Configuration) -> list[str]:
    p = config.params
    out = []
    if p.alpha > MAX_ALPHA:
        out.append(f"alpha={p.alpha:.6g} exceeds pi/6; illumination caps not justified")
    if config.psi is not None and config.psi > p.cap_radius + 1e-9:
        out.append(f"psi={config.psi:.6g} exceeds pi/2 - alpha={p.cap_radius:.6g}")
    return out


def counting_lower_bound(config: Configuration, epsilon: float = DEFAULT_EPSILON, mode: str = "heuristic",
                         seed: int = 0) -> Certificate:
    """ceil(|X| / M) where M is the covering multiplicity of the caps C(-x, pi/2 - alpha + epsilon)."""
    p = config.params
    caveats = _precondition_caveats(config)
    dv = verify_configuration(config)
    if not dv.ok:
        caveats.append("configuration fails the pairwise diameter conditions")
    phi = p.cap_radius + epsilon
    report = max_multiplicity(-config.apexes, phi, mode=mode, seed=seed)
    mult = max(report.max_multiplicity, 1)
    lower = math.ceil(len(config) / mult)
    if not report.certified_upper:
        caveats.append(f"multiplicity from {report.method} is not a certified maximum; bound is an estimate")
    return Certificate(
        n_apexes=len(config), dimension=config.dimension, params=p, epsilon=epsilon, phi=phi,
        diameter=dv.as_dict(), multiplicity=report.as_dict(), lower_bound=lower,
        certified=report.certified_upper and not caveats, caveats=caveats,
    )


def greedy_apex_cover(config: Configuration, epsilon: float = DEFAULT_EPSILON, seed: int = 0,
                      n_random: int = 10_000) -> np.ndarray:
    """Greedy set of directions hitting every apex's illumination cap C(-x, pi/2 - alpha).

    Uses the candidate pool of the heuristic multiplicity search with the same
    seed, so its size never drops below the heuristic lower bound.
    """
    caps = -config.apexes
    radius = config.params.cap_radius
    pool = candidate_directions(caps, seed=seed, n_random=n_random)
    member = pool @ caps.T >= math.cos(radius + ANGLE_TOL)
    uncovered = np.ones(len(config), dtype=bool)
    chosen = []
    while uncovered.any():
        gain = np.count_nonzero(member[:, uncovered], axis=1)
        k = int(np.argmax(gain))
        chosen.append(pool[k])
        uncovered &= ~member[k]
    return np.asarray(chosen).reshape(-1, config.dimension)
