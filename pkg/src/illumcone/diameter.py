"""Pairwise sufficient conditions for the union of cones to have diameter d, and a sampled oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Cone, ConeParams, angle, as_direction, cone_extreme_points, pairwise_angles

ZERO_ANGLE = 1e-12

# The argument bounding distances between two base circles needs them to be
# *at most* d; the inequality chain supports nothing else.
NORMALIZED_READING = "base-to-base distances are required to be at most d"


@dataclass
class PairVerdict:
    ok: bool
    failed_condition: str | None
    slack: dict[str, float]


@dataclass
class Configuration:
    """Apex set X on the unit sphere with its annulus bound psi and cone parameters."""

    apexes: np.ndarray
    params: ConeParams
    psi: float | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.apexes, dtype=float))
        for row in a:
            as_direction(row)
        self.apexes = a

    @property
    def dimension(self) -> int:
        return self.apexes.shape[1]

    def __len__(self) -> int:
        return self.apexes.shape[0]


@dataclass
class DiameterVerdict:
    ok: bool
    n_pairs: int
    failures: list[dict] = field(default_factory=list)
    min_slack: dict[str, float] = field(default_factory=dict)
    theta_range: tuple[float, float] | None = None
    annulus_implication: dict | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "n_pairs": self.n_pairs,
            "failures": self.failures,
            "min_slack": self.min_slack,
            "theta_range": list(self.theta_range) if self.theta_range else None,
            "annulus_implication": self.annulus_implication,
            "notes": self.notes,
        }


def pair_slacks(theta, params: ConeParams) -> dict:
    """Signed margins of the three pairwise conditions at spherical distance ``theta`` (scalar or array)."""
    theta = np.asarray(theta, dtype=float)
    R, d, beta = params.R, params.d, params.beta
    cond1 = d - 2.0 * np.sin(theta / 2.0)
    cond2 = theta - 2.0 * beta
    if 2.0 * R <= d:
        cond3 = np.full_like(theta, math.inf)
    else:
        cond3 = (2.0 * math.asin(d / (2.0 * R)) - 2.0 * beta) - theta
    return {"cond1": cond1, "cond2": cond2, "cond3": cond3}


def check_pair(x, y, params: ConeParams) -> PairVerdict:
    x = as_direction(x)
    y = as_direction(y)
    if x.shape != y.shape:
        raise ValueError("apexes have different dimensions")
    theta = angle(x, y)
    if theta < ZERO_ANGLE:
        raise ValueError("coincident apexes")
    slack = {k: float(v) for k, v in pair_slacks(theta, params).items()}
    failed = next((k for k in ("cond1", "cond2", "cond3") if slack[k] < 0), None)
    return PairVerdict(ok=failed is None, failed_condition=failed, slack=slack)


def verify_configuration(config: Configuration, max_failures: int = 20) -> DiameterVerdict:
    """Check every apex pair against the three conditions.

    Boundary equalities count as satisfied. Also evaluates whether the
    annulus bound psi alone implies the distance condition at the widest
    admissible angle pi - psi.
    """
    params = config.params
    X = config.apexes
    m = len(config)
    verdict = DiameterVerdict(ok=True, n_pairs=m * (m - 1) // 2, notes=[NORMALIZED_READING])
    if config.psi is not None:
        psi = config.psi
        widest = 2.0 * math.cos(psi / 2.0)
        verdict.annulus_implication = {
            "psi": psi,
            "chord_at_pi_minus_psi": widest,
            "cond1_implied": bool(widest <= params.d),
            "cond2_implied": bool(psi >= 2.0 * params.beta),
            "cond3_implied": bool(2.0 * params.R <= params.d
                                  or math.pi - psi <= 2.0 * math.asin(params.d / (2.0 * params.R)) - 2.0 * params.beta),
        }
    if m < 2:
        return verdict

    theta = pairwise_angles(X)
    iu = np.triu_indices(m, k=1)
    th = theta[iu]
    if th.min() < ZERO_ANGLE:
        k = int(np.argmin(th))
        raise ValueError(f"coincident apexes {int(iu[0][k])} and {int(iu[1][k])}")
    slacks = pair_slacks(th, params)
    verdict.theta_range = (float(th.min()), float(th.max()))
    verdict.min_slack = {k: float(v.min()) for k, v in slacks.items()}
    bad = np.zeros(th.shape, dtype=bool)
    for v in slacks.values():
        bad |= v < 0
    verdict.ok = not bool(bad.any())
    for k in np.flatnonzero(bad)[:max_failures]:
        i, j = int(iu[0][k]), int(iu[1][k])
        failed = [c for c in ("cond1", "cond2", "cond3") if slacks[c][k] < 0]
        verdict.failures.append({
            "pair": [i, j],
            "theta": float(th[k]),
            "conditions": failed,
            "slack": {c: float(slacks[c][k]) for c in failed},
        })
    return verdict


@dataclass
class DiameterEstimate:
    diameter: float
    witness: tuple[np.ndarray, np.ndarray]
    witness_owners: tuple[int, int]


def union_extreme_points(config: Configuration, resolution: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Stacked extreme-point samples of every cone and the index of the owning apex per row."""
    blocks = []
    owners = []
    for i, x in enumerate(config.apexes):
        pts = cone_extreme_points(Cone(x, config.params), resolution, seed=seed, key=(i,))
        blocks.append(pts)
        owners.append(np.full(pts.shape[0], i))
    return np.vstack(blocks), np.concatenate(owners)


def farthest_pair(points: np.ndarray, block: int = 2048) -> tuple[float, int, int]:
    """Exact maximum pairwise Euclidean distance of a point set, blockwise."""
    P = np.asarray(points, dtype=float)
    sq = np.einsum("ij,ij->i", P, P)
    best, bi, bj = -1.0, 0, 0
    for s in range(0, P.shape[0], block):
        Q = P[s:s + block]
        d2 = sq[s:s + block, None] + sq[None, :] - 2.0 * Q @ P.T
        k = int(np.argmax(d2))
        i, j = divmod(k, P.shape[0])
        if d2[i, j] > best:
            best, bi, bj = float(d2[i, j]), s + i, j
    # recompute the winner directly to avoid cancellation in the Gram form
    return float(np.linalg.norm(P[bi] - P[bj])), bi, bj


def diameter_oracle(config: Configuration, resolution: int, seed: int = 0) -> DiameterEstimate:
    """Largest distance between sampled extreme points (apexes and base circles) of the union of cones.

    Every sample lies on the union, so the estimate never exceeds the true diameter.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    pts, owners = union_extreme_points(config, resolution, seed=seed)
    dist, i, j = farthest_pair(pts)
    return DiameterEstimate(diameter=dist, witness=(pts[i], pts[j]),
                            witness_owners=(int(owners[i]), int(owners[j])))
