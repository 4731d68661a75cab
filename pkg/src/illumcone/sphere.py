"""Apex sets with two-sided angular constraints and the covering multiplicity of their caps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import stream
from .geometry import angles_to, as_direction, pairwise_angles, unit

ANGLE_TOL = 1e-12
CODE_TOL = 1e-10
MODES = ("exact_n2", "branch_and_bound", "heuristic")
MODE_ALIASES = {"bnb": "branch_and_bound"}


@dataclass
class AnnulusCode:
    dimension: int
    points: np.ndarray
    psi: float
    exhausted: bool = False
    trials: int = 0

    @property
    def upper(self) -> float:
        return math.pi - self.psi

    def __len__(self) -> int:
        return self.points.shape[0]

    def check(self, tol: float = CODE_TOL) -> bool:
        """Independent all-pairs re-check of the annulus constraint."""
        m = len(self)
        for i in range(m):
            for j in range(i + 1, m):
                c = float(np.clip(self.points[i] @ self.points[j], -1.0, 1.0))
                t = math.acos(c)
                if t < self.psi - tol or t > self.upper + tol:
                    return False
        return True

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "psi": self.psi,
                "points": [[float(c) for c in p] for p in self.points]}

    @classmethod
    def from_json(cls, data: dict) -> "AnnulusCode":
        pts = np.asarray(data["points"], dtype=float).reshape(-1, int(data["dimension"]))
        return cls(dimension=int(data["dimension"]), points=pts, psi=float(data["psi"]),
                   exhausted=bool(data.get("exhausted", False)), trials=int(data.get("trials", 0)))


@dataclass
class MultiplicityReport:
    phi: float
    max_multiplicity: int
    witness_direction: np.ndarray
    method: str
    certified_upper: bool
    clique_bound: int | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "phi": self.phi,
            "max_multiplicity": self.max_multiplicity,
            "witness_direction": [float(c) for c in self.witness_direction],
            "method": self.method,
            "certified_upper": self.certified_upper,
            "clique_bound": self.clique_bound,
            "notes": self.notes,
        }


def sample_uniform(n: int, count: int, seed: int = 0, key: tuple = ()) -> np.ndarray:
    """``count`` independent uniform points on the unit sphere in R^n (normalized Gaussians)."""
    if n < 2 or count < 1:
        raise ValueError("need n >= 2 and count >= 1")
    return unit(stream(seed, *key).standard_normal((count, n)))


def generate_annulus_code(n: int, psi: float, target: int, max_trials: int = 100_000, seed: int = 0,
                          candidates: np.ndarray | None = None, chunk: int = 4096) -> AnnulusCode:
    """Greedy rejection sampling of points with pairwise spherical distances in [psi, pi - psi].

    Candidates are scanned in sample order and accepted when compatible with
    everything accepted so far. Stops at ``target`` points or after
    ``max_trials`` candidates, in which case ``exhausted`` is set.
    ``candidates`` replaces the random stream with a fixed list.
    """
    if not 0 < psi < math.pi / 2:
        raise ValueError("psi must lie in (0, pi/2)")
    if candidates is not None:
        cand_all = np.asarray(candidates, dtype=float)
        max_trials = min(max_trials, cand_all.shape[0])
    rng = stream(seed, 0)
    cos_lo = math.cos(psi)       # dot <= cos(psi)
    cos_hi = math.cos(math.pi - psi)  # dot >= -cos(psi)
    accepted: list[np.ndarray] = []
    trials = 0
    while len(accepted) < target and trials < max_trials:
        k = min(chunk, max_trials - trials)
        if candidates is not None:
            block = cand_all[trials:trials + k]
        else:
            block = unit(rng.standard_normal((k, n)))
        i = 0
        while i < k and len(accepted) < target:
            rest = block[i:]
            if accepted:
                dots = rest @ np.asarray(accepted).T
                ok = np.all((dots <= cos_lo + 1e-15) & (dots >= cos_hi - 1e-15), axis=1)
                hits = np.flatnonzero(ok)
            else:
                hits = np.array([0])
            if hits.size == 0:
                i = k
                break
            j = int(hits[0])
            accepted.append(rest[j].copy())
            i += j + 1
        trials += i
    pts = np.asarray(accepted).reshape(-1, n)
    return AnnulusCode(dimension=n, points=pts, psi=psi, exhausted=len(accepted) < target, trials=trials)


def cap_multiplicity(points, phi: float, ell, tol: float = ANGLE_TOL) -> int:
    """Number of caps C(p, phi) containing ``ell``; boundary inclusive."""
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return 0
    if phi >= math.pi:
        return int(np.atleast_2d(P).shape[0])
    return int(np.count_nonzero(angles_to(P, ell) <= phi + tol))


# -- exact n = 2 sweep ------------------------------------------------------

def _max_multiplicity_n2(points: np.ndarray, phi: float) -> tuple[int, np.ndarray]:
    ang = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2 * math.pi)
    starts = np.mod(ang - phi, 2 * math.pi)
    # unroll the circle twice; a point p in [2pi, 4pi) sees every arc covering it exactly once
    events = []
    for s in np.concatenate([starts, starts + 2 * math.pi]):
        events.append((s - ANGLE_TOL, 0))
        events.append((s + 2 * phi + ANGLE_TOL, 1))
    events.sort()
    depth = best = 0
    best_pos = 0.0
    for k, (pos, kind) in enumerate(events):
        depth += 1 if kind == 0 else -1
        if depth > best:
            best = depth
            best_pos = 0.5 * (pos + events[k + 1][0])
    return best, np.array([math.cos(best_pos), math.sin(best_pos)])


# -- common-point feasibility of a set of caps --------------------------------

def min_norm_point(C: np.ndarray, tol: float = 1e-14, max_iter: int = 500) -> tuple[np.ndarray, np.ndarray]:
    """Point of minimum norm in the convex hull of the rows of ``C`` (Wolfe's algorithm).

    Returns the point and its convex weights.
    """
    C = np.asarray(C, dtype=float)
    m = C.shape[0]
    sq = np.einsum("ij,ij->i", C, C)
    j0 = int(np.argmin(sq))
    S = [j0]
    lam = np.array([1.0])
    x = C[j0].copy()
    for _ in range(max_iter):
        g = C @ x
        j = int(np.argmin(g))
        if g[j] >= x @ x - tol * max(1.0, sq.max()) or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            P = C[S]
            k = len(S)
            A = np.zeros((k + 1, k + 1))
            A[:k, :k] = P @ P.T
            A[:k, k] = 1.0
            A[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            mu = np.linalg.lstsq(A, rhs, rcond=None)[0][:k]
            if np.all(mu > 1e-15):
                lam = mu
                x = mu @ P
                break
            neg = mu <= 1e-15
            theta = np.min(lam[neg] / (lam[neg] - mu[neg]))
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-15
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ C[S]
    w = np.zeros(m)
    w[S] = lam
    return x, w


def _ascent(C: np.ndarray, start: np.ndarray, steps: int = 400) -> tuple[np.ndarray, float]:
    """Projected subgradient ascent of min_i <l, c_i> over the unit sphere."""
    ell = unit(start)
    best = ell
    best_val = float((C @ ell).min())
    step = 0.5
    for _ in range(steps):
        i = int(np.argmin(C @ ell))
        ell = unit(ell + step * (C[i] - (C[i] @ ell) * ell))
        val = float((C @ ell).min())
        if val > best_val:
            best, best_val = ell, val
        step *= 0.985
    return best, best_val


def common_point(C: np.ndarray, phi: float, seed: int = 0, starts: int = 8) -> tuple[str, np.ndarray | None]:
    """Decide whether the caps C(c_i, phi) share a point.

    Returns ``("yes", witness)``, ``("no", None)`` with a duality certificate,
    or ``("unknown", None)`` when neither side could be established.

    For ``phi < pi/2`` the best common direction is the normalized min-norm
    point p of the hull of the centers, and ``|p|`` bounds min_i <l, c_i>
    from above for every unit ``l``. Otherwise multistart projected ascent
    from the normalized center sum looks for a witness.
    """
    cos_phi = math.cos(phi + ANGLE_TOL)
    p, _ = min_norm_point(C)
    r = float(np.linalg.norm(p))
    if r > 1e-12:
        ell = p / r
        if np.all(angles_to(C, ell) <= phi + ANGLE_TOL):
            return "yes", ell
    if cos_phi > 0 and r < cos_phi - 1e-13:
        return "no", None
    rng = stream(seed, 1, C.shape[0])
    s = C.sum(axis=0)
    init = [s if np.linalg.norm(s) > 1e-12 else rng.standard_normal(C.shape[1])]
    init += list(rng.standard_normal((starts - 1, C.shape[1])))
    for x0 in init:
        ell, _ = _ascent(C, x0)
        if np.all(angles_to(C, ell) <= phi + ANGLE_TOL):
            return "yes", ell
    return "unknown", None


def _max_subset(adj: np.ndarray, feasible) -> tuple[list[int], bool]:
    """Largest vertex set that is a clique in ``adj`` and passes ``feasible``.

    ``feasible(S)`` returns (ok, decided). Feasibility must be hereditary.
    Returns the best set and whether every rejection was decided.
    """
    m = adj.shape[0]
    order = sorted(range(m), key=lambda v: -int(adj[v].sum()))
    best: list[int] = []
    exact = True

    def color_bound(P: list[int]) -> int:
        colors: list[list[int]] = []
        for v in P:
            for c in colors:
                if not any(adj[v, u] for u in c):
                    c.append(v)
                    break
            else:
                colors.append([v])
        return len(colors)

    def expand(S: list[int], P: list[int]):
        nonlocal best, exact
        if len(S) > len(best):
            best = list(S)
        if not P or len(S) + color_bound(P) <= len(best):
            return
        for idx, v in enumerate(P):
            if len(S) + len(P) - idx <= len(best):
                return
            T = S + [v]
            ok, decided = feasible(T)
            if not decided:
                exact = False
            if not ok:
                continue
            expand(T, [u for u in P[idx + 1:] if adj[v, u]])

    expand([], order)
    return sorted(best), exact


def candidate_directions(points: np.ndarray, seed: int = 0, n_random: int = 10_000) -> np.ndarray:
    """Cap centers, normalized pairwise center sums, and seeded uniform directions."""
    P = np.asarray(points, dtype=float)
    m, n = P.shape
    parts = [P]
    if m > 1:
        iu = np.triu_indices(m, k=1)
        sums = P[iu[0]] + P[iu[1]]
        norms = np.linalg.norm(sums, axis=1)
        parts.append(sums[norms > 1e-9] / norms[norms > 1e-9, None])
    if n_random:
        parts.append(sample_uniform(n, n_random, seed=seed, key=(2,)))
    return np.vstack(parts)


def best_candidate(points: np.ndarray, phi: float, candidates: np.ndarray, chunk: int = 4096) -> tuple[int, np.ndarray]:
    cos_phi = math.cos(phi + ANGLE_TOL)
    best, arg = -1, 0
    for s in range(0, candidates.shape[0], chunk):
        counts = np.count_nonzero(candidates[s:s + chunk] @ points.T >= cos_phi, axis=1)
        k = int(np.argmax(counts))
        if counts[k] > best:
            best, arg = int(counts[k]), s + k
    ell = candidates[arg]
    # settle the count on exact angles
    return cap_multiplicity(points, phi, ell), ell


def max_multiplicity(points, phi: float, mode: str = "heuristic", seed: int = 0,
                     bnb_limit: int = 30, n_random: int = 10_000) -> MultiplicityReport:
    """Largest number of caps C(p, phi), p in ``points``, sharing a common point."""
    mode = MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    P = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = P.shape
    if mode == "exact_n2" and n != 2:
        raise ValueError("exact_n2 requires dimension 2")
    if mode == "branch_and_bound" and m > bnb_limit:
        raise ValueError(f"branch_and_bound limited to {bnb_limit} points, got {m}")
    if m == 0:
        return MultiplicityReport(phi, 0, np.eye(n)[0], mode, mode != "heuristic")
    if phi >= math.pi:
        return MultiplicityReport(phi, m, P[0].copy(), mode, mode != "heuristic")

    if mode == "exact_n2":
        _, ell = _max_multiplicity_n2(P, phi)
        # the witness sits mid-way through the deepest interval; recount with the shared membership test
        count = cap_multiplicity(P, phi, ell)
        return MultiplicityReport(phi, count, ell, mode, True)

    if mode == "heuristic":
        count, ell = best_candidate(P, phi, candidate_directions(P, seed=seed, n_random=n_random))
        return MultiplicityReport(phi, count, ell, mode, False)

    adj = pairwise_angles(P) <= 2 * phi + ANGLE_TOL
    np.fill_diagonal(adj, False)
    clique, _ = _max_subset(adj, lambda S: (True, True))
    witnesses: dict[tuple, np.ndarray] = {}

    def feasible(S):
        status, ell = common_point(P[S], phi, seed=seed)
        if status == "yes":
            witnesses[tuple(sorted(S))] = ell
        return status == "yes", status != "unknown"

    best, exact = _max_subset(adj, feasible)
    ell = witnesses.get(tuple(best), P[best[0]] if best else P[0])
    count = cap_multiplicity(P, phi, ell)
    notes = []
    if len(best) == len(clique):
        notes.append("matches pairwise-clique bound")
    elif exact:
        notes.append("larger subsets excluded by min-norm duality certificates")
    else:
        notes.append("some subsets undecided; upper bound not certified")
    return MultiplicityReport(phi, max(count, len(best)), ell, mode,
                              certified_upper=exact or len(best) == len(clique),
                              clique_bound=len(clique), notes=notes)
