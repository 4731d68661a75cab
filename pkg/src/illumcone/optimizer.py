"""Feasible cone parameters and maximization of the exponential base tau = 1 / cos(alpha).

A pair (R, d) is feasible when some annulus bound psi makes every pairwise
diameter condition hold for apex pairs at angles in [psi, pi - psi] while
still leaving psi below the illumination-cap radius pi/2 - alpha.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._search import bisect_predicate, golden_max
from .geometry import ConeDomainError, ConeParams, derive_cone_params

MARGIN_TOL = 1e-9
MAX_ALPHA = math.pi / 6
TRACE_HEADER = ["R", "d", "alpha", "beta", "psi_required", "margin", "tau", "feasible"]


@dataclass
class FeasibilityRecord:
    R: float
    d: float
    alpha: float = math.nan
    beta: float = math.nan
    psi_required: float = math.nan
    psi_cap: float = math.nan
    feasible: bool = False
    binding: str = "domain"
    tau: float = math.nan
    caveats: list[str] = field(default_factory=list)

    @property
    def margin(self) -> float:
        return self.psi_cap - self.psi_required

    def as_dict(self) -> dict:
        out = asdict(self)
        out["margin"] = self.margin
        return out

    def row(self) -> list:
        return [self.R, self.d, self.alpha, self.beta, self.psi_required, self.margin, self.tau, int(self.feasible)]


def psi_required(params: ConeParams) -> tuple[float, str]:
    """Smallest annulus bound psi under which all pairwise diameter conditions hold, and which one binds."""
    R, d, beta = params.R, params.d, params.beta
    bounds = {"cond2": 2.0 * beta}
    if d < 2.0:
        bounds["cond1"] = math.pi - 2.0 * math.asin(d / 2.0)
    if d < 2.0 * R:
        bounds["cond3"] = math.pi - 2.0 * math.asin(d / (2.0 * R)) + 2.0 * beta
    binding = max(bounds, key=bounds.get)
    return bounds[binding], binding


def evaluate(R: float, d: float, margin_tol: float = MARGIN_TOL) -> FeasibilityRecord:
    try:
        p = derive_cone_params(R, d)
    except ConeDomainError as exc:
        return FeasibilityRecord(R=float(R), d=float(d), caveats=[f"domain: {exc}"])
    psi, binding = psi_required(p)
    rec = FeasibilityRecord(R=p.R, d=p.d, alpha=p.alpha, beta=p.beta, psi_required=psi,
                            psi_cap=p.cap_radius, binding=binding, tau=1.0 / math.cos(p.alpha))
    if rec.margin < -margin_tol:
        rec.caveats.append("annulus bound exceeds illumination-cap radius")
    if p.alpha > MAX_ALPHA:
        rec.caveats.append("alpha exceeds pi/6")
    if not p.diameter_ok:
        rec.caveats.append("base circle wider than d")
    rec.feasible = not rec.caveats
    return rec


def _penalized(rec: FeasibilityRecord) -> float:
    # feasible: tau (> 1); infeasible: below any feasible value, rising as the violation shrinks
    if rec.feasible:
        return rec.tau
    if math.isnan(rec.alpha):
        return -1e6
    violation = max(0.0, -rec.margin) + max(0.0, rec.alpha - MAX_ALPHA)
    violation += max(0.0, 2.0 * rec.R * math.sin(rec.beta) - rec.d)
    return -violation


@dataclass
class SearchResult:
    best: FeasibilityRecord | None
    trace: list[FeasibilityRecord]
    refine_path: list[FeasibilityRecord] = field(default_factory=list)
    message: str = ""

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for rec in self.trace:
            w.writerow([_fmt(v) for v in rec.row()])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _axis(lo: float, hi: float, k: int) -> np.ndarray:
    if lo == hi:
        return np.array([float(lo)])
    return np.linspace(lo, hi, k)


def _scan(Rs: np.ndarray, ds_for, threads: int) -> list[FeasibilityRecord]:
    def row(R):
        return [evaluate(R, d) for d in ds_for(R)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(row, Rs))
    else:
        rows = [row(R) for R in Rs]
    return [rec for r in rows for rec in r]


def _boundary_d(R: float, d_lo: float, d_hi: float) -> float | None:
    """Smallest feasible d in [d_lo, d_hi] at fixed R; feasibility is monotone in d."""
    d_hi = min(d_hi, R + 1.0 - 1e-12)
    if d_hi < d_lo:
        return None
    if not evaluate(R, d_hi).feasible:
        return None
    if evaluate(R, d_lo).feasible:
        return d_lo
    return bisect_predicate(lambda d: evaluate(R, d).feasible, d_lo, d_hi, tol=1e-14)


def maximize_tau(R_range: tuple[float, float] = (0.7, 1.1), d_range: tuple[float, float] = (1.2, 2.2),
                 grid: tuple[int, int] = (256, 256), refine_iters: int = 20, slice: str | None = None,
                 threads: int = 1) -> SearchResult:
    """Grid scan of tau over the feasible region, then golden-section refinement.

    ``slice="d=2R"`` restricts the search to the diagonal; a degenerate range
    such as ``R_range=(1, 1)`` fixes that coordinate. The trace lists every
    grid cell in row-major (R outer) order.

    At fixed R every constraint only loosens as d grows while tau falls, so
    the best d for a given R is the feasibility boundary, located by
    bisection. Golden-section search then runs over R on that boundary
    profile, bracketed by the grid rows around the best boundary value.
    """
    gR, gd = grid
    if slice not in (None, "d=2R"):
        raise ValueError(f"unknown slice {slice!r}")
    if slice is None and ((R_range[0] != R_range[1] and gR < 64) or (d_range[0] != d_range[1] and gd < 64)):
        raise ValueError("grid must have at least 64 points per free axis")
    Rs = _axis(*R_range, gR)
    if slice == "d=2R":
        trace = _scan(Rs, lambda R: [2.0 * R], threads)
    else:
        ds = _axis(*d_range, gd)
        trace = _scan(Rs, lambda R: ds, threads)

    feasible = [r for r in trace if r.feasible]
    if not feasible:
        return SearchResult(best=None, trace=trace, message="no feasible grid cell")
    start = max(feasible, key=lambda r: r.tau)
    path: list[FeasibilityRecord] = []

    def profile(R: float) -> FeasibilityRecord:
        if slice == "d=2R":
            rec = evaluate(R, 2.0 * R)
        else:
            d_star = _boundary_d(R, *d_range)
            rec = evaluate(R, d_star) if d_star is not None else evaluate(R, d_range[1])
        path.append(rec)
        return rec

    if slice is None and len(Rs) > 1:
        # the best cell's row is blurred by the d grid; rank rows by their boundary tau instead
        scores = [_penalized(profile(R)) for R in Rs]
        i = int(np.argmax(scores))
    else:
        i = int(np.argmin(np.abs(Rs - start.R)))
    R_lo, R_hi = Rs[max(i - 1, 0)], Rs[min(i + 1, len(Rs) - 1)]

    if slice == "d=2R":
        # tau falls with R on the diagonal while the margin grows; the optimum is the margin root
        R_star = bisect_predicate(lambda R: evaluate(R, 2.0 * R).feasible, R_lo, start.R, tol=1e-15)
        best = profile(R_star)
    elif R_lo == R_hi:
        best = profile(R_lo)
    else:
        golden_max(lambda R: _penalized(profile(R)), R_lo, R_hi, iters=refine_iters)
        best = max((r for r in path if r.feasible), key=lambda r: r.tau, default=start)
    if not best.feasible or best.tau < start.tau:
        best = start
    return SearchResult(best=best, trace=trace, refine_path=path)
