"""Scalar root/extremum searches shared by the geometry and optimizer modules."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
           max_iter: int = 200) -> float:
    """Root of ``f`` in ``[lo, hi]`` by bisection; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_predicate(pred: Callable[[float], bool], lo: float, hi: float,
                     tol: float = 1e-13, max_iter: int = 200) -> float:
    """Smallest x in ``[lo, hi]`` with ``pred(x)`` true, for a predicate monotone false->true.

    Returns the right end of the final bracket so the result satisfies ``pred``.
    """
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def golden_max(f: Callable[[float], float], lo: float, hi: float, iters: int = 60,
               tol: float = 0.0) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point evaluated, endpoints included.
    """
    best_x, best_f = lo, f(lo)
    fh = f(hi)
    if fh > best_f:
        best_x, best_f = hi, fh
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 > best_f:
            best_x, best_f = x1, f1
        if f2 > best_f:
            best_x, best_f = x2, f2
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f
