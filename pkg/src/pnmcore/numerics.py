"""Adaptive Simpson quadrature and bisection refinement."""

from __future__ import annotations

import math

from .errors import QuadratureFailure


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-9, max_depth: int = 40) -> float:
    """Adaptive Simpson integration of f on [a, b] to absolute tolerance tol.

    Intervals that still disagree at max_depth contribute their current
    estimate; this keeps bounded integrands with unresolvably fast
    oscillation (rather than divergence) integrable.
    """
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    result = _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)
    if not math.isfinite(result):
        raise QuadratureFailure(f"integral of {f} on [{a}, {b}] is not finite")
    return result


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if depth <= 0 or abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    return _simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1
    )


def bisect_boundary(pred, lo: float, hi: float, xtol: float = 1e-4) -> float:
    """Boundary of a predicate that is True at lo and False at hi.

    Returns a point within xtol of the transition.
    """
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_root(f, lo: float, hi: float, xtol: float = 1e-6) -> float:
    """Root of a continuous f with f(lo) and f(hi) of opposite sign."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (flo > 0) != (fmid > 0):
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)
