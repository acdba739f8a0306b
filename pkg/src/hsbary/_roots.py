"""Safeguarded bisection/Newton root finder for monotone functions on (0, inf)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import SolverFailure

MAX_ITER = 200
MAX_EXPANSIONS = 60


@dataclass(frozen=True)
class Root:
    x: float
    fx: float
    iterations: int
    bracket_width: float
    converged: bool


def expand_bracket(
    f: Callable[[float], float], lo: float, hi: float, increasing: bool
) -> tuple[float, float]:
    """Widen ``[lo, hi]`` outward until ``f`` changes sign across it.

    The step factor doubles in the exponent (x2, x4, x16, ...), so a root
    anywhere in the positive floats is reached within ``MAX_EXPANSIONS``.
    """
    sign = 1.0 if increasing else -1.0
    factor = 2.0
    for _ in range(MAX_EXPANSIONS):
        if sign * f(lo) <= 0.0:
            break
        nlo = lo / factor
        if nlo <= 0.0 or nlo == lo:
            nlo = math.ulp(0.0) if lo > math.ulp(0.0) else lo
            if nlo == lo:
                raise SolverFailure("cannot expand bracket toward 0")
        lo = nlo
        factor = min(factor * factor, 1e150)
    else:
        raise SolverFailure("bracket expansion toward 0 did not find a sign change")
    factor = 2.0
    for _ in range(MAX_EXPANSIONS):
        if sign * f(hi) >= 0.0:
            return lo, hi
        hi *= factor
        factor = min(factor * factor, 1e150)
        if not math.isfinite(hi):
            break
    raise SolverFailure("bracket expansion toward inf did not find a sign change")


def _midpoint(lo: float, hi: float) -> float:
    mid = math.sqrt(lo) * math.sqrt(hi) if hi > 2.0 * lo else lo + 0.5 * (hi - lo)
    return mid if lo < mid < hi else lo + 0.5 * (hi - lo)


def solve_monotone(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    increasing: bool,
    ftol: float,
    xtol: float = 1e-15,
    max_iter: int = MAX_ITER,
    fdf: Callable[[float], tuple[float, float]] | None = None,
) -> Root:
    """Root of a strictly monotone ``f`` bracketed by ``0 < lo <= hi``.

    Newton steps in ``log x`` keep the bracket; a step that leaves it or
    fails to halve the step before last is replaced by a bisection at the
    geometric midpoint.  Stops once ``|f| <= ftol`` or the bracket is
    ``xtol`` relative wide.  ``fdf``, when given, returns ``(f(x), f'(x))``
    in one call and replaces ``f`` and ``fprime`` inside the loop.
    """
    if fdf is None:
        fdf = lambda x: (f(x), fprime(x))  # noqa: E731
    sign = 1.0 if increasing else -1.0
    flo, fhi = sign * f(lo), sign * f(hi)
    if flo == 0.0:
        return Root(lo, 0.0, 0, hi - lo, True)
    if fhi == 0.0:
        return Root(hi, 0.0, 0, hi - lo, True)
    if flo > 0.0 or fhi < 0.0:
        raise SolverFailure(f"no sign change on [{lo!r}, {hi!r}]")

    x = _midpoint(lo, hi)
    step = old_step = math.log(hi / lo)
    it = 0
    while it < max_iter:
        it += 1
        fx, d = fdf(x)
        if abs(fx) <= ftol:
            return Root(x, fx, it, hi - lo, True)
        if sign * fx < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= xtol * x:
            return Root(x, fx, it, hi - lo, True)
        d *= x
        xn = math.nan
        if d != 0.0 and math.isfinite(d):
            du = -fx / d
            if abs(2.0 * du) <= abs(old_step) and abs(du) < 700.0:
                xn = x * math.exp(du)
                old_step, step = step, du
        if not lo < xn < hi:
            xn = _midpoint(lo, hi)
            if not lo < xn < hi:
                return Root(x, fx, it, hi - lo, True)
            old_step, step = step, math.log(hi / lo)
        if abs(xn - x) <= 0.5 * math.ulp(x):
            return Root(xn, f(xn), it, hi - lo, True)
        x = xn
    fx = f(x)
    return Root(x, fx, it, hi - lo, abs(fx) <= ftol or hi - lo <= xtol * x)
