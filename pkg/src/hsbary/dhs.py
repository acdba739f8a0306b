"""The DHS deviation barycenter.

The deviation function ``E(x, y, c) = K(x, y, c) - log y`` is strictly
decreasing in ``y``; the DHS barycenter is the root of
``sum_i w_i E(x_i, y, c) = 0``.  It dominates the HS barycenter, agrees
with it to first order at point masses, and has no critical jump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _roots
from .core import Regime, _param, barycenter, classify
from .errors import NonpositiveY, NotSubcritical, OutOfRange, SolverFailure
from .measures import DiscreteMeasure, delta, mix

__all__ = ["DhsReport", "deviation", "dhs_barycenter", "hs_dhs_gap", "tangency_check"]

RESIDUAL_TOL = 1e-13


@dataclass(frozen=True)
class DhsReport:
    value: float
    iterations: int = 0
    residual: float = 0.0


def deviation(x: float, y: float, c: float) -> float:
    """``E(x, y, c)``; ``-inf`` at ``x = 0, c = 1``."""
    if not y > 0.0:
        raise NonpositiveY(f"y must be positive, got {y!r}")
    if x < 0.0:
        raise OutOfRange(f"x must be nonnegative, got {x!r}")
    c = _param(c)
    if c == 0.0:
        return x / y - 1.0
    if c == 1.0:
        return math.log(x / y) if x > 0.0 else -math.inf
    return math.log1p(c * (x / y - 1.0)) / c


def _dev_sum(mu: DiscreteMeasure, c: float, y: float) -> float:
    return math.fsum(mu.w * np.log1p(c * (mu.x / y - 1.0))) / c


def _dev_sum_prime(mu: DiscreteMeasure, c: float, y: float) -> float:
    return -math.fsum(mu.w * mu.x / (y * (c * mu.x + (1.0 - c) * y)))


def dhs_barycenter(mu: DiscreteMeasure, c: float | Fraction) -> DhsReport:
    """DHS barycenter for ``c`` in [0, 1]; finite for every discrete measure."""
    cf = _param(c)
    if mu.is_delta_zero:
        return DhsReport(0.0)
    if mu.is_delta:
        return DhsReport(mu.support_max)
    if cf == 0.0:
        return DhsReport(mu.mean())
    if cf == 1.0:
        return DhsReport(mu.geometric_mean())
    f = lambda y: _dev_sum(mu, cf, y)  # noqa: E731
    fp = lambda y: _dev_sum_prime(mu, cf, y)  # noqa: E731
    lo, hi = _roots.expand_bracket(f, mu.positive_support_min, mu.support_max, increasing=False)
    root = _roots.solve_monotone(f, fp, lo, hi, increasing=False, ftol=1e-15, xtol=1e-15)
    residual = abs(f(root.x))
    if not root.converged or residual > RESIDUAL_TOL:
        raise SolverFailure(f"DHS solver stopped with residual {residual!r}")
    return DhsReport(root.x, root.iterations, residual)


def hs_dhs_gap(mu: DiscreteMeasure, c: float | Fraction) -> tuple[float, float]:
    """``([mu]_c, DHS(mu, c))``; the first never exceeds the second."""
    return barycenter(mu, c).value, dhs_barycenter(mu, c).value


def tangency_check(x0: float, mu1: DiscreteMeasure, c: float, h: float) -> tuple[float, float]:
    """One-sided difference quotients at ``t = 0`` of both barycenters along
    ``(1 - t) delta_{x0} + t mu1`` with step ``h``.

    Both quotients converge to the same derivative, so their gap is ``O(h)``.
    """
    if not x0 > 0.0:
        raise OutOfRange(f"x0 must be positive, got {x0!r}")
    if not 0.0 < h <= 1.0:
        raise OutOfRange(f"step h must lie in (0, 1], got {h!r}")
    _param(c, lo_open=True, hi_open=True)
    mu_h = mix(delta(x0), mu1, h)
    if classify(mu_h, c) is not Regime.SUBCRITICAL:
        raise NotSubcritical("path leaves the subcritical locus within the step")
    d_hs = (barycenter(mu_h, c).value - x0) / h
    d_dhs = (dhs_barycenter(mu_h, c).value - x0) / h
    return d_hs, d_dhs
