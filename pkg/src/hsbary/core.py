"""The HS kernel and the HS barycenter of a discrete measure.

For ``0 < c < 1`` the barycenter is

    [mu]_c = exp inf_{y>0} sum_i w_i K(x_i, y, c),

with ``K(x, y, c) = log y + log(c x / y + 1 - c) / c``.  The regime is
fixed by the mass of the atom at 0: below ``1 - c`` (subcritical) the
infimum is attained at the root ``eta`` of a strictly increasing function;
at ``1 - c`` (critical) the value is ``B(c)`` times the geometric mean of
the positive part; above it (supercritical) the value is 0.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _roots
from .errors import (
    DegenerateAtZero,
    NonpositiveY,
    NotSubcritical,
    OutOfRange,
    SolverFailure,
    SupercriticalInput,
)
from .measures import DiscreteMeasure, as_fraction, mix, positive_part

__all__ = [
    "BarycenterReport",
    "Regime",
    "ZeroReason",
    "b_function",
    "barycenter",
    "barycenter_oldstyle",
    "classify",
    "induce_identity_check",
    "is_zero_barycenter",
    "kernel",
    "kernel_integral",
    "psi",
    "segment_eta_derivative",
    "segment_second_derivative",
    "solve_eta",
    "solve_rho",
]

log = logging.getLogger(__name__)

LOG_MAX = math.log(np.finfo(float).max)
ETA_FTOL = 1e-14
ETA_XTOL = 1e-15

Param = float | Fraction


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    ARITHMETIC_EDGE = "arithmetic-edge"
    GEOMETRIC_EDGE = "geometric-edge"


class ZeroReason(enum.Enum):
    DELTA_ZERO = "delta-zero"
    CRITICAL_WITH_LOG_DIVERGENCE = "critical-log-divergence"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class BarycenterReport:
    """Barycenter value with solver diagnostics.

    ``eta`` is the minimizing ``y`` of the kernel integral and ``rho`` the
    minimizing ``r`` of the product form; they satisfy
    ``rho = (1 - c) / c * eta``.  ``overflow`` marks a value that exceeded
    the float range and was returned as ``inf``.
    """

    value: float
    regime: Regime
    eta: float | None = None
    rho: float | None = None
    iterations: int = 0
    bracket_width: float = 0.0
    overflow: bool = False


def _param(c: Param, lo_open: bool = False, hi_open: bool = False) -> float:
    cf = float(c)
    if not math.isfinite(cf) or cf < 0.0 or cf > 1.0:
        raise OutOfRange(f"parameter c must lie in [0, 1], got {c!r}")
    if (lo_open and cf == 0.0) or (hi_open and cf == 1.0):
        raise OutOfRange(f"parameter c={c!r} is outside the allowed open range")
    return cf


def _exp(logv: float) -> tuple[float, bool]:
    if logv > LOG_MAX:
        return math.inf, True
    return math.exp(logv), False


def kernel(x: float, y: float, c: float) -> float:
    """HS kernel ``K(x, y, c)``; ``-inf`` exactly at ``x = 0, c = 1``."""
    if not y > 0.0:
        raise NonpositiveY(f"y must be positive, got {y!r}")
    if x < 0.0:
        raise OutOfRange(f"x must be nonnegative, got {x!r}")
    c = _param(c)
    if c == 1.0:
        return math.log(x) if x > 0.0 else -math.inf
    if c == 0.0:
        return math.log(y) + x / y - 1.0
    return math.log(y) + math.log1p(c * (x / y - 1.0)) / c


def kernel_integral(mu: DiscreteMeasure, y: float, c: float) -> float:
    """``sum_i w_i K(x_i, y, c)`` with compensated summation."""
    if c == 0.0:
        return math.log(y) + math.fsum(mu.w * (mu.x / y - 1.0))
    if c == 1.0:
        return -math.inf if mu.has_zero_atom else math.fsum(mu.w * np.log(mu.x))
    return math.log(y) + math.fsum(mu.w * np.log1p(c * (mu.x / y - 1.0))) / c


def b_function(c: Param) -> float:
    """``B(c) = c (1 - c)^((1 - c)/c)`` with ``B(0) = 0`` and ``B(1) = 1``."""
    c = _param(c)
    if c == 0.0:
        return 0.0
    if c == 1.0:
        return 1.0
    if c >= 0.5:
        # 1 - c is exact here, and pow is more accurate than exp(log)
        return c * (1.0 - c) ** ((1.0 - c) / c)
    return c * math.exp((1.0 - c) / c * math.log1p(-c))


def log_b(c: float) -> float:
    return math.log(c) + (1.0 - c) / c * math.log1p(-c)


def classify(mu: DiscreteMeasure, c: Param) -> Regime:
    """Regime of ``mu`` at parameter ``c``, compared in exact rationals."""
    _param(c)
    cq = as_fraction(c)
    if cq == 0:
        return Regime.ARITHMETIC_EDGE
    if cq == 1:
        return Regime.GEOMETRIC_EDGE
    threshold = 1 - cq
    if mu.zero_mass < threshold:
        return Regime.SUBCRITICAL
    if mu.zero_mass == threshold:
        return Regime.CRITICAL
    return Regime.SUPERCRITICAL


def _phi(mu: DiscreteMeasure, c: float, y: float) -> float:
    # psi / (1 - c), written without the cancellation in 1 - x / D
    d = c * mu.x + (1.0 - c) * y
    return math.fsum(mu.w * (y - mu.x) / d)


def _phi_prime(mu: DiscreteMeasure, c: float, y: float) -> float:
    d = c * mu.x + (1.0 - c) * y
    return math.fsum(mu.w * mu.x / (d * d))


def _phi_both(mu: DiscreteMeasure, c: float, y: float) -> tuple[float, float]:
    d = c * mu.x + (1.0 - c) * y
    wd = mu.w / d
    return math.fsum(wd * (y - mu.x)), math.fsum(wd * mu.x / d)


def psi(mu: DiscreteMeasure, c: float, y: float) -> float:
    """``psi(y) = sum_i w_i (1 - x_i / (c x_i + (1 - c) y))``, increasing in y."""
    c = _param(c, lo_open=True, hi_open=True)
    if mu.is_delta_zero:
        raise DegenerateAtZero("psi is constant for the point mass at 0")
    if not y > 0.0:
        raise NonpositiveY(f"y must be positive, got {y!r}")
    return (1.0 - c) * _phi(mu, c, y)


def _solve_eta(mu: DiscreteMeasure, c: float) -> _roots.Root:
    if mu.is_delta:
        a = mu.support_max
        return _roots.Root(a, 0.0, 0, 0.0, True)
    f = lambda y: _phi(mu, c, y)  # noqa: E731
    fp = lambda y: _phi_prime(mu, c, y)  # noqa: E731
    lo, hi = mu.positive_support_min, mu.support_max
    if mu.has_zero_atom:
        lo, hi = _roots.expand_bracket(f, lo, hi, increasing=True)
    fdf = lambda y: _phi_both(mu, c, y)  # noqa: E731
    root = _roots.solve_monotone(f, fp, lo, hi, increasing=True, ftol=ETA_FTOL, xtol=ETA_XTOL, fdf=fdf)
    if not root.converged:
        raise SolverFailure(f"eta solver did not converge: {root}")
    return root


def solve_eta(mu: DiscreteMeasure, c: Param) -> float:
    """Unique positive root ``eta`` of ``sum_i w_i x_i / (c x_i + (1-c) eta) = 1``.

    Only defined in the subcritical regime.
    """
    cf = _param(c, lo_open=True, hi_open=True)
    if classify(mu, c) is not Regime.SUBCRITICAL:
        raise NotSubcritical(f"eta needs a subcritical measure (mu(0)={mu.mass_at_zero!r}, c={cf!r})")
    return _solve_eta(mu, cf).x


def barycenter(mu: DiscreteMeasure, c: Param) -> BarycenterReport:
    """HS barycenter ``[mu]_c`` for ``c`` in [0, 1].

    ``c`` may be a :class:`fractions.Fraction` (e.g. ``Fraction(k, n)``) so
    that the critical case is recognized exactly.
    """
    cf = _param(c)
    regime = classify(mu, c)
    if regime is Regime.ARITHMETIC_EDGE:
        m = mu.mean()
        return BarycenterReport(m, regime, eta=m if m > 0.0 else None)
    if regime is Regime.GEOMETRIC_EDGE:
        return BarycenterReport(mu.geometric_mean(), regime)
    if regime is Regime.SUPERCRITICAL:
        return BarycenterReport(0.0, regime)
    if regime is Regime.CRITICAL:
        return BarycenterReport(b_function(cf) * positive_part(mu).geometric_mean(), regime)

    try:
        root = _solve_eta(mu, cf)
    except SolverFailure:
        # float rounding can hide the sign change when mu(0) is within a few
        # ulps of 1 - c; the induced formula is well conditioned there
        log.debug("eta bracket failed near the critical line; using induced formula")
        p = 1 - mu.zero_mass
        cp = as_fraction(c) / p
        inner = barycenter(positive_part(mu), cp)
        value = b_function(cf) / b_function(float(cp)) * inner.value
        return BarycenterReport(value, regime, iterations=inner.iterations)
    eta = root.x
    if mu.is_delta:
        value, overflow = eta, False
    else:
        value, overflow = _exp(kernel_integral(mu, eta, cf))
    return BarycenterReport(
        value,
        regime,
        eta=eta,
        rho=(1.0 - cf) / cf * eta,
        iterations=root.iterations,
        bracket_width=root.bracket_width,
        overflow=overflow,
    )


def _rho_fn(mu: DiscreteMeasure, c: float, r: float) -> float:
    return math.fsum(np.append(mu.w * (mu.x / (mu.x + r)), -c))


def _rho_prime(mu: DiscreteMeasure, r: float) -> float:
    s = mu.x + r
    return -math.fsum(mu.w * mu.x / (s * s))


def solve_rho(mu: DiscreteMeasure, c: Param) -> float:
    """Unique positive root ``rho`` of ``sum_i w_i x_i / (x_i + rho) = c`` (subcritical only)."""
    cf = _param(c, lo_open=True, hi_open=True)
    if classify(mu, c) is not Regime.SUBCRITICAL:
        raise NotSubcritical("rho needs a subcritical measure")
    return _solve_rho(mu, cf).x


def _solve_rho(mu: DiscreteMeasure, c: float) -> _roots.Root:
    k = (1.0 - c) / c
    if mu.is_delta:
        return _roots.Root(k * mu.support_max, 0.0, 0, 0.0, True)
    f = lambda r: _rho_fn(mu, c, r)  # noqa: E731
    fp = lambda r: _rho_prime(mu, r)  # noqa: E731
    lo, hi = _roots.expand_bracket(f, k * mu.positive_support_min, k * mu.support_max, increasing=False)
    root = _roots.solve_monotone(f, fp, lo, hi, increasing=False, ftol=ETA_FTOL, xtol=ETA_XTOL)
    if not root.converged:
        raise SolverFailure(f"rho solver did not converge: {root}")
    return root


def barycenter_oldstyle(mu: DiscreteMeasure, c: Param) -> BarycenterReport:
    """``[mu]_c`` through the product form ``B(c) inf_r r^(-(1-c)/c) exp(int log(x+r) / c)``.

    An independent route to :func:`barycenter`, solving for ``rho`` instead
    of ``eta``.
    """
    cf = _param(c, lo_open=True)
    regime = classify(mu, c)
    if regime is Regime.GEOMETRIC_EDGE:
        return BarycenterReport(mu.geometric_mean(), regime)
    if regime is Regime.SUPERCRITICAL:
        return BarycenterReport(0.0, regime)
    if regime is Regime.CRITICAL:
        return BarycenterReport(b_function(cf) * positive_part(mu).geometric_mean(), regime)
    root = _solve_rho(mu, cf)
    rho = root.x
    if mu.is_delta:
        value, overflow = mu.support_max, False
    else:
        logv = log_b(cf) - (1.0 - cf) / cf * math.log(rho) + math.fsum(mu.w * np.log(mu.x + rho)) / cf
        value, overflow = _exp(logv)
    return BarycenterReport(
        value,
        regime,
        eta=cf / (1.0 - cf) * rho,
        rho=rho,
        iterations=root.iterations,
        bracket_width=root.bracket_width,
        overflow=overflow,
    )


def induce_identity_check(mu: DiscreteMeasure, c: Param) -> tuple[float, float]:
    """Both sides of ``[mu]_c = B(c) / B(c/p) [mu+]_{c/p}`` with ``p = 1 - mu(0)``."""
    cf = _param(c, lo_open=True)
    p = 1 - mu.zero_mass
    cq = as_fraction(c)
    if p == 0 or cq > p:
        raise SupercriticalInput(f"need 0 < c <= 1 - mu(0); got c={cf!r}, 1 - mu(0)={float(p)!r}")
    cp = cq / p
    lhs = barycenter(mu, c).value
    rhs = b_function(cf) / b_function(cp) * barycenter(positive_part(mu), cp).value
    return lhs, rhs


def is_zero_barycenter(mu: DiscreteMeasure, c: Param) -> tuple[bool, ZeroReason | None]:
    """Whether ``[mu]_c == 0``, with the reason.

    The critical case with a divergent log-integral cannot occur for a
    finite atom list, so :attr:`ZeroReason.CRITICAL_WITH_LOG_DIVERGENCE` is
    never returned.
    """
    _param(c)
    cq = as_fraction(c)
    if cq == 0:
        return (True, ZeroReason.DELTA_ZERO) if mu.is_delta_zero else (False, None)
    if mu.zero_mass > 1 - cq:
        return True, ZeroReason.SUPERCRITICAL
    return False, None


def _segment_terms(mu0: DiscreteMeasure, mu1: DiscreteMeasure, c: Param, t: float):
    cf = _param(c, lo_open=True, hi_open=True)
    if classify(mu0, c) is not Regime.SUBCRITICAL or classify(mu1, c) is not Regime.SUBCRITICAL:
        raise NotSubcritical("both segment endpoints must be subcritical")
    mu = mix(mu0, mu1, t)
    eta = _solve_eta(mu, cf).x

    def delta_sum(m: DiscreteMeasure) -> float:
        return (1.0 - cf) * _phi(m, cf, eta)

    psi_t = delta_sum(mu1) - delta_sum(mu0)
    s = _phi_prime(mu, cf, eta)
    psi_y = (1.0 - cf) * s
    return cf, eta, -psi_t / psi_y, s


def segment_eta_derivative(mu0: DiscreteMeasure, mu1: DiscreteMeasure, c: Param, t: float) -> float:
    """``d eta / dt`` along ``(1 - t) mu0 + t mu1`` by implicit differentiation."""
    return _segment_terms(mu0, mu1, c, t)[2]


def segment_second_derivative(mu0: DiscreteMeasure, mu1: DiscreteMeasure, c: Param, t: float) -> float:
    """Second derivative of ``t -> log [(1 - t) mu0 + t mu1]_c``.

    Equals ``-(1 - c) eta_dot^2 / eta * sum_i w_i x_i / (c x_i + (1 - c) eta)^2``
    and is never positive.
    """
    cf, eta, eta_dot, s = _segment_terms(mu0, mu1, c, t)
    return -(1.0 - cf) * eta_dot * eta_dot / eta * s
