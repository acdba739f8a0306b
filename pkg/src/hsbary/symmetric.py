"""Symmetric means and HS means of finite tuples.

The k-th symmetric mean of ``x_1, ..., x_n`` is
``(E_k / C(n, k))^(1/k)`` where ``E_k`` is the elementary symmetric
polynomial.  ``E_k`` is accumulated in log space by the triangular
recurrence ``e_k <- e_k + x_j e_{k-1}``; every term is nonnegative, so the
recurrence never cancels and entries spanning hundreds of orders of
magnitude stay representable.  Repeated values are folded in one step
through ``(1 + v z)^m = sum_j C(m, j) v^j z^j``, which keeps long
low-entropy tuples (e.g. 0/1 samples) cheap.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .core import b_function, barycenter, log_b
from .errors import KOutOfRange, NegativeAtom, NumericalError, OutOfRange, ResourceLimit
from .measures import empirical

__all__ = [
    "Sandwich",
    "as_tuple",
    "elementary_symmetric",
    "elementary_symmetric_logs",
    "hs_mean",
    "log_binom",
    "maclaurin_chain",
    "recurrence_cells",
    "repeat_tuple",
    "repetition_limit",
    "sandwich_bounds",
    "sandwich_factor",
    "sandwich_table",
    "sym_mean",
]

REPEAT_CELL_LIMIT = 10**6
# the plain-float recurrence is used when every E_k provably stays inside
# [e^-_SAFE_LOG, e^_SAFE_LOG]; it is a few ulps more accurate than log space
_SAFE_LOG = 600.0
_LINEAR_MAX_N = 2000


def as_tuple(values: Iterable[float]) -> np.ndarray:
    """Validate a tuple of nonnegative finite reals and return it as an array."""
    v = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=float).ravel()
    if v.size == 0:
        raise OutOfRange("tuple must have at least one entry")
    if not np.all(np.isfinite(v)):
        raise OutOfRange("tuple entries must be finite")
    if np.any(v < 0):
        raise NegativeAtom("tuple entries must be nonnegative")
    return v


def log_binom(n: int, k: int) -> float:
    """log C(n, k) via log-gamma."""
    if k == 0 or k == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_binom_row(m: int, upto: int) -> np.ndarray:
    lm = math.lgamma(m + 1)
    return np.array([lm - math.lgamma(j + 1) - math.lgamma(m - j + 1) for j in range(upto + 1)])


def _groups(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pos = v[v > 0]
    return np.unique(pos, return_counts=True)


def recurrence_cells(values: Iterable[float], degree: int) -> int:
    """Number of log-space cell updates needed to reach ``E_degree``."""
    v = as_tuple(values)
    K = min(int(degree), v.size)
    _, counts = _groups(v)
    deg, cells = 0, 0
    for m in counts:
        m = int(m)
        if m == 1:
            cells += min(deg + 1, K)
        elif deg > 0:
            cells += (min(m, K) + 1) * (deg + 1)
        else:
            cells += min(m, K) + 1
        deg = min(deg + m, K)
    return cells


def _linear_es(v: np.ndarray, K: int) -> np.ndarray | None:
    """Plain-float ``E_0 .. E_K``, or None when the range check fails."""
    pos = v[v > 0]
    n = v.size
    if n > _LINEAR_MAX_N:
        return None
    if pos.size:
        spread = max(abs(math.log(pos.max())), abs(math.log(pos.min())))
        if K * spread + n * math.log(2.0) > _SAFE_LOG:
            return None
    e = np.zeros(K + 1)
    e[0] = 1.0
    deg = 0
    for val in pos:
        top = min(deg + 1, K)
        e[1 : top + 1] += val * e[:top].copy()
        deg = top
    return e


def elementary_symmetric_logs(values: Iterable[float], max_degree: int | None = None) -> np.ndarray:
    """``log E_k`` for ``k = 0 .. n`` (or ``.. max_degree``); ``-inf`` where ``E_k = 0``."""
    v = as_tuple(values)
    n = v.size
    K = n if max_degree is None else max(0, min(int(max_degree), n))
    lin = _linear_es(v, K)
    if lin is not None:
        with np.errstate(divide="ignore"):
            return np.log(lin)
    out = np.full(K + 1, -np.inf)
    out[0] = 0.0
    ux, counts = _groups(v)
    deg = 0
    for val, m in zip(ux, counts):
        m = int(m)
        lv = math.log(val)
        if m == 1:
            top = min(deg + 1, K)
            if top:
                out[1 : top + 1] = np.logaddexp(out[1 : top + 1], out[:top] + lv)
        else:
            mm = min(m, K)
            coef = _log_binom_row(m, mm) + lv * np.arange(mm + 1)
            if deg == 0:
                out[: mm + 1] = coef
            else:
                top = min(deg + m, K)
                new = np.full(K + 1, -np.inf)
                for j in range(mm + 1):
                    hi = min(top, j + deg)
                    new[j : hi + 1] = np.logaddexp(new[j : hi + 1], out[: hi + 1 - j] + coef[j])
                out = new
        deg = min(deg + m, K)
    return out


def elementary_symmetric(values: Iterable[float]) -> np.ndarray:
    """``E_k`` for ``k = 0 .. n`` as plain floats (may overflow to inf)."""
    v = as_tuple(values)
    lin = _linear_es(v, v.size)
    if lin is not None:
        return lin
    with np.errstate(over="ignore"):
        return np.exp(elementary_symmetric_logs(v))


def _check_k(n: int, k: int) -> int:
    if int(k) != k or not 1 <= k <= n:
        raise KOutOfRange(f"k must satisfy 1 <= k <= n={n}, got {k!r}")
    return int(k)


def _sym_from_log(le: float, n: int, k: int) -> float:
    if le == -math.inf:
        return 0.0
    lv = (le - log_binom(n, k)) / k
    return math.exp(lv) if lv < 709.78 else math.inf


def _sym_linear(e_k: float, n: int, k: int) -> float:
    return float((e_k / math.comb(n, k)) ** (1.0 / k))


def sym_mean(values: Iterable[float], k: int) -> float:
    """k-th symmetric mean ``(E_k / C(n, k))^(1/k)``."""
    v = as_tuple(values)
    k = _check_k(v.size, k)
    lin = _linear_es(v, k)
    if lin is not None:
        return _sym_linear(lin[k], v.size, k)
    le = elementary_symmetric_logs(v, max_degree=k)[k]
    return _sym_from_log(le, v.size, k)


def hs_mean(values: Iterable[float], c: float | Fraction) -> float:
    """HS barycenter of the uniform measure on the tuple."""
    return barycenter(empirical(as_tuple(values)), c).value


def repeat_tuple(values: Iterable[float], m: int) -> np.ndarray:
    """Concatenation of ``m`` copies of the tuple."""
    if int(m) != m or m < 1:
        raise OutOfRange(f"repetition count must be a positive integer, got {m!r}")
    return np.tile(as_tuple(values), int(m))


def sandwich_factor(n: int, k: int) -> float:
    """``C(n, k)^(-1/k) / B(k/n)``; exactly 1 when ``k == n``."""
    k = _check_k(n, k)
    if k == n:
        return 1.0
    if n <= _LINEAR_MAX_N // 2:
        return math.comb(n, k) ** (-1.0 / k) / b_function(Fraction(k, n))
    return math.exp(-log_binom(n, k) / k - log_b(k / n))


class Sandwich(NamedTuple):
    lower: float
    sym: float
    upper: float


def sandwich_bounds(values: Iterable[float], k: int) -> Sandwich:
    """``(hsm_{k/n}, sym_k, factor * hsm_{k/n})``, which satisfy lower <= sym <= upper."""
    v = as_tuple(values)
    n = v.size
    k = _check_k(n, k)
    factor = sandwich_factor(n, k)
    if not 1.0 <= factor < (9.0 * k) ** (0.5 / k):
        raise NumericalError(f"sandwich factor {factor!r} outside [1, (9k)^(1/2k)) for n={n}, k={k}")
    hsm = hs_mean(v, Fraction(k, n))
    return Sandwich(hsm, sym_mean(v, k), factor * hsm)


def sandwich_table(values: Iterable[float]) -> list[Sandwich]:
    """:func:`sandwich_bounds` for ``k = 1 .. n``, sharing the work across k."""
    v = as_tuple(values)
    n = v.size
    chain = maclaurin_chain(v)
    mu = empirical(v)
    rows = []
    for k in range(1, n + 1):
        factor = sandwich_factor(n, k)
        if not 1.0 <= factor < (9.0 * k) ** (0.5 / k):
            raise NumericalError(f"sandwich factor {factor!r} outside [1, (9k)^(1/2k)) for n={n}, k={k}")
        hsm = barycenter(mu, Fraction(k, n)).value
        rows.append(Sandwich(hsm, chain[k - 1], factor * hsm))
    return rows


def repetition_limit(
    values: Iterable[float], k: int, m_max: int, ms: Sequence[int] | None = None
) -> list[tuple[int, float]]:
    """``(m, sym_{km}(x^(m)))`` for ``m = 1 .. m_max`` (or the given ``ms``)."""
    v = as_tuple(values)
    k = _check_k(v.size, k)
    if int(m_max) != m_max or m_max < 1:
        raise OutOfRange(f"m_max must be a positive integer, got {m_max!r}")
    ms = list(range(1, int(m_max) + 1)) if ms is None else [int(m) for m in ms]
    top = max(ms)
    if k * top * top > REPEAT_CELL_LIMIT:
        raise ResourceLimit(f"k * m_max^2 = {k * top * top} exceeds {REPEAT_CELL_LIMIT}")
    return [(m, sym_mean(repeat_tuple(v, m), k * m)) for m in ms]


def maclaurin_chain(values: Iterable[float]) -> list[float]:
    """``[sym_1, ..., sym_n]``, nonincreasing by Maclaurin's inequality."""
    v = as_tuple(values)
    n = v.size
    lin = _linear_es(v, n)
    if lin is not None:
        return [_sym_linear(lin[k], n, k) for k in range(1, n + 1)]
    logs = elementary_symmetric_logs(v)
    return [_sym_from_log(logs[k], n, k) for k in range(1, n + 1)]
