"""Brute-force references for testing; exponential cost, never used by the library.

* matrix permanents (exact Ryser inclusion-exclusion and naive permutation sums)
* permanental and scaling means of the special matrix built from a tuple
* exact big-integer elementary symmetric polynomials
* grid minimization of the HS kernel integral
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from .errors import DimensionTooLarge, KOutOfRange, OutOfRange
from .measures import DiscreteMeasure

__all__ = [
    "elementary_symmetric_exact",
    "grid_min_barycenter",
    "permanent",
    "permanent_naive",
    "permanental_mean",
    "scaling_mean_special",
    "special_matrix",
]

MAX_DIM = 10
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise OutOfRange("matrix must be square")
    if a.shape[0] > MAX_DIM:
        raise DimensionTooLarge(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise OutOfRange("matrix entries must be finite and nonnegative")
    return a


def permanent(a) -> float:
    """Permanent by Ryser's formula over a Gray-code walk of column subsets.

    The alternating sum cancels badly in floating point (a zero permanent
    can come out as 1e-12), so it is carried out exactly over the rationals
    and rounded once at the end.
    """
    a = _as_matrix(a)
    n = a.shape[0]
    if n == 0:
        return 1.0
    q = [[Fraction(float(v)) for v in row] for row in a]
    row_sums = [Fraction(0)] * n
    total = Fraction(0)
    subset = 0
    for i in range(1, 2**n):
        j = (i & -i).bit_length() - 1  # column toggled by the Gray code step
        subset ^= 1 << j
        sign = 1 if subset >> j & 1 else -1
        for r in range(n):
            row_sums[r] += sign * q[r][j]
        term = math.prod(row_sums)
        total += term if bin(subset).count("1") % 2 == 0 else -term
    return float(total if n % 2 == 0 else -total)


def permanent_naive(a) -> float:
    """Permanent as the plain sum over all permutations."""
    a = _as_matrix(a)
    n = a.shape[0]
    return math.fsum(math.prod(a[i, s[i]] for i in range(n)) for s in itertools.permutations(range(n)))


def permanental_mean(a) -> float:
    """``(per(A) / n!)^(1/n)``."""
    a = _as_matrix(a)
    n = a.shape[0]
    return (permanent(a) / math.factorial(n)) ** (1.0 / n)


def special_matrix(x: Sequence[float], k: int) -> np.ndarray:
    """n x n matrix with k columns equal to ``x`` followed by n - k columns of ones."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 1 <= k <= n:
        raise KOutOfRange(f"need 1 <= k <= n={n}, got {k}")
    return np.hstack([np.tile(x[:, None], (1, k)), np.ones((n, n - k))])


def scaling_mean_special(x: Sequence[float], k: int) -> float:
    """Scaling mean of :func:`special_matrix` via its one-variable reduction

        (1/n) inf_{r>0} prod_i (x_i + r)^(1/n) / ((1/k)^(k/n) (r/(n-k))^((n-k)/n)),

    minimized by golden-section search over ``log r``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 1 <= k <= n:
        raise KOutOfRange(f"need 1 <= k <= n={n}, got {k}")
    if n > MAX_DIM:
        raise DimensionTooLarge(f"tuple length {n} exceeds {MAX_DIM}")
    if k == n:
        return 0.0 if np.any(x == 0) else math.exp(math.fsum(np.log(x)) / n)

    zeros = int(np.count_nonzero(x == 0))
    pos = x[x > 0]
    const = (k / n) * math.log(k) + ((n - k) / n) * math.log(n - k) - math.log(n)
    if zeros > n - k:
        # the coefficient of log r is negative: the infimum is the r -> 0 limit, 0
        return 0.0
    if zeros == n - k:
        # log r terms cancel and the objective increases in r
        return math.exp(math.fsum(np.log(pos)) / n + const)

    def obj(u: float) -> float:
        r = math.exp(u)
        return math.fsum(np.log(x + r)) / n - ((n - k) / n) * u + const

    lo = math.log((n - k - zeros) * pos.min() / k / 2.0)
    hi = math.log((n - k) * pos.max() / k * 2.0)
    a, b = lo, hi
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1, f2 = obj(c1), obj(c2)
    for _ in range(200):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - _GOLDEN * (b - a)
            f1 = obj(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + _GOLDEN * (b - a)
            f2 = obj(c2)
    return math.exp(min(f1, f2))


def elementary_symmetric_exact(x: Sequence[int | Fraction]) -> list[Fraction]:
    """Exact ``E_0 .. E_n`` over the rationals."""
    e = [Fraction(1)] + [Fraction(0)] * len(x)
    for j, v in enumerate(x, start=1):
        v = Fraction(v)
        for k in range(j, 0, -1):
            e[k] += v * e[k - 1]
    return e


def grid_min_barycenter(
    mu: DiscreteMeasure,
    c: float,
    grid: int = 10_000,
    lo: float | None = None,
    hi: float | None = None,
) -> float:
    """``exp`` of the minimum of the kernel integral over a log-spaced y grid.

    The default grid spans ``[min positive atom / 1e3, max atom * 1e3]``.
    """
    if grid < 100:
        raise OutOfRange("grid needs at least 100 points")
    if not 0.0 < c < 1.0:
        raise OutOfRange("grid oracle needs 0 < c < 1")
    if mu.is_delta_zero:
        return 0.0
    lo = mu.positive_support_min / 1e3 if lo is None else lo
    hi = mu.support_max * 1e3 if hi is None else hi
    y = np.geomspace(lo, hi, grid)[:, None]
    vals = np.log(y[:, 0]) + (np.log1p(c * (mu.x[None, :] / y - 1.0)) @ mu.w) / c
    return float(np.exp(vals.min()))
