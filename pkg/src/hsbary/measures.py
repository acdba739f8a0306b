"""Finitely supported probability measures on the half-line [0, inf).

A :class:`DiscreteMeasure` is the single measure representation used
throughout the package.  Continuous laws enter only through explicit
quadrature (:func:`quadrature_uniform`).

Besides the floating-point weights, every measure carries the mass of the
atom at zero as an exact rational (:attr:`DiscreteMeasure.zero_mass`): the
simplest rational that rounds to the stored weight, which is itself the
rounding of the intended mass (``1 - p``, ``z/n``, a ratio of decimal
weights).  Regime classification compares that rational with ``1 - c``, so
the critical case ``mu(0) == 1 - c`` is decided without rounding noise even
when ``c = k/n`` has no exact binary representation.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateAtZero,
    EmptyMeasure,
    InputError,
    NegativeAtom,
    OutOfRange,
    WeightSumMismatch,
)

__all__ = [
    "DiscreteMeasure",
    "as_fraction",
    "bernoulli",
    "delta",
    "empirical",
    "from_atoms",
    "load_measure",
    "log_moment",
    "mix",
    "positive_part",
    "quadrature_uniform",
    "scale",
]

# Pre-normalization guard against typos, and the threshold below which a
# weight total is considered already normalized (keeps from_atoms idempotent).
WEIGHT_SUM_TOL = 1e-6
_RENORMALIZE_TOL = 1e-12


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    # smallest-denominator rational in [lo, hi] (0 <= lo <= hi), by continued fractions
    n = math.floor(lo)
    if n == lo:
        return Fraction(n)
    if n + 1 <= hi:
        return Fraction(n + 1)
    return n + 1 / _simplest_between(1 / (hi - n), 1 / (lo - n))


def as_fraction(v: float | int | Fraction) -> Fraction:
    """Exact rational for ``v``.

    A float is read as the simplest rational that rounds to it, so ``0.3``
    becomes ``3/10`` and ``5/13`` survives a float round trip.  Distinct
    floats map to distinct, identically ordered rationals.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    v = float(v)
    if not math.isfinite(v):
        raise OutOfRange(f"non-finite value {v!r}")
    if v == 0.0:
        return Fraction(0)
    a = abs(v)
    half = Fraction(math.ulp(a)) / 2
    q = _simplest_between(Fraction(a) - half, Fraction(a) + half)
    if float(q) != a:
        q = Fraction(a)
    return q if v > 0 else -q


class DiscreteMeasure:
    """Immutable probability measure with finitely many atoms on [0, inf).

    Atoms are sorted by position with equal positions merged.  Use the
    module-level constructors rather than calling this class directly.
    """

    __slots__ = ("_x", "_w", "_zero")

    def __init__(self, x: np.ndarray, w: np.ndarray, zero_mass: Fraction):
        x.flags.writeable = False
        w.flags.writeable = False
        self._x = x
        self._w = w
        self._zero = zero_mass

    @property
    def x(self) -> np.ndarray:
        """Atom positions, ascending (read-only view)."""
        return self._x

    @property
    def w(self) -> np.ndarray:
        """Atom weights aligned with :attr:`x` (read-only view)."""
        return self._w

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self._x, self._w)]

    @property
    def zero_mass(self) -> Fraction:
        """Exact mass of the atom at 0."""
        return self._zero

    @property
    def mass_at_zero(self) -> float:
        """Stored floating-point weight of the atom at 0 (0.0 if absent)."""
        return float(self._w[0]) if self._x[0] == 0.0 else 0.0

    @property
    def has_zero_atom(self) -> bool:
        return bool(self._x[0] == 0.0)

    @property
    def is_delta(self) -> bool:
        return len(self._x) == 1

    @property
    def is_delta_zero(self) -> bool:
        return len(self._x) == 1 and self._x[0] == 0.0

    @property
    def support_min(self) -> float:
        return float(self._x[0])

    @property
    def support_max(self) -> float:
        return float(self._x[-1])

    @property
    def positive_support_min(self) -> float:
        """Smallest positive atom; raises for the point mass at 0."""
        if self.is_delta_zero:
            raise DegenerateAtZero("measure is concentrated at 0")
        return float(self._x[1] if self._x[0] == 0.0 else self._x[0])

    def mean(self) -> float:
        return math.fsum(self._w * self._x)

    def geometric_mean(self) -> float:
        """exp of the integral of log x; 0 when there is an atom at 0."""
        if self.has_zero_atom:
            return 0.0
        if len(self._x) == 1:
            return float(self._x[0])
        s = math.fsum(self._w * np.log(self._x))
        return math.exp(s) if s < _LOG_MAX else math.inf

    def __len__(self) -> int:
        return len(self._x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            np.array_equal(self._x, other._x)
            and np.array_equal(self._w, other._w)
            and self._zero == other._zero
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if len(self._x) <= 6:
            body = ", ".join(f"({a:.6g}, {b:.6g})" for a, b in self.atoms)
        else:
            body = f"{len(self._x)} atoms in [{self.support_min:.6g}, {self.support_max:.6g}]"
        return f"DiscreteMeasure([{body}])"

    def to_json(self) -> str:
        return json.dumps({"atoms": [{"x": a, "w": b} for a, b in self.atoms]})


_LOG_MAX = math.log(np.finfo(float).max)


def _finalize(
    x: np.ndarray, w: np.ndarray, zero_mass: Fraction | None, normalize: bool
) -> DiscreteMeasure:
    """Sort, merge equal positions, normalize, and wrap."""
    total = math.fsum(w)
    if not normalize and abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightSumMismatch(f"weights sum to {total!r}, expected 1")
    if abs(total - 1.0) > _RENORMALIZE_TOL:
        w = w / total
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    ux, start = np.unique(x, return_index=True)
    if len(ux) != len(x):
        bounds = list(start) + [len(x)]
        w = np.array([math.fsum(w[a:b]) for a, b in zip(bounds[:-1], bounds[1:])])
        x = ux
    if len(x) == 1:
        w = np.ones(1)
        zero_mass = Fraction(1)
    if x[0] != 0.0:
        zero_mass = Fraction(0)
    else:
        if zero_mass is not None:
            w = w.copy()
            w[0] = float(zero_mass)
        # a ratio with denominator below 2^26 is already the simplest
        # rational within half an ulp of its float
        if zero_mass is None or zero_mass.denominator >= 2**26:
            zero_mass = as_fraction(float(w[0]))
    return DiscreteMeasure(np.ascontiguousarray(x, dtype=float), np.ascontiguousarray(w, dtype=float), zero_mass)


def _check_positions(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise OutOfRange("atom positions must be finite")
    if np.any(x < 0):
        raise NegativeAtom(f"negative atom position {float(x[x < 0][0])!r}")


def from_atoms(pairs: Iterable[Sequence[float]], normalize: bool = False) -> DiscreteMeasure:
    """Build a measure from ``(x, w)`` pairs.

    Weights must already sum to 1 within ``1e-6`` unless ``normalize`` is
    set; they are then rescaled to sum to 1.  Equal positions are merged.
    """
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise EmptyMeasure("a measure needs at least one atom")
    try:
        x = np.array([float(p[0]) for p in pairs])
        w = np.array([float(p[1]) for p in pairs])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed atom list: {exc}") from None
    _check_positions(x)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise OutOfRange("atom weights must be positive and finite")
    zero = None
    if np.any(x == 0.0):
        dec = [as_fraction(float(v)) for v in w]
        zero = sum((d for d, xi in zip(dec, x) if xi == 0.0), Fraction(0))
        if abs(math.fsum(w) - 1.0) > _RENORMALIZE_TOL:
            zero /= sum(dec, Fraction(0))
    return _finalize(x, w, zero, normalize)


def empirical(values: Iterable[float]) -> DiscreteMeasure:
    """Uniform measure on a tuple of values, ``(delta_x1 + ... + delta_xn)/n``."""
    v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if v.size == 0:
        raise EmptyMeasure("empty tuple")
    v = v.ravel()
    _check_positions(v)
    ux, counts = np.unique(v, return_counts=True)
    n = int(v.size)
    zero = Fraction(int(counts[0]), n) if ux[0] == 0.0 else Fraction(0)
    return _finalize(ux, counts / n, zero, normalize=True)


def delta(a: float) -> DiscreteMeasure:
    """Point mass at ``a``."""
    a = float(a)
    _check_positions(np.array([a]))
    return DiscreteMeasure(np.array([a]), np.array([1.0]), Fraction(int(a == 0.0)))


def bernoulli(p: float) -> DiscreteMeasure:
    """``(1 - p) delta_0 + p delta_1``."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return delta(0.0)
    if p == 1.0:
        return delta(1.0)
    return _finalize(np.array([0.0, 1.0]), np.array([1.0 - p, p]), 1 - as_fraction(p), normalize=True)


def quadrature_uniform(a: float, b: float, n: int) -> DiscreteMeasure:
    """n-point Gauss-Legendre discretization of the uniform law on [a, b]."""
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b) and 0.0 <= a < b):
        raise OutOfRange(f"need 0 <= a < b, got a={a!r}, b={b!r}")
    if int(n) != n or n < 2:
        raise OutOfRange(f"need an integer node count n >= 2, got {n!r}")
    t, wt = np.polynomial.legendre.leggauss(int(n))
    x = a + (b - a) * (t + 1.0) / 2.0
    return _finalize(x, wt / 2.0, Fraction(0) if a > 0 else None, normalize=True)


def positive_part(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Condition ``mu`` on (0, inf): drop the atom at 0 and renormalize."""
    if mu.is_delta_zero:
        raise DegenerateAtZero("the point mass at 0 has no positive part")
    if not mu.has_zero_atom:
        return mu
    x, w = mu.x[1:], mu.w[1:]
    return _finalize(x.copy(), w / math.fsum(w), Fraction(0), normalize=True)


def scale(mu: DiscreteMeasure, lam: float) -> DiscreteMeasure:
    """Push-forward of ``mu`` under ``x -> lam * x``."""
    lam = float(lam)
    if not (math.isfinite(lam) and lam >= 0.0):
        raise OutOfRange(f"scale factor must be finite and >= 0, got {lam!r}")
    if lam == 0.0:
        return delta(0.0)
    x = mu.x * lam
    if not np.all(np.isfinite(x)):
        raise OutOfRange("scaled atoms overflow")
    zeros_before = int(mu.has_zero_atom)
    zeros_after = int(np.count_nonzero(x == 0.0))
    zero = mu.zero_mass if zeros_after == zeros_before else None
    return _finalize(x, mu.w.copy(), zero, normalize=True)


def mix(mu0: DiscreteMeasure, mu1: DiscreteMeasure, t: float) -> DiscreteMeasure:
    """Convex combination ``(1 - t) mu0 + t mu1`` for ``t`` in [0, 1]."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise OutOfRange(f"t must lie in [0, 1], got {t!r}")
    if t == 0.0:
        return mu0
    if t == 1.0:
        return mu1
    T = as_fraction(t)
    x = np.concatenate([mu0.x, mu1.x])
    w = np.concatenate([(1.0 - t) * mu0.w, t * mu1.w])
    return _finalize(x, w, (1 - T) * mu0.zero_mass + T * mu1.zero_mass, normalize=True)


def log_moment(mu: DiscreteMeasure) -> float:
    """Integral of log(1 + x); finite for every discrete measure."""
    return math.fsum(mu.w * np.log1p(mu.x))


def load_measure(path: str | Path) -> DiscreteMeasure:
    """Read a measure from JSON (``{"atoms": [{"x":..,"w":..}]}``) or CSV (``x,w``)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if path.suffix.lower() == ".csv":
        rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
        if rows:
            try:
                float(rows[0][0])
            except ValueError:
                rows = rows[1:]
        try:
            pairs = [(float(r[0]), float(r[1])) for r in rows]
        except (ValueError, IndexError) as exc:
            raise InputError(f"malformed CSV measure {path}: {exc}") from None
        return from_atoms(pairs)
    try:
        data = json.loads(text)
        pairs = [(a["x"], a["w"]) for a in data["atoms"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"malformed JSON measure {path}: {exc}") from None
    return from_atoms(pairs)
