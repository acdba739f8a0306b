"""Orbit sources and a convergence harness for symmetric/HS means along orbits.

Three sources emit nonnegative observations ``f(T^i omega)``:

* :class:`IIDSource` draws from a :class:`DiscreteMeasure` (a Bernoulli
  shift);
* :class:`RotationSource` evaluates an observable along the circle rotation
  ``omega -> omega + alpha (mod 1)``;
* :class:`DoublingSource` evaluates an observable along the doubling map,
  realized as a sliding 53-bit window over a stream of fair bits (iterating
  ``2 omega mod 1`` in floating point collapses to 0 after ~53 steps).

Randomness comes from numpy's PCG64.  Replica ``r`` of a run with seed ``s``
uses ``SeedSequence(s).spawn(r + 1)[r]``.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import astuple, dataclass, fields
from fractions import Fraction

import numpy as np

from .core import barycenter
from .errors import OutOfRange, ResourceLimit
from .measures import DiscreteMeasure, bernoulli, empirical, from_atoms, quadrature_uniform
from .symmetric import recurrence_cells, sym_mean

__all__ = [
    "ConvergenceRow",
    "CriticalReport",
    "DoublingSource",
    "IIDSource",
    "Observable",
    "RotationSource",
    "critical_probe",
    "geometric_schedule",
    "iid_bernoulli",
    "observable_rotation",
    "replica_rng",
    "round_rule",
    "rows_to_csv",
    "run_convergence",
]

MAX_CELLS = 10**8
GOLDEN_ALPHA = (math.sqrt(5.0) - 1.0) / 2.0
TARGET_NODES = 512
_WINDOW = 53


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Generator for replica ``replica`` of the run seeded with ``seed``."""
    child = np.random.SeedSequence(int(seed)).spawn(replica + 1)[replica]
    return np.random.Generator(np.random.PCG64(child))


@dataclass(frozen=True)
class Observable:
    """Function on [0, 1) with a known push-forward of Lebesgue measure.

    ``kind`` is ``"affine"`` (``1 + omega``, uniform on [1, 2]) or
    ``"indicator"`` (``a`` on ``[0, q)``, else 0).
    """

    kind: str = "affine"
    q: float = 0.5
    a: float = 1.0

    def __post_init__(self):
        if self.kind not in ("affine", "indicator"):
            raise OutOfRange(f"unknown observable {self.kind!r}")
        if self.kind == "indicator" and not (0.0 <= self.q <= 1.0 and self.a > 0.0):
            raise OutOfRange("indicator needs 0 <= q <= 1 and a > 0")

    def __call__(self, omega):
        return observable_rotation(self, omega)

    def pushforward(self) -> DiscreteMeasure:
        if self.kind == "affine":
            return quadrature_uniform(1.0, 2.0, TARGET_NODES)
        if self.q in (0.0, 1.0):
            return from_atoms([(0.0 if self.q == 0.0 else self.a, 1.0)])
        return from_atoms([(0.0, 1.0 - self.q), (self.a, self.q)])


def observable_rotation(obs: Observable | str, omega):
    """Evaluate a built-in observable at ``omega`` in [0, 1) (scalar or array)."""
    if isinstance(obs, str):
        obs = Observable(obs)
    w = np.asarray(omega, dtype=float)
    if obs.kind == "affine":
        out = 1.0 + w
    else:
        out = np.where(w < obs.q, obs.a, 0.0)
    return float(out) if out.ndim == 0 else out


class IIDSource:
    """i.i.d. draws from a discrete measure (inverse-CDF on PCG64 uniforms)."""

    def __init__(self, mu: DiscreteMeasure, seed: int, replica: int = 0):
        self.mu = mu
        self.seed = int(seed)
        self.replica = replica
        self._rng = replica_rng(seed, replica)
        cdf = np.cumsum(mu.w)
        cdf[-1] = 1.0
        self._cdf = cdf
        self.position = 0

    def take(self, n: int) -> np.ndarray:
        u = self._rng.random(int(n))
        self.position += int(n)
        idx = np.searchsorted(self._cdf, u, side="right")
        return self.mu.x[np.minimum(idx, len(self._cdf) - 1)]

    def law(self) -> DiscreteMeasure:
        return self.mu


class RotationSource:
    """``f(omega_0 + i alpha mod 1)``; positions are computed directly from ``i``."""

    def __init__(self, observable: Observable, alpha: float = GOLDEN_ALPHA, omega0: float = 0.0):
        if not 0.0 < alpha < 1.0:
            raise OutOfRange("rotation angle must lie in (0, 1)")
        if not 0.0 <= omega0 < 1.0:
            raise OutOfRange("start point must lie in [0, 1)")
        self.observable = observable
        self.alpha = float(alpha)
        self.omega0 = float(omega0)
        self.position = 0

    def take(self, n: int) -> np.ndarray:
        i = np.arange(self.position, self.position + int(n), dtype=float)
        self.position += int(n)
        return self.observable(np.mod(self.omega0 + i * self.alpha, 1.0))

    def law(self) -> DiscreteMeasure:
        return self.observable.pushforward()


class DoublingSource:
    """Doubling map orbit over a reservoir of fair bits.

    ``omega_i`` is the dyadic number formed by bits ``i+1 .. i+53`` of the
    stream, exactly ``2^i omega_0 mod 1`` truncated to double precision.
    """

    _POW = np.ldexp(1.0, -np.arange(1, _WINDOW + 1))
    _SHIFTS = np.arange(64, dtype=np.uint64)

    def __init__(self, observable: Observable, seed: int, replica: int = 0):
        self.observable = observable
        self.seed = int(seed)
        self._rng = replica_rng(seed, replica)
        self._bits = np.zeros(0, dtype=np.uint8)
        self.position = 0

    def _need(self, count: int) -> None:
        missing = count - self._bits.size
        if missing > 0:
            words = self._rng.bit_generator.random_raw((missing + 63) // 64)
            bits = ((words[:, None] >> self._SHIFTS) & np.uint64(1)).astype(np.uint8).ravel()
            self._bits = np.concatenate([self._bits, bits])

    def take(self, n: int) -> np.ndarray:
        n = int(n)
        self._need(n + _WINDOW)
        windows = np.lib.stride_tricks.sliding_window_view(self._bits[: n + _WINDOW - 1], _WINDOW)
        omega = windows.astype(float) @ self._POW
        self._bits = self._bits[n:]
        self.position += n
        return self.observable(omega)

    def law(self) -> DiscreteMeasure:
        return self.observable.pushforward()


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    k_n: int
    c_n: float
    sym: float
    hsm: float
    target: float
    rel_err_sym: float
    rel_err_hsm: float


def round_rule(c: float) -> Callable[[int], int]:
    """``k_n = round(c n)`` (half up), clamped to [1, n]."""

    def rule(n: int) -> int:
        return min(n, max(1, math.floor(c * n + 0.5)))

    return rule


def geometric_schedule(n_max: int, n_min: int = 10) -> list[int]:
    """1-2-5 progression from ``n_min`` up to and including ``n_max``."""
    if n_max < 1:
        raise OutOfRange("n_max must be positive")
    out, decade = [], 1
    while decade <= n_max:
        for m in (1, 2, 5):
            n = m * decade
            if n_min <= n <= n_max:
                out.append(n)
        decade *= 10
    if not out or out[-1] != n_max:
        out.append(n_max)
    return out


def _rel_err(value: float, target: float) -> float:
    if math.isnan(value) or not (math.isfinite(target) and target > 0.0):
        return math.nan
    return abs(value / target - 1.0)


def _sym_prefix(values: np.ndarray, k: int, max_cells: int) -> float:
    cells = recurrence_cells(values, k)
    if cells > max_cells:
        raise ResourceLimit(f"symmetric mean of n={values.size}, k={k} needs {cells} cells (limit {max_cells})")
    return sym_mean(values, k)


def run_convergence(
    src,
    c: float,
    schedule: Sequence[int],
    k_rule: Callable[[int], int] | None = None,
    target: float | None = None,
    max_cells: int = MAX_CELLS,
    over_limit: str = "error",
) -> list[ConvergenceRow]:
    """Symmetric and HS means of orbit prefixes at each scheduled length.

    ``target`` defaults to the barycenter of the source's push-forward law.
    The source is consumed from its current position.  When a symmetric
    mean would exceed ``max_cells`` recurrence cells, ``over_limit="error"``
    raises :class:`ResourceLimit` and ``"skip"`` reports ``sym`` as nan.
    """
    if over_limit not in ("error", "skip"):
        raise OutOfRange(f"over_limit must be 'error' or 'skip', got {over_limit!r}")
    schedule = [int(n) for n in schedule]
    if not schedule or schedule[0] < 1 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise OutOfRange("schedule must be a strictly increasing list of positive integers")
    k_rule = k_rule or round_rule(c)
    if target is None:
        target = barycenter(src.law(), c).value
    data = np.empty(0)
    rows = []
    for n in schedule:
        data = np.concatenate([data, src.take(n - data.size)])
        k = int(k_rule(n))
        if not 1 <= k <= n:
            raise OutOfRange(f"k_rule gave k={k} for n={n}")
        try:
            sym = _sym_prefix(data, k, max_cells)
        except ResourceLimit:
            if over_limit == "error":
                raise
            sym = math.nan
        hsm = barycenter(empirical(data), Fraction(k, n)).value
        rows.append(ConvergenceRow(n, k, k / n, sym, hsm, target, _rel_err(sym, target), _rel_err(hsm, target)))
    return rows


@dataclass(frozen=True)
class CriticalReport:
    """Trajectory at the critical parameter; no limit is claimed."""

    rows: list[ConvergenceRow]
    tail_sym_min: float
    tail_sym_max: float
    tail_hsm_min: float
    tail_hsm_max: float


def critical_probe(src, c: float, schedule: Sequence[int], **kwargs) -> CriticalReport:
    """Run the harness and summarize the range over the tail half of the schedule."""
    rows = run_convergence(src, c, schedule, **kwargs)
    tail = rows[len(rows) // 2 :]
    sym = [r.sym for r in tail if not math.isnan(r.sym)] or [math.nan]
    hsm = [r.hsm for r in tail]
    return CriticalReport(rows, min(sym), max(sym), min(hsm), max(hsm))


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows: Iterable[ConvergenceRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f.name for f in fields(ConvergenceRow)])
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def iid_bernoulli(p: float, seed: int, replica: int = 0) -> IIDSource:
    return IIDSource(bernoulli(p), seed, replica)
