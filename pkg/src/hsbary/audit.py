"""Randomized verification sweep behind ``hsbary audit``.

Each trial draws fresh tuples/measures from a seeded PCG64 stream and checks
the sandwich inequality and its factor bound, Maclaurin chains, HS <= DHS,
log-concavity along measure segments, concavity of ``c log [mu]_c``, and
the constant-tuple equality case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import barycenter
from .dhs import dhs_barycenter
from .errors import HSError, OutOfRange
from .ergodic import replica_rng
from .measures import delta, from_atoms, mix
from .symmetric import maclaurin_chain, sandwich_bounds, sym_mean

CHECKS = (
    "sandwich",
    "maclaurin",
    "hs_leq_dhs",
    "log_concavity_mu",
    "concavity_c",
    "equality_constant",
)

SANDWICH_SLACK = 1e-9
MACLAURIN_SLACK = 1e-10
DHS_SLACK = 1e-12
CONCAVITY_SLACK = 1e-10
C_GRID_SLACK = 1e-8
C_GRID = np.linspace(0.0, 1.0, 21)


@dataclass
class AuditResult:
    counts: dict[str, list[int]] = field(default_factory=lambda: {name: [0, 0] for name in CHECKS})
    first_failure: dict | None = None

    def record(self, name: str, ok: bool, **detail) -> None:
        self.counts[name][0 if ok else 1] += 1
        if not ok and self.first_failure is None:
            self.first_failure = {"check": name, **detail}

    @property
    def passed(self) -> bool:
        return self.first_failure is None

    def as_dict(self) -> dict:
        return {
            "checks": {k: {"passed": p, "failed": f} for k, (p, f) in self.counts.items()},
            "first_failure": self.first_failure,
        }


def _tuple(rng: np.random.Generator, n_max: int = 8, zero_prob: float = 0.2) -> list[float]:
    n = int(rng.integers(1, n_max + 1))
    x = np.exp(rng.uniform(math.log(1e-6), math.log(1e6), n))
    x[rng.random(n) < zero_prob] = 0.0
    return [float(v) for v in x]


def _positive_measure(rng: np.random.Generator, n_max: int = 6):
    n = int(rng.integers(1, n_max + 1))
    x = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), n))
    w = rng.dirichlet(np.ones(n))
    return from_atoms(list(zip(x.tolist(), w.tolist())), normalize=True)


def _atoms(mu) -> list[list[float]]:
    return [[float(x), float(w)] for x, w in mu.atoms]


def _check_sandwich(rng, res: AuditResult, trial: int) -> None:
    x = _tuple(rng)
    k = int(rng.integers(1, len(x) + 1))
    try:
        lo, s, hi = sandwich_bounds(x, k)
        ok = lo <= s * (1 + SANDWICH_SLACK) and s <= hi * (1 + SANDWICH_SLACK)
    except HSError as exc:
        ok, lo, s, hi = False, str(exc), None, None
    res.record("sandwich", ok, trial=trial, values=x, k=k, lower=lo, sym=s, upper=hi)


def _check_maclaurin(rng, res: AuditResult, trial: int) -> None:
    x = _tuple(rng)
    chain = maclaurin_chain(x)
    ok = all(b <= a * (1 + MACLAURIN_SLACK) for a, b in zip(chain, chain[1:]))
    res.record("maclaurin", ok, trial=trial, values=x, chain=chain)


def _check_dhs(rng, res: AuditResult, trial: int) -> None:
    mu = _positive_measure(rng)
    if rng.random() < 0.3:
        mu = mix(delta(0.0), mu, float(rng.uniform(0.2, 1.0)))
    c = float(rng.uniform(0.0, 1.0))
    hs = barycenter(mu, c).value
    d = dhs_barycenter(mu, c).value
    res.record("hs_leq_dhs", hs <= d * (1 + DHS_SLACK), trial=trial, measure=_atoms(mu), c=c, hs=hs, dhs=d)


def _check_log_concavity(rng, res: AuditResult, trial: int) -> None:
    mu0, mu1 = _positive_measure(rng), _positive_measure(rng)
    c = float(rng.uniform(0.05, 0.95))
    t = float(rng.uniform(0.0, 1.0))
    lhs = math.log(barycenter(mix(mu0, mu1, t), c).value)
    rhs = (1 - t) * math.log(barycenter(mu0, c).value) + t * math.log(barycenter(mu1, c).value)
    res.record(
        "log_concavity_mu",
        lhs >= rhs - CONCAVITY_SLACK * (1 + abs(rhs)),
        trial=trial,
        mu0=_atoms(mu0),
        mu1=_atoms(mu1),
        c=c,
        t=t,
        lhs=lhs,
        rhs=rhs,
    )


def _check_concavity_c(rng, res: AuditResult, trial: int) -> None:
    mu = _positive_measure(rng)
    f = np.array([0.0 if c == 0.0 else c * math.log(barycenter(mu, float(c)).value) for c in C_GRID])
    d2 = f[2:] - 2 * f[1:-1] + f[:-2]
    worst = float(d2.max())
    tol = C_GRID_SLACK * (1 + float(np.abs(f).max()))
    res.record("concavity_c", worst <= tol, trial=trial, measure=_atoms(mu), max_second_difference=worst)


def _check_constant(rng, res: AuditResult, trial: int) -> None:
    n = int(rng.integers(1, 9))
    a = float(np.exp(rng.uniform(math.log(1e-6), math.log(1e6))))
    x = [a] * n
    worst = 0.0
    for k in range(1, n + 1):
        lo, s, _ = sandwich_bounds(x, k)
        worst = max(worst, abs(lo / a - 1), abs(s / a - 1), abs(sym_mean(x, k) / a - 1))
    res.record("equality_constant", worst <= 1e-12, trial=trial, value=a, n=n, max_rel_dev=worst)


def run_audit(trials: int, seed: int) -> AuditResult:
    if trials < 0:
        raise OutOfRange("trials must be nonnegative")
    rng = replica_rng(seed)
    res = AuditResult()
    for trial in range(trials):
        _check_sandwich(rng, res, trial)
        _check_maclaurin(rng, res, trial)
        _check_dhs(rng, res, trial)
        _check_log_concavity(rng, res, trial)
        _check_concavity_c(rng, res, trial)
        _check_constant(rng, res, trial)
    return res


@dataclass(frozen=True)
class NonQADemo:
    c: float
    endpoint_value: float
    rows: list[tuple[float, float]]


def nonquasiaffine_demo(steps: int = 8) -> NonQADemo:
    """Segment from ``delta_4`` to ``(delta_1 + delta_9)/2`` at ``c = 1/2``.

    Both endpoints have barycenter 4 but different ``eta`` (4 and 3), so
    the barycenter is strictly larger in the interior.
    """
    c = 0.5
    mu0 = delta(4.0)
    mu1 = from_atoms([(1.0, 0.5), (9.0, 0.5)])
    rows = [(t, barycenter(mix(mu0, mu1, t), c).value) for t in np.linspace(0.0, 1.0, steps + 1).tolist()]
    return NonQADemo(c, barycenter(mu0, c).value, rows)
