import math
from fractions import Fraction

import numpy as np
import pytest

from hsbary.core import barycenter
from hsbary.errors import OutOfRange, ResourceLimit
from hsbary.ergodic import (
    DoublingSource,
    IIDSource,
    Observable,
    RotationSource,
    critical_probe,
    geometric_schedule,
    iid_bernoulli,
    observable_rotation,
    round_rule,
    rows_to_csv,
    run_convergence,
)
from hsbary.measures import delta, empirical, from_atoms
from hsbary.symmetric import sandwich_factor

TARGET_34 = 0.649519052838329


def test_observables():
    assert observable_rotation("affine", 0.0) == 1
    assert observable_rotation("affine", 0.5) == 1.5
    assert observable_rotation(Observable("indicator", q=0.25, a=1), 0.3) == 0
    assert observable_rotation(Observable("indicator", q=0.25, a=2), 0.1) == 2
    with pytest.raises(OutOfRange):
        Observable("cubic")


def test_sources_are_deterministic():
    for make in (
        lambda: iid_bernoulli(0.3, 5),
        lambda: RotationSource(Observable()),
        lambda: DoublingSource(Observable("indicator", q=0.3, a=2), 5),
    ):
        a = make().take(1000)
        s = make()
        b = np.concatenate([s.take(10), s.take(990)])
        assert np.array_equal(a, b)
        assert np.all(a >= 0)


def test_replicas_differ():
    a = IIDSource(from_atoms([(1, 0.5), (2, 0.5)]), 7, replica=0).take(100)
    b = IIDSource(from_atoms([(1, 0.5), (2, 0.5)]), 7, replica=1).take(100)
    assert not np.array_equal(a, b)


def test_iid_frequencies():
    x = iid_bernoulli(0.75, 0).take(100_000)
    assert abs(np.mean(x) - 0.75) < 0.01


def test_doubling_is_uniform_and_shifts():
    src = DoublingSource(Observable(), 3)
    w = src.take(50_000) - 1.0
    assert abs(w.mean() - 0.5) < 0.01
    assert np.all((w >= 0) & (w < 1))
    # omega_{i+1} = 2 omega_i mod 1, up to the bit entering at the bottom
    assert np.all(np.abs(np.mod(2 * w[:-1], 1.0) - w[1:]) <= 2.0**-50)


def test_rotation_orbit():
    src = RotationSource(Observable(), alpha=0.25, omega0=0.1)
    assert src.take(5).tolist() == pytest.approx([1.1, 1.35, 1.6, 1.85, 1.1])


def test_round_rule_and_schedule():
    rule = round_rule(0.5)
    assert [rule(n) for n in (1, 2, 3, 5, 10)] == [1, 1, 2, 3, 5]
    assert round_rule(0.01)(10) == 1
    assert geometric_schedule(1000) == [10, 20, 50, 100, 200, 500, 1000]
    assert geometric_schedule(300) == [10, 20, 50, 100, 200, 300]


def test_run_convergence_constant():
    rows = run_convergence(IIDSource(delta(2.5), 0), 0.3, [1, 10, 100])
    for r in rows:
        assert r.sym == pytest.approx(2.5, rel=1e-14) and r.hsm == pytest.approx(2.5, rel=1e-14)
        assert 1 <= r.k_n <= r.n


def test_run_convergence_rows_consistent():
    rows = run_convergence(iid_bernoulli(0.75, 1), 0.5, [10, 100, 1000])
    for r in rows:
        assert r.c_n == r.k_n / r.n
        assert r.target == pytest.approx(TARGET_34, rel=1e-14)
        assert r.rel_err_sym == abs(r.sym / r.target - 1)
        assert r.rel_err_hsm == abs(r.hsm / r.target - 1)


def test_hsm_equals_empirical_barycenter_and_sandwich():
    src = iid_bernoulli(0.7, 2)
    rows = run_convergence(src, 0.5, [10, 50, 200])
    data = iid_bernoulli(0.7, 2).take(200)
    for r in rows:
        prefix = data[: r.n]
        want = barycenter(empirical(prefix), Fraction(r.k_n, r.n)).value
        assert r.hsm == pytest.approx(want, rel=1e-12, abs=0)
        f = sandwich_factor(r.n, r.k_n)
        assert r.hsm <= r.sym * (1 + 1e-9) and r.sym <= f * r.hsm * (1 + 1e-9)


def test_iid_convergence_seed_42():
    rows = run_convergence(iid_bernoulli(0.75, 42), 0.5, [1000, 10_000, 100_000])
    assert rows[-1].rel_err_sym <= 0.02


def test_supercritical_hits_zero():
    rows = run_convergence(iid_bernoulli(0.4, 3), 0.5, geometric_schedule(100_000, 100))
    assert rows[-1].sym == 0 and rows[-1].hsm == 0
    first = next(i for i, r in enumerate(rows) if r.sym == 0)
    assert all(r.sym == 0 for r in rows[first:])


def test_critical_probe_reports_without_assertion():
    rep = critical_probe(iid_bernoulli(0.5, 4), 0.5, geometric_schedule(10_000))
    assert rep.tail_sym_min <= rep.tail_sym_max
    assert len(rep.rows) == len(geometric_schedule(10_000))
    rep = critical_probe(IIDSource(delta(1.0), 0), 0.0, [10, 100])
    assert rep.tail_sym_min == pytest.approx(1, rel=1e-14) and rep.tail_sym_max == pytest.approx(1, rel=1e-14)


def test_subcritical_contrast_converges():
    rows = run_convergence(iid_bernoulli(0.5, 5), 0.49, [1000, 100_000])
    assert rows[-1].rel_err_hsm < 0.05


def test_rotation_affine_target():
    rows = run_convergence(RotationSource(Observable()), 0.5, [100, 1000, 5000])
    assert rows[0].target == pytest.approx(1.485926, abs=1e-6)
    assert rows[-1].rel_err_sym < 1e-3 and rows[-1].rel_err_hsm < 1e-3


def test_indicator_target():
    obs = Observable("indicator", q=0.75, a=1.0)
    rows = run_convergence(RotationSource(obs), 0.5, [10_000])
    assert rows[0].target == pytest.approx(TARGET_34, rel=1e-14)
    assert rows[0].rel_err_hsm < 1e-2


def test_resource_guard_and_skip():
    with pytest.raises(ResourceLimit):
        run_convergence(RotationSource(Observable()), 0.5, [1000], max_cells=1000)
    rows = run_convergence(RotationSource(Observable()), 0.5, [1000], max_cells=1000, over_limit="skip")
    assert math.isnan(rows[0].sym) and math.isnan(rows[0].rel_err_sym)
    assert rows[0].hsm > 0


def test_schedule_validation():
    with pytest.raises(OutOfRange):
        run_convergence(iid_bernoulli(0.5, 0), 0.5, [10, 10])
    with pytest.raises(OutOfRange):
        run_convergence(iid_bernoulli(0.5, 0), 0.5, [10], k_rule=lambda n: n + 1)


def test_csv_format():
    rows = run_convergence(iid_bernoulli(0.75, 0), 0.5, [10, 100])
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "n,k_n,c_n,sym,hsm,target,rel_err_sym,rel_err_hsm"
    assert len(lines) == 3
    fields = lines[1].split(",")
    assert fields[0] == "10" and fields[1] == "5"
    assert float(fields[5]) == rows[0].target
    assert rows_to_csv(rows) == text
