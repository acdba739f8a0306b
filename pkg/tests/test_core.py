import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from closed_forms import hs_bernoulli
from hsbary.core import (
    Regime,
    ZeroReason,
    b_function,
    barycenter,
    barycenter_oldstyle,
    classify,
    induce_identity_check,
    is_zero_barycenter,
    kernel,
    kernel_integral,
    psi,
    segment_second_derivative,
    solve_eta,
    solve_rho,
)
from hsbary.errors import DegenerateAtZero, NonpositiveY, NotSubcritical, OutOfRange, SupercriticalInput
from hsbary.measures import bernoulli, delta, empirical, from_atoms, mix, quadrature_uniform, scale
from hsbary.oracles import grid_min_barycenter

TWO_POINT = from_atoms([(1, 0.5), (9, 0.5)])


def random_measure(rng, n_max=6, lo=1e-3, hi=1e3, zero_prob=0.0):
    n = int(rng.integers(1, n_max + 1))
    x = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    x[rng.random(n) < zero_prob] = 0.0
    w = rng.dirichlet(np.ones(n))
    return from_atoms(list(zip(x.tolist(), w.tolist())), normalize=True)


# kernel


@pytest.mark.parametrize("x, y", [(2.0, 5.0), (0.3, 0.01), (7.0, 7.0)])
def test_kernel_at_c1_is_log_x(x, y):
    assert kernel(x, y, 1) == pytest.approx(math.log(x), rel=1e-15)


@pytest.mark.parametrize("c", [0, 0.2, 0.5, 0.9, 1])
def test_kernel_diagonal(c):
    assert kernel(3.0, 3.0, c) == pytest.approx(math.log(3.0), rel=1e-15)


def test_kernel_minus_infinity():
    assert kernel(0, 2, 1) == -math.inf


def test_kernel_c0_branch():
    assert kernel(3.0, 2.0, 0) == pytest.approx(math.log(2) + 1.5 - 1, rel=1e-15)


def test_kernel_rejects_bad_y():
    with pytest.raises(NonpositiveY):
        kernel(1.0, 0.0, 0.5)
    with pytest.raises(OutOfRange):
        kernel(1.0, 1.0, 1.5)


@settings(max_examples=300, deadline=None)
@given(
    st.floats(1e-6, 1e6),
    st.floats(1e-6, 1e6),
    st.floats(0.0, 1.0),
)
def test_kernel_dominates_log_x(x, y, c):
    assert kernel(x, y, c) >= math.log(x) - 1e-12 * (1 + abs(math.log(x)))


def test_kernel_monotone_in_c_and_x():
    rng = np.random.default_rng(3)
    for _ in range(300):
        x, y = np.exp(rng.uniform(-5, 5, 2))
        c1, c2 = sorted(rng.uniform(0, 1, 2))
        assert kernel(x, y, c1) >= kernel(x, y, c2) - 1e-12
        assert kernel(x * 1.5, y, c1) >= kernel(x, y, c1)


# B(c)


def test_b_function_values():
    assert b_function(0) == 0 and b_function(1) == 1
    assert b_function(0.5) == 0.25
    assert b_function(1 / 3) == pytest.approx(4 / 27, rel=1e-15)
    assert b_function(Fraction(1, 3)) == pytest.approx(4 / 27, rel=1e-15)


def test_b_function_continuous_at_edges():
    assert b_function(1e-9) < 1e-8
    assert b_function(1 - 1e-9) == pytest.approx(1.0, abs=1e-7)


def test_b_function_out_of_range():
    with pytest.raises(OutOfRange):
        b_function(-0.1)


# classification


def test_classify_examples():
    mu = bernoulli(0.5)
    assert classify(mu, 0.25) is Regime.SUBCRITICAL
    assert classify(mu, 0.5) is Regime.CRITICAL
    assert classify(bernoulli(0.4), 0.5) is Regime.SUPERCRITICAL
    assert classify(mu, 0) is Regime.ARITHMETIC_EDGE
    assert classify(mu, 1) is Regime.GEOMETRIC_EDGE


def test_classify_exact_with_fraction():
    mu = empirical([0, 0, 4, 5, 6])
    assert classify(mu, Fraction(3, 5)) is Regime.CRITICAL
    assert classify(mu, 0.6) is Regime.CRITICAL
    assert classify(mu, math.nextafter(0.6, 1)) is Regime.SUPERCRITICAL
    assert classify(mu, math.nextafter(0.6, 0)) is Regime.SUBCRITICAL


# psi / eta / rho


def test_psi_zero_at_eta():
    assert psi(TWO_POINT, 0.5, 3.0) == pytest.approx(0, abs=1e-15)
    assert psi(delta(2.5), 0.3, 2.5) == pytest.approx(0, abs=1e-15)
    mu = quadrature_uniform(1, 2, 64)
    assert abs(psi(mu, 0.5, solve_eta(mu, 0.5))) <= 1e-14


def test_psi_monotone_and_limits():
    mu = from_atoms([(0, 0.2), (1, 0.3), (4, 0.5)])
    c = 0.6
    ys = np.geomspace(1e-8, 1e8, 50)
    vals = [psi(mu, c, y) for y in ys]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(1 - 0.8 / c, abs=1e-6)
    assert vals[-1] == pytest.approx(1, abs=1e-6)


def test_psi_rejects_delta_zero():
    with pytest.raises(DegenerateAtZero):
        psi(delta(0), 0.5, 1.0)


def test_solve_eta_examples():
    assert solve_eta(TWO_POINT, 0.5) == pytest.approx(3, rel=1e-14)
    assert solve_eta(delta(7.5), 0.3) == 7.5
    eta = solve_eta(quadrature_uniform(1, 2, 64), 0.5)
    assert 1 <= eta <= 2


def test_solve_eta_not_subcritical():
    with pytest.raises(NotSubcritical):
        solve_eta(bernoulli(0.5), 0.5)


def test_rho_eta_relation():
    rng = np.random.default_rng(5)
    for _ in range(50):
        mu = random_measure(rng, zero_prob=0.2)
        c = float(rng.uniform(0.05, 0.95))
        if classify(mu, c) is not Regime.SUBCRITICAL:
            continue
        rep = barycenter(mu, c)
        assert rep.rho == pytest.approx((1 - c) / c * rep.eta, rel=1e-12)
        assert solve_rho(mu, c) == pytest.approx(rep.rho, rel=1e-10)


# barycenter


def test_barycenter_examples():
    assert barycenter(bernoulli(0.75), 0.5).value == pytest.approx(0.649519052838329, rel=1e-14)
    assert barycenter(bernoulli(0.5), 0.5).value == 0.25
    assert barycenter(bernoulli(0.4), 0.5).value == 0.0
    assert barycenter(from_atoms([(0, 0.5), (2, 0.5)]), 0.5).value == pytest.approx(0.5, rel=1e-15)
    rep = barycenter(TWO_POINT, 0.5)
    assert rep.value == pytest.approx(4, rel=1e-14)
    assert rep.eta == pytest.approx(3, rel=1e-14)


def test_barycenter_report_fields_by_regime():
    sub = barycenter(bernoulli(0.75), 0.5)
    assert sub.regime is Regime.SUBCRITICAL and sub.eta is not None and sub.rho is not None
    crit = barycenter(bernoulli(0.5), 0.5)
    assert crit.regime is Regime.CRITICAL and crit.eta is None
    sup = barycenter(bernoulli(0.4), 0.5)
    assert sup.regime is Regime.SUPERCRITICAL and sup.eta is None
    edge = barycenter(TWO_POINT, 0)
    assert edge.regime is Regime.ARITHMETIC_EDGE and edge.value == 5 and edge.eta == 5


def test_barycenter_edges():
    mu = from_atoms([(1, 0.25), (4, 0.75)])
    assert barycenter(mu, 0).value == pytest.approx(3.25, rel=1e-15)
    assert barycenter(mu, 1).value == pytest.approx(4**0.75, rel=1e-15)
    assert barycenter(bernoulli(0.9), 1).value == 0.0


def test_barycenter_bernoulli_closed_form_grid():
    for k in range(21):
        for j in range(1, 20):
            p, c = k / 20, j / 20
            got = barycenter(bernoulli(p), c).value
            want = hs_bernoulli(p, c)
            if want == 0:
                assert got == 0
            else:
                assert got == pytest.approx(want, rel=1e-12)


def test_barycenter_matches_grid_oracle():
    rng = np.random.default_rng(11)
    for _ in range(30):
        mu = random_measure(rng, zero_prob=0.15)
        c = float(rng.uniform(0.05, 0.95))
        if classify(mu, c) is not Regime.SUBCRITICAL:
            continue
        v = barycenter(mu, c).value
        g = grid_min_barycenter(mu, c, grid=10_000)
        assert g >= v * (1 - 1e-12)
        assert g <= v * (1 + 1e-6)


def test_grid_oracle_not_attained_outside_subcritical():
    for mu, c in [(bernoulli(0.5), 0.5), (bernoulli(0.3), 0.5)]:
        v = barycenter(mu, c).value
        gs = [grid_min_barycenter(mu, c, grid=2000, lo=lo, hi=1e3) for lo in (1e-2, 1e-4, 1e-6)]
        assert all(g > v for g in gs)
        assert gs[0] > gs[1] > gs[2]


@pytest.mark.parametrize("a", [0.0, 1e-8, 0.37, 5.0, 1e12])
@pytest.mark.parametrize("c", [0.0, 0.3, 0.5, 0.99, 1.0])
def test_reflexivity(a, c):
    v = barycenter(delta(a), c).value
    if a == 0:
        assert v == 0
    else:
        assert v == pytest.approx(a, rel=1e-12)


@pytest.mark.parametrize("lam", [0, 0.5, 3, 1e6])
def test_homogeneity(lam):
    rng = np.random.default_rng(2)
    for _ in range(20):
        mu = random_measure(rng, zero_prob=0.2)
        for c in (0.0, 0.25, 0.5, 0.8, 1.0):
            base = barycenter(mu, c).value
            got = barycenter(scale(mu, lam), c).value
            assert got == pytest.approx(lam * base, rel=1e-10, abs=1e-300)


def test_internality():
    rng = np.random.default_rng(4)
    for _ in range(100):
        mu = random_measure(rng)
        c = float(rng.uniform(0, 1))
        rep = barycenter(mu, c)
        m, M = mu.support_min, mu.support_max
        assert m * (1 - 1e-12) <= rep.value <= M * (1 + 1e-12)
        if rep.eta is not None:
            assert m * (1 - 1e-12) <= rep.eta <= M * (1 + 1e-12)


def test_monotone_in_c():
    rng = np.random.default_rng(6)
    cs = np.linspace(0, 1, 21)
    for _ in range(30):
        mu = random_measure(rng, zero_prob=0.2)
        vals = [barycenter(mu, float(c)).value for c in cs]
        scale_ = max(vals)
        assert all(b <= a + 1e-12 * scale_ for a, b in zip(vals, vals[1:]))


def test_monotone_in_measure():
    rng = np.random.default_rng(7)
    for _ in range(50):
        mu = random_measure(rng, zero_prob=0.2)
        shift = np.exp(rng.uniform(0, 1, len(mu)))
        moved = from_atoms(list(zip((mu.x * shift + rng.uniform(0, 1, len(mu))).tolist(), mu.w.tolist())))
        c = float(rng.uniform(0, 1))
        a, b = barycenter(mu, c).value, barycenter(moved, c).value
        assert a <= b + 1e-12 * max(a, b)


def test_log_concavity_in_measure():
    rng = np.random.default_rng(8)
    for _ in range(40):
        mu0, mu1 = random_measure(rng), random_measure(rng)
        c = float(rng.uniform(0.05, 0.95))
        l0, l1 = math.log(barycenter(mu0, c).value), math.log(barycenter(mu1, c).value)
        for t in np.linspace(0.1, 0.9, 5):
            lt = math.log(barycenter(mix(mu0, mu1, float(t)), c).value)
            assert lt >= (1 - t) * l0 + t * l1 - 1e-10


def test_newton_concavity_in_c():
    rng = np.random.default_rng(9)
    cs = np.linspace(0, 1, 41)
    for _ in range(20):
        mu = random_measure(rng, zero_prob=0.0)
        f = np.array([0.0 if c == 0 else c * math.log(barycenter(mu, float(c)).value) for c in cs])
        assert np.max(f[2:] - 2 * f[1:-1] + f[:-2]) <= 1e-8


# oldstyle route


def test_oldstyle_examples():
    rep = barycenter_oldstyle(TWO_POINT, 0.5)
    assert rep.value == pytest.approx(4, rel=1e-12)
    assert rep.rho == pytest.approx(3, rel=1e-12) and rep.eta == pytest.approx(3, rel=1e-12)
    assert barycenter_oldstyle(delta(2.5), 0.3).value == pytest.approx(2.5, rel=1e-14)
    assert barycenter_oldstyle(bernoulli(0.75), 0.5).value == pytest.approx(0.649519052838329, rel=1e-12)


def test_oldstyle_agrees():
    rng = np.random.default_rng(10)
    for _ in range(100):
        mu = random_measure(rng, zero_prob=0.2)
        c = float(rng.uniform(0.02, 1.0))
        a, b = barycenter(mu, c).value, barycenter_oldstyle(mu, c).value
        assert b == pytest.approx(a, rel=1e-10, abs=0)


def test_oldstyle_rejects_c0():
    with pytest.raises(OutOfRange):
        barycenter_oldstyle(TWO_POINT, 0)


# induced identity


def test_induce_examples():
    lhs, rhs = induce_identity_check(bernoulli(0.75), 0.5)
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert lhs == pytest.approx(0.649519052838329, rel=1e-12)
    lhs, rhs = induce_identity_check(TWO_POINT, 0.5)
    assert lhs == rhs
    lhs, rhs = induce_identity_check(bernoulli(0.5), 0.5)
    assert rhs == 0.25 and lhs == 0.25


def test_induce_random():
    rng = np.random.default_rng(12)
    for _ in range(100):
        mu = random_measure(rng, zero_prob=0.3)
        p = 1 - mu.zero_mass
        if p == 0:
            continue
        c = float(rng.uniform(0.01, 1.0)) * float(p)
        lhs, rhs = induce_identity_check(mu, c)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_induce_supercritical_rejected():
    with pytest.raises(SupercriticalInput):
        induce_identity_check(bernoulli(0.4), 0.5)


# zero barycenter


def test_is_zero_examples():
    assert is_zero_barycenter(delta(0), 0) == (True, ZeroReason.DELTA_ZERO)
    assert is_zero_barycenter(bernoulli(0.4), 0.5) == (True, ZeroReason.SUPERCRITICAL)
    assert is_zero_barycenter(bernoulli(0.75), 0.5) == (False, None)


def test_is_zero_agrees_with_value():
    rng = np.random.default_rng(13)
    for _ in range(200):
        mu = random_measure(rng, zero_prob=0.4)
        c = float(rng.uniform(0, 1))
        zero, reason = is_zero_barycenter(mu, c)
        assert zero == (barycenter(mu, c).value == 0)
        assert reason is not ZeroReason.CRITICAL_WITH_LOG_DIVERGENCE


def test_delta_zero_is_zero_everywhere():
    for c in (0, 0.3, 1):
        assert is_zero_barycenter(delta(0), c)[0]
        assert barycenter(delta(0), c).value == 0


# second derivative along segments


def _fd_second(mu0, mu1, c, t, h=1e-4):
    f = lambda s: math.log(barycenter(mix(mu0, mu1, s), c).value)  # noqa: E731
    return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)


def test_second_derivative_constant_path():
    assert segment_second_derivative(TWO_POINT, TWO_POINT, 0.5, 0.3) == 0


def test_second_derivative_equal_eta():
    # both have eta = 3 at c = 1/2
    mu1 = from_atoms([(3, 1.0)])
    assert segment_second_derivative(TWO_POINT, mu1, 0.5, 0.4) == pytest.approx(0, abs=1e-15)


def test_second_derivative_matches_finite_difference():
    d2 = segment_second_derivative(TWO_POINT, delta(4), 0.5, 0.5)
    assert d2 < 0
    assert d2 == pytest.approx(_fd_second(TWO_POINT, delta(4), 0.5, 0.5), rel=1e-5)


def test_second_derivative_needs_subcritical():
    with pytest.raises(NotSubcritical):
        segment_second_derivative(bernoulli(0.5), delta(1), 0.5, 0.5)


def test_kernel_integral_minimized_at_eta():
    mu = from_atoms([(0.5, 0.2), (2, 0.3), (7, 0.5)])
    c = 0.4
    eta = solve_eta(mu, c)
    v = kernel_integral(mu, eta, c)
    for y in (eta * 0.99, eta * 1.01):
        assert kernel_integral(mu, y, c) > v
