"""Samplers vs analytic CDFs, moment identities, and the tail quadrature."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from rootpacket import limit_laws as ll

SQRT_PI = math.sqrt(math.pi)

# frozen quadrature values, cross-checked against QUADPACK on the (y, z)
# form and against 2e7-draw Monte Carlo during development
FROZEN_TAILS = {
    (0.0, 0.0, 0.5): 0.6900793208804785,
    (1.0, 0.5, 0.1): 0.02096545264679687,
    (0.5, 1.0, 0.1): 0.006731051831749906,
    (1.0, 0.0, 0.1): 0.1340516508437572,
    (0.5, 0.5, 0.1): 0.061651677485549644,
}


def test_param_validation():
    with pytest.raises(ValueError):
        ll.BetaParams(0, 1)
    with pytest.raises(ValueError):
        ll.GGParams(2, -1)
    with pytest.raises(ValueError):
        ll.ConditionalLimitParams(k=2, m=2)  # needs 2(k-1) > m
    ll.ConditionalLimitParams(k=2, m=1)


def test_analytic_cdf_values():
    assert ll.analytic_cdf(ll.BetaParams(1, 2), 0.5) == pytest.approx(0.75, rel=1e-14)
    assert ll.analytic_cdf(ll.BetaParams(3, 1), 0.5) == pytest.approx(0.125, rel=1e-14)
    gg = ll.GGParams(3, 2)
    assert ll.analytic_cdf(gg, 0.0) == 0.0
    assert ll.analytic_cdf(gg, 50.0) == pytest.approx(1.0, abs=1e-15)
    # beta(1,2) has the closed form 2x - x^2
    xs = np.linspace(0, 1, 11)
    assert np.allclose(ll.analytic_cdf(ll.BetaParams(1, 2), xs), 2 * xs - xs**2, rtol=1e-13)


def test_gg_cdf_matches_incomplete_gamma_substitution():
    from scipy.special import gammainc
    xs = np.array([0.1, 0.7, 1.3, 2.5])
    got = ll.analytic_cdf(ll.GGParams(3, 2), xs)
    assert np.allclose(got, gammainc(1.5, xs**2), rtol=1e-13)


def test_beta_mean_against_numeric_integration():
    p = ll.BetaParams(3, 1)
    dens = lambda x: math.gamma(4) / (math.gamma(3) * math.gamma(1)) * x**2
    val, _ = integrate.quad(lambda x: x * dens(x), 0, 1)
    assert ll.beta_mean(p) == pytest.approx(val, rel=1e-10) == pytest.approx(0.75)


def test_gg_mean_against_numeric_integration():
    p = ll.GGParams(5, 2)
    dens = lambda x: 2 / math.gamma(2.5) * x**4 * math.exp(-(x**2))
    val, _ = integrate.quad(lambda x: x * dens(x), 0, 20)
    assert ll.gg_mean(p) == pytest.approx(val, rel=1e-10)
    assert ll.gg_mean(p) == pytest.approx(8 / (3 * SQRT_PI), rel=1e-13)


@pytest.mark.parametrize("params", [ll.BetaParams(1, 2), ll.BetaParams(3, 1), ll.BetaParams(1, 1)])
def test_beta_sampler_ks(params):
    rng = np.random.default_rng(101)
    draws = ll.sample_beta(params, rng, size=1_000_000)
    d = stats.kstest(draws, lambda x: ll.analytic_cdf(params, x)).statistic
    assert d <= 0.002


@pytest.mark.parametrize("params", [ll.GGParams(5, 2), ll.GGParams(3, 2)])
def test_gg_sampler_ks(params):
    rng = np.random.default_rng(103)
    draws = ll.sample_gg(params, rng, size=1_000_000)
    d = stats.kstest(draws, lambda x: ll.analytic_cdf(params, x)).statistic
    assert d <= 0.002


def test_gg_with_unit_power_reduces_to_gamma():
    rng = np.random.default_rng(105)
    draws = ll.sample_gg(ll.GGParams(2, 1), rng, size=200_000)
    d = stats.kstest(draws, stats.gamma(2).cdf).statistic
    assert d <= 0.005


def test_beta_sampler_means():
    rng = np.random.default_rng(107)
    n = 1_000_000
    u = ll.sample_beta(ll.BetaParams(1, 1), rng, size=n)
    assert abs(u.mean() - 0.5) < 3 * u.std(ddof=1) / math.sqrt(n)
    b31 = ll.sample_beta(ll.BetaParams(3, 1), rng, size=n)
    assert abs(b31.mean() - 0.75) < 3 * b31.std(ddof=1) / math.sqrt(n)


def test_gg52_sampler_mean():
    rng = np.random.default_rng(109)
    n = 1_000_000
    z = ll.sample_gg(ll.GGParams(5, 2), rng, size=n)
    assert abs(z.mean() - 8 / (3 * SQRT_PI)) < 3 * z.std(ddof=1) / math.sqrt(n)


# -- joint limit ---------------------------------------------------------------

def test_combine_joint_deterministic_mapping():
    s = ll.combine_joint(0.5, 1.0, 1.0)
    assert s.d1 == pytest.approx(0.5, rel=1e-15)
    assert s.d2 == pytest.approx(0.5, rel=1e-15)


def test_joint_sum_identity():
    rng = np.random.default_rng(111)
    b1 = ll.sample_beta(ll.JOINT_B1, rng, size=10_000)
    b2 = ll.sample_beta(ll.JOINT_B2, rng, size=10_000)
    z3 = ll.sample_gg(ll.JOINT_Z3, rng, size=10_000)
    s = ll.combine_joint(b1, b2, z3)
    assert np.allclose(s.d1 + s.d2, b2 * z3, rtol=1e-12)
    assert np.all(s.d1 + s.d2 > 0)


def test_joint_marginal_means():
    rng = np.random.default_rng(113)
    s = ll.sample_adam_eve_limit(rng, size=1_000_000)
    ez = 8 / (3 * SQRT_PI)
    for arr, want in ((s.d1, 0.25 * ez), (s.d2, 0.5 * ez)):
        se = arr.std(ddof=1) / math.sqrt(len(arr))
        assert abs(arr.mean() - want) < 3 * se


def test_joint_small_tail_linear_in_eps():
    # P(d1 <= eps) ~ C * eps; the ratio must be stable across a grid
    rng = np.random.default_rng(115)
    s = ll.sample_adam_eve_limit(rng, size=4_000_000)
    ratios = [np.mean(s.d1 <= eps) / eps for eps in (0.04, 0.02, 0.01)]
    spread = max(ratios) / min(ratios)
    assert spread < 1.25


def test_role_swap_symmetry():
    # the pair conditioned on "3 ~ 1" is the coordinate swap (d2, d1);
    # two-sample KS coordinate-wise against an independent swapped draw
    rng = np.random.default_rng(117)
    a = ll.sample_adam_eve_limit(rng, size=200_000)
    b = ll.sample_adam_eve_limit(rng, size=200_000)
    swapped = ll.JointLimitSample(d1=b.d2, d2=b.d1)  # the (3 ~ 1) pair
    assert stats.ks_2samp(a.d1, swapped.d2).statistic < 0.005
    assert stats.ks_2samp(a.d2, swapped.d1).statistic < 0.005
    # and the two coordinates are genuinely different laws
    assert stats.ks_2samp(a.d1, a.d2).statistic > 0.05


# -- conditional limit -----------------------------------------------------------

def test_conditional_mean_k2_m1():
    p = ll.ConditionalLimitParams(k=2, m=1)
    assert ll.conditional_mean(p) == pytest.approx(1 / SQRT_PI, rel=1e-13)
    rng = np.random.default_rng(119)
    x = ll.sample_limit_degree_conditional(p, rng, size=1_000_000)
    se = x.std(ddof=1) / math.sqrt(len(x))
    assert abs(x.mean() - 1 / SQRT_PI) < 3 * se


def test_conditional_mean_large_index_asymptotics():
    p = ll.ConditionalLimitParams(k=100, m=1)
    exact = ll.conditional_mean(p)
    assert exact == pytest.approx(0.050315379923188209819, rel=1e-12)
    assert abs(exact - 0.05) / 0.05 < 0.10  # ~ 1/(2 sqrt(i))
    rng = np.random.default_rng(121)
    x = ll.sample_limit_degree_conditional(p, rng, size=400_000)
    se = x.std(ddof=1) / math.sqrt(len(x))
    assert abs(x.mean() - exact) < 3 * se


def test_conditional_beta_tail_closed_form():
    # for k=i, m=1: P(1 - B >= x) = (1-x)^(2i-3); i=5, x=0.3
    i, x = 5, 0.3
    p = ll.ConditionalLimitParams(k=i, m=1)
    rng = np.random.default_rng(123)
    b = ll.sample_beta(p.beta_params(), rng, size=1_000_000)
    emp = np.mean(1 - b >= x)
    want = (1 - x) ** (2 * i - 3)
    assert abs(emp - want) < 3 * math.sqrt(want * (1 - want) / len(b))


# -- quadrature ------------------------------------------------------------------

def test_joint_tail_frozen_values():
    for (a, b, eps), want in FROZEN_TAILS.items():
        assert ll.joint_tail_probability(a, b, eps) == pytest.approx(want, abs=1e-7)


def test_joint_tail_validation():
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError):
            ll.joint_tail_probability(1.0, 0.5, bad)


def test_joint_tail_total_mass():
    # thresholds >= 20 on both coordinates: effectively no constraint
    eps = 0.05
    a = b = math.log(25.0) / math.log(eps)  # eps^a = 25
    assert ll.joint_tail_probability(a, b, eps) == pytest.approx(1.0, abs=1e-6)


def test_joint_tail_against_independent_quadpack_route():
    """QUADPACK nested integration of the same densities, organized (y, z)."""
    def h(t, s, u):
        if t <= 0:
            return 1.0
        hi = min(1.0, s / t)
        lo = max(0.0, 1.0 - u / t)
        if hi <= lo:
            return 0.0
        F = lambda x: 2 * x - x * x
        return F(hi) - F(lo)

    def reference(a, b, eps):
        s, u = eps**a, eps**b
        cz = 2.0 / math.gamma(2.5)

        def inner(z):
            pts = sorted({p / z for p in (s, u, s + u) if 0 < p / z < 1})
            v, _ = integrate.quad(lambda y: 3 * y * y * h(y * z, s, u), 0, 1,
                                  points=pts, limit=200, epsabs=1e-11)
            return v

        pts = sorted({p for p in (s, u, s + u) if 0 < p < 8.0})
        v, _ = integrate.quad(lambda z: cz * z**4 * math.exp(-z * z) * inner(z),
                              0, 8.0, points=pts, limit=200, epsabs=1e-10)
        return v

    for (a, b, eps) in [(1.0, 0.5, 0.2), (0.5, 1.0, 0.15), (0.75, 0.25, 0.1), (0.0, 0.0, 0.5)]:
        mine = ll.joint_tail_probability(a, b, eps)
        ref = reference(a, b, eps)
        assert mine == pytest.approx(ref, abs=2e-7), (a, b, eps)


def test_joint_tail_against_monte_carlo():
    # 3x3 grid of exponent pairs, two epsilons, one shared 1e7-draw sample
    rng = np.random.default_rng(127)
    n = 10_000_000
    s = ll.sample_adam_eve_limit(rng, size=n)
    for a in (0.0, 0.5, 1.0):
        for b in (0.0, 0.5, 1.0):
            for eps in (0.2, 0.1):
                p_mc = float(np.mean((s.d1 <= eps**a) & (s.d2 <= eps**b)))
                se = math.sqrt(p_mc * (1 - p_mc) / n)
                q = ll.joint_tail_probability(a, b, eps)
                assert abs(q - p_mc) <= 3 * se, (a, b, eps, q, p_mc)


def test_joint_tail_ratio_stability_under_halving():
    # ratio to eps^(a+2b) within a factor 2 across {0.2, 0.1, 0.05}
    a, b = 1.0, 0.5
    ratios = [ll.joint_tail_probability(a, b, e) / e ** (a + 2 * b) for e in (0.2, 0.1, 0.05)]
    for r1, r2 in zip(ratios, ratios[1:]):
        assert 0.5 < r1 / r2 < 2.0


def test_tail_bound_scaling_exponents():
    """log P vs log eps slopes across eps = 2^-2..2^-7 reach the four
    documented exponents (a+2b, 1, 2a+b, 1) minus 0.15, for (a, b) in
    {(1, 1/2), (1/2, 1)}.  Marginals use an inactive second threshold."""
    eps_grid = [2.0**-k for k in range(2, 8)]

    def slope(prob_fn):
        x = np.log(eps_grid)
        y = np.log([prob_fn(e) for e in eps_grid])
        return np.polyfit(x, y, 1)[0]

    inactive = lambda e: math.log(25.0) / math.log(e)
    for a, b in [(1.0, 0.5), (0.5, 1.0)]:
        s_joint = slope(lambda e: ll.joint_tail_probability(a, b, e, tol=1e-11))
        assert s_joint >= (a + 2 * b) - 0.15, (a, b, s_joint)
        s_swapped = slope(lambda e: ll.joint_tail_probability(b, a, e, tol=1e-11))
        assert s_swapped >= (2 * a + b) - 0.15, (a, b, s_swapped)
    s_d1 = slope(lambda e: ll.joint_tail_probability(1.0, inactive(e), e, tol=1e-11))
    assert s_d1 >= 1 - 0.15
    s_d2 = slope(lambda e: ll.joint_tail_probability(inactive(e), 0.5, e, tol=1e-11))
    assert s_d2 >= 1 - 0.15
