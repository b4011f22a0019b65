"""Weyl sums: direct evaluation, the functional-equation move, the
renormalized evaluator, and the partial-sum paths."""

import cmath
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetaflow import cutoffs as co
from thetaflow.errors import DomainError
from thetaflow.fresnel import e
from thetaflow.weyl import (
    CurlicuePath,
    WeylParams,
    afe_step,
    curlicue,
    is_rational_like,
    weyl_prefix,
    weyl_sum_direct,
    weyl_sum_general,
    weyl_sum_poly,
    weyl_sum_renormalized,
)


def term_oracle(N, x, alpha):
    fx, fa = Fraction(x), Fraction(alpha)
    return sum(complex(e(float((Fraction(n) ** 2 * fx / 2 + n * fa) % 1))) for n in range(1, N + 1))


def test_trivial_sums():
    assert weyl_sum_direct(5, 0.0, 0.0) == pytest.approx(5.0)
    assert weyl_sum_direct(1, 0.37, 0.21) == pytest.approx(complex(e(0.37 / 2 + 0.21)))


def test_four_term_oracle_value():
    # e(1/6) + e(2/3) + e(1/2) + e(2/3) = -3/2 - sqrt(3)/2 i
    got = weyl_sum_direct(4, 1 / 3, 0.0)
    assert got == pytest.approx(complex(-1.5, -math.sqrt(3) / 2), abs=1e-12)
    assert got == pytest.approx(term_oracle(4, 1 / 3, 0.0), abs=1e-14)


def test_direct_vs_term_oracle_random():
    rng = np.random.default_rng(0)
    for _ in range(10):
        N = int(rng.integers(10, 1000))
        x, alpha = rng.uniform(-3, 3), rng.uniform(-1, 1)
        assert weyl_sum_direct(N, x, alpha) == pytest.approx(term_oracle(N, x, alpha), abs=1e-10)


def test_poly_reduces_to_direct():
    assert weyl_sum_poly(100, WeylParams(0.37, 0.21)) == pytest.approx(weyl_sum_direct(100, 0.37, 0.21))


def test_poly_vs_term_oracle():
    rng = np.random.default_rng(1)
    p = WeylParams(x=rng.uniform(0, 2), alpha=rng.uniform(0, 1),
                   c1=rng.uniform(-1, 1), c0=rng.uniform(-1, 1))
    direct = sum(cmath.exp(2j * math.pi * ((0.5 * n * n + p.c1 * n + p.c0) * p.x + p.alpha * n))
                 for n in range(1, 1001))
    assert weyl_sum_poly(1000, p) == pytest.approx(direct, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=300),
       st.floats(min_value=-2, max_value=2), st.floats(min_value=-1, max_value=1))
def test_triangle_inequality_and_symmetries(N, x, alpha):
    s = weyl_sum_direct(N, x, alpha)
    assert abs(s) <= N + 1e-9
    # conjugation and double periodicity
    assert weyl_sum_direct(N, -x, -alpha) == pytest.approx(s.conjugate(), abs=1e-11 * N)
    assert weyl_sum_direct(N, x + 2, alpha) == pytest.approx(s, abs=1e-11 * N)
    assert weyl_sum_direct(N, x, alpha + 1) == pytest.approx(s, abs=1e-11 * N)


def test_general_indicator_matches_direct():
    for (N, x, alpha) in [(50, 0.31, 0.0), (117, 1.21, 0.77)]:
        got = weyl_sum_general(float(N), x, alpha, co.IndicatorUnit())
        assert got == pytest.approx(weyl_sum_direct(N, x, alpha), abs=1e-10)


def test_general_gaussian_riemann_sum():
    got = weyl_sum_general(100.0, 0.0, 0.0, co.Gaussian())
    # Poisson: sum e^{-pi n^2/N^2} = N + exponentially small
    assert got == pytest.approx(100.0, rel=1e-6)


def test_general_triangle_matches_theta():
    from thetaflow import jacobi_group as jg
    from thetaflow.theta import theta_f

    N, x, alpha = 64.0, 0.413, 0.29
    g = jg.GroupElement(complex(x, N**-2.0), 0.0, alpha, 0.0, 0.0)
    via_theta = math.sqrt(N) * theta_f(g, co.Triangle(), tol=1e-12, exact_phases=True).value
    assert weyl_sum_general(N, x, alpha, co.Triangle()) == pytest.approx(via_theta, abs=1e-9)


# --------------------------- functional equation ---------------------------

def test_afe_step_substitution():
    Np, xr, ar, F = afe_step(100, 0.5, 0.0)
    assert (Np, xr, ar) == (50, -2.0, 0.0)
    assert F == pytest.approx(cmath.sqrt(2j))
    Np, xr, ar, F = afe_step(100, 0.3, 0.5)
    assert Np == 30 and xr == pytest.approx(-10 / 3) and ar == pytest.approx(5 / 3)
    assert F == pytest.approx(cmath.sqrt(1j / 0.3) * cmath.exp(-2j * math.pi * 0.25 / 0.6))
    with pytest.raises(DomainError):
        afe_step(100, 2.5, 0.0)


def test_afe_residual_grid():
    worst = 0.0
    for x in np.arange(0.05, 1.951, 0.1):
        for alpha in (0.0, 0.25, 0.5):
            for N in (1000, 10000):
                Np, xr, ar, F = afe_step(N, float(x), alpha)
                resid = abs(weyl_sum_direct(N, float(x), alpha)
                            - F * weyl_sum_direct(Np, xr, ar)) * math.sqrt(x)
                worst = max(worst, resid)
    assert worst <= 10.0


# --------------------------- renormalized loop -----------------------------

def test_renorm_rational_fallback():
    r = weyl_sum_renormalized(1000, 0.0, 0.3)
    assert r.fallback and r.iterations == 0
    assert r.value == pytest.approx(weyl_sum_direct(1000, 0.0, 0.3))
    r = weyl_sum_renormalized(1000, 2 / 7, 0.0)
    assert r.fallback


def test_renorm_agrees_with_direct():
    worst = 0.0
    for d in (2, 3, 5, 7, 11, 13):
        x = math.sqrt(d) % 2.0
        r = weyl_sum_renormalized(100_000, x, 0.0)
        direct = weyl_sum_direct(100_000, x, 0.0)
        assert abs(r.value - direct) <= max(10.0, r.error_estimate)
        worst = max(worst, abs(r.value - direct))
    assert worst < 500.0


def test_renorm_iteration_count_golden():
    # the mod-2-with-conjugation orbit of the golden mean alternates
    # 0.618/0.382, shrinking N by phi^-3 per two moves: ~14 moves from 1e6
    # (the continued-fraction depth 29 counts phi^-1 shrinks instead)
    r = weyl_sum_renormalized(10**6, (1 + math.sqrt(5)) / 2 % 1, 0.0)
    assert 11 <= r.iterations <= 17


def test_renorm_speedup():
    x = math.sqrt(2) % 2.0
    t0 = time.perf_counter()
    weyl_sum_renormalized(10**7, x, 0.0)
    t_ren = time.perf_counter() - t0
    t0 = time.perf_counter()
    weyl_sum_direct(10**7, x, 0.0)
    t_dir = time.perf_counter() - t0
    assert t_dir / t_ren >= 100.0


# ------------------------------- paths -------------------------------------

def test_prefix_matches_direct():
    pre = weyl_prefix(500, 0.37, 0.21)
    assert pre[0] == 0.0
    assert pre[500] == pytest.approx(weyl_sum_direct(500, 0.37, 0.21))
    assert pre[123] == pytest.approx(weyl_sum_direct(123, 0.37, 0.21))


def test_curlicue_invariants():
    p = curlicue(1000, WeylParams(0.31, 0.0, math.sqrt(2), 0.0))
    steps = np.abs(np.diff(p.prefix))
    assert np.max(np.abs(steps - 1.0)) < 1e-12
    assert p.samples(0.0)[0] == 0.0
    assert p.samples(1.0)[0] == pytest.approx(p.prefix[-1] / math.sqrt(1000))
    k = 137
    mid = p.samples((k + 0.5) / 1000)[0]
    assert mid == pytest.approx(0.5 * (p.prefix[k] + p.prefix[k + 1]) / math.sqrt(1000), abs=1e-9)


def test_curlicue_increment_normalization():
    p = curlicue(256, WeylParams(0.731, 0.11))
    t = np.arange(256) / 256.0
    inc = np.abs(p.samples(t + 1.0 / 256) - p.samples(t))
    assert np.max(np.abs(inc - 256**-0.5)) < 1e-12


def test_rational_detection():
    assert is_rational_like(1 / 3)
    assert is_rational_like(355 / 113)
    assert not is_rational_like((1 + math.sqrt(5)) / 2 % 1)
    assert not is_rational_like(math.sqrt(2) - 1)
