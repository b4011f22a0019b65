"""Theta functions: classical values, functional equation, invariance, the
sharp-cutoff series and its Weyl-sum oracle."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from thetaflow import cutoffs as co
from thetaflow import jacobi_group as jg
from thetaflow.errors import UnsupportedCutoff
from thetaflow.fresnel import e
from thetaflow.theta import check_gamma_invariance, jacobi_theta, theta_chi, theta_f, thm1_residual


def brute_weyl_open(N, x, alpha):
    """sum over 0 < n < N of e(n^2 x/2 + n alpha), exact phases."""
    fx, fa = Fraction(x), Fraction(alpha)
    return sum(complex(e(float((Fraction(n) ** 2 * fx / 2 + n * fa) % 1))) for n in range(1, N))


# ------------------------------- theta_f ----------------------------------

def test_gaussian_theta_at_identity():
    r = theta_f(jg.IDENTITY, co.Gaussian(), tol=1e-13)
    closed = math.pi**0.25 / gamma_fn(0.75)      # sum e^{-pi n^2}
    assert r.value == pytest.approx(closed, abs=1e-12)
    assert r.certified_tail < 1e-13


def test_cusp_expansion_main_term():
    # high in the cusp the series collapses to the n = m term
    y, xi2 = 100.0, 0.2
    g = jg.GroupElement(complex(0.3, y), 0.7, 0.15, xi2, 0.1)
    r = theta_f(g, co.Gaussian(), tol=1e-12)
    m, theta = 0, 0.2
    main = y**0.25 * complex(e(g.zeta + ((m - theta) * g.xi1 + theta**2 * g.x) / 2)) \
        * np.exp(-0.5j * g.phi) * math.exp(-math.pi * (theta * math.sqrt(y)) ** 2)
    assert abs(r.value - main) < 5.0 * y ** (-3 / 4)


def test_sharp_cutoff_reproduces_weyl_sum():
    # y = N^-2 at phi=0: y^{-1/4} Theta = S_N (half-open indicator keeps n=N)
    N, x, alpha = 48, 0.371, 0.27
    g = jg.GroupElement(complex(x, N**-2.0), 0.0, alpha, 0.0, 0.0)
    r = theta_f(g, co.IndicatorUnit(), tol=1e-12, exact_phases=True)
    direct = brute_weyl_open(N, x, alpha) + complex(e(float((Fraction(N) ** 2 * Fraction(x) / 2
                                                             + N * Fraction(alpha)) % 1)))
    assert abs(N**0.5 * r.value - direct) < 1e-10


def test_sharp_cutoff_rejected_off_axis():
    g = jg.GroupElement(1j, 0.3, 0.0, 0.0, 0.0)
    with pytest.raises(UnsupportedCutoff):
        theta_f(g, co.IndicatorUnit())


def test_theta_triangle_matches_weyl_general():
    from thetaflow.weyl import weyl_sum_general

    N = 37.0
    x, alpha = 0.613, 0.19
    g = jg.GroupElement(complex(x, N**-2.0), 0.0, alpha, 0.0, 0.0)
    r = theta_f(g, co.Triangle(), tol=1e-12, exact_phases=True)
    assert abs(math.sqrt(N) * r.value - weyl_sum_general(N, x, alpha, co.Triangle())) < 1e-9


# ----------------------------- jacobi theta --------------------------------

def test_jacobi_theta_matches_gaussian_theta():
    assert jacobi_theta(1j) == pytest.approx(1.08643481121330801, abs=1e-12)


def test_jacobi_theta_functional_equation():
    # complex alpha with small y drives |theta| up to ~1e8, so the residual
    # is normalized by the magnitude; the real-alpha acceptance criterion
    # keeps the plain absolute 1e-10 bound
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.05, 5.0))
        a = complex(rng.uniform(0, 1), rng.uniform(-0.9, 0.9))
        lhs = jacobi_theta(z, a)
        rhs = np.sqrt(1j / z) * np.exp(-1j * math.pi * a * a / z) * jacobi_theta(-1 / z, a / z)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    assert worst < 1e-10


def test_jacobi_theta_periodicity():
    z = 0.37 + 0.9j
    assert jacobi_theta(z + 2, 0.3) == pytest.approx(jacobi_theta(z, 0.3), abs=1e-13)


# ---------------------------- Gamma invariance ------------------------------

def test_gamma_invariance_gaussian_all_generators():
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = jg.haar_sample(rng)
        for i in range(1, 6):
            assert check_gamma_invariance(g, co.Gaussian(), i, tol=1e-11) < 1e-8


def test_gamma_invariance_words():
    rng = np.random.default_rng(2)
    for _ in range(25):
        g = jg.haar_sample(rng)
        word = jg.IDENTITY
        for i in rng.integers(1, 6, size=3):
            word = jg.jacobi_multiply(word, jg.gamma_generator(int(i)))
        moved = jg.jacobi_multiply(word, g)
        a = theta_f(moved, co.Gaussian(), tol=1e-11).value
        b = theta_f(g, co.Gaussian(), tol=1e-11).value
        assert abs(a - b) < 1e-7


def test_gamma5_trivial_phase():
    g = jg.haar_sample(np.random.default_rng(3))
    assert check_gamma_invariance(g, co.Gaussian(), 5, tol=1e-12) < 1e-12


def test_gamma3_triangle():
    g = jg.haar_sample(np.random.default_rng(4))
    assert check_gamma_invariance(g, co.Triangle(), 3, tol=1e-9) < 1e-8


# ------------------------------- theta_chi ---------------------------------

def test_theta_chi_weyl_oracle():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(25):
        N = int(rng.integers(10, 4000))
        x = rng.uniform(0, 2)
        alpha = rng.uniform(0, 1)
        y = 1.0 / N**2
        g = jg.GroupElement(complex(x, y), 0.0, alpha, 0.0, 0.0)
        r = theta_chi(g)
        assert r.certified_tail == 0.0
        d = brute_weyl_open(N, x, alpha)
        worst = max(worst, abs(y**-0.25 * r.value - d) / max(1.0, abs(d)))
    assert worst < 1e-12


def test_theta_chi_equals_levelwise_dyadic_assembly():
    N, x, alpha = 173, 0.37123, 0.29
    g = jg.GroupElement(complex(x, N**-2.0), 0.0, alpha, 0.0, 0.0)
    level_sum = 0j
    branches = [(g, co.Triangle()),
                (jg.jacobi_multiply(g, jg.heisenberg(0.0, 1.0, 0.0)), co.TriangleMinus())]
    for h0, cutoff in branches:
        for j in range(40):
            hj = jg.geodesic_flow(h0, -2 * math.log(2) * j)
            level_sum += 2.0 ** (-j / 2) * theta_f(hj, cutoff, tol=1e-12, exact_phases=True).value
    assert abs(level_sum - theta_chi(g).value) < 1e-10


def test_theta_chi_badly_approximable_no_warning():
    # base point with backward endpoint sqrt5-conjugate: converges cleanly
    x = 0.4
    u = 1.0 / (math.sqrt(5.0) - x)
    g = jg.jacobi_multiply(jg.jacobi_multiply(jg.n_plus(x, 0.0), jg.n_minus(u, 0.0)),
                           jg.phi_flow(3.0))
    r = theta_chi(g, tol=1e-4)
    assert r.certified_tail < 1e-4
    assert not r.diophantine_warning


def test_theta_chi_monotone_truncation():
    # Diophantine base point (bounded cusp excursions along the backward
    # geodesic), so the height-aware tail is strictly geometric
    x = 0.4
    u = 1.0 / (math.sqrt(5.0) - x)
    g = jg.jacobi_multiply(jg.jacobi_multiply(jg.n_plus(x, 0.0), jg.n_minus(u, 0.0)),
                           jg.phi_flow(3.0))
    tails = [theta_chi(g, tol=1e-30, J_max=j).certified_tail for j in (6, 12, 24)]
    assert tails[0] > tails[1] > tails[2]


def test_theta_chi_tolerance_consistency():
    g = jg.haar_sample(np.random.default_rng(13))
    a = theta_chi(g, tol=1e-3)
    b = theta_chi(g, tol=1e-5)
    assert abs(a.value - b.value) <= a.certified_tail + b.certified_tail


# ------------------------ theta sums along geodesics ------------------------

def test_thm1_exact_at_trivial_stable_part():
    # u = beta = 0 is an exact identity
    assert thm1_residual(0.37, 0.21, 0.0, 0.0, 6.0, co.Gaussian()) < 1e-9


def test_thm1_residual_scaling():
    # residual bounded by C (|u|/N + |beta|)
    cs = []
    for s in (4.0, 6.0, 8.0):
        N = math.exp(s / 2)
        r = thm1_residual(0.37, 0.21, 1.0, 0.5, s, co.Gaussian())
        cs.append(r / (1.0 / N + 0.5))
    assert max(cs) < 12.0


def test_thm1_residual_continuity_near_identity():
    assert thm1_residual(0.61, 0.13, 1e-6, 1e-6, 6.0, co.Gaussian()) < 1e-4


def test_gaussian_tail_consistency_with_measure():
    # Haar MC of P(|Theta_G| > R) vs (3/pi^2)(2/3) D(Gaussian) R^-6, factor 2
    from thetaflow.batch import BatchState, theta_gaussian_batch

    rng = np.random.default_rng(21)
    xs, ys, phis, x1, x2, zs = jg.haar_sample_batch(rng, 150_000)
    vals = np.abs(theta_gaussian_batch(BatchState(xs, ys, phis, x1, x2, zs)))
    d_gauss = math.pi / math.sqrt(6.0)
    for R in (1.2, 1.6, 2.0, 2.5):
        emp = float((vals > R).mean())
        model = (3 / math.pi**2) * (2 / 3) * d_gauss * R**-6
        assert model / 2 < emp < model * 2
