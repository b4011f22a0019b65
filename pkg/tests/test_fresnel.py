"""Quadratic-phase integrals against the oscillation-aware panel oracle."""

import math

import numpy as np
import pytest

from thetaflow.errors import DomainError
from thetaflow.fresnel import (
    fresnel_phase_integral,
    oscillatory_quadrature,
    quadratic_phase_integral_elements,
    quadratic_phase_integral_vec,
)


def test_trivial_unit_integral():
    assert fresnel_phase_integral([1.0], 0.0, 0.0, 0.0, 1.0) == pytest.approx(1.0)


def test_full_period_linear_phase_vanishes():
    v = fresnel_phase_integral([1.0], 0.0, 1.0, 0.0, 1.0)
    assert abs(v) < 1e-14


def test_pure_fresnel_value_against_quadrature():
    v = fresnel_phase_integral([1.0], 1.0, 0.0, 0.0, 1.0)
    q = oscillatory_quadrature([1.0], 1.0, 0.0, 0.0, 1.0, order=32, max_step=0.05)
    assert v == pytest.approx(q, abs=1e-12)
    # e(x) convention: the value is C(2)+iS(2) rescaled, so both parts positive
    assert v.real > 0 and v.imag > 0


def test_reversed_bounds_rejected():
    with pytest.raises(DomainError):
        fresnel_phase_integral([1.0], 0.1, 0.1, 1.0, 0.0)


def test_sweep_against_panel_oracle():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(250):
        c2 = rng.uniform(-1, 1) * 10.0 ** rng.uniform(-7, 2)
        c1 = rng.uniform(-1, 1) * 10.0 ** rng.uniform(-2, 3)
        a = rng.uniform(-1, 0.5)
        b = a + rng.uniform(0.01, 1.2)
        coeffs = list(rng.uniform(-50, 50, size=rng.integers(1, 4)))
        v = complex(quadratic_phase_integral_vec(coeffs, c2, np.array([c1]), a, b)[0])
        q = oscillatory_quadrature(coeffs, c2, c1, a, b)
        worst = max(worst, abs(v - q))
    assert worst < 1e-10


def test_vectorized_matches_scalar_dispatch():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c2 = rng.uniform(-1, 1) * 10.0 ** rng.uniform(-6, 1.5)
        a = rng.uniform(-1, 0.5)
        b = a + rng.uniform(0.05, 1.0)
        coeffs = list(rng.uniform(-50, 50, size=3))
        c1s = rng.uniform(-300, 300, size=40)
        vv = quadratic_phase_integral_vec(coeffs, c2, c1s, a, b)
        for i, c1 in enumerate(c1s):
            assert vv[i] == pytest.approx(fresnel_phase_integral(coeffs, c2, c1, a, b), abs=1e-9)


def test_elements_variant_matches_vec():
    rng = np.random.default_rng(7)
    c2s = rng.uniform(-40, 40, size=60)
    c1s = rng.uniform(-500, 500, size=60)
    coeffs = [2.0, -24.0, 72.0]
    ve = quadratic_phase_integral_elements(coeffs, c2s, c1s, 1 / 6, 1 / 4)
    for i in range(60):
        ref = complex(quadratic_phase_integral_vec(coeffs, c2s[i], np.array([c1s[i]]), 1 / 6, 1 / 4)[0])
        assert abs(ve[i] - ref) < 2e-8


def test_triangle_piece_regime():
    # the regime the theta series actually exercises: c2 = cot(phi)/2 with
    # lattice-driven linear coefficients
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(120):
        phi = rng.uniform(1e-4, math.pi - 1e-4)
        w = rng.uniform(-2000, 2000)
        c2 = 0.5 / math.tan(phi)
        c1 = -w / math.sin(phi)
        v = complex(quadratic_phase_integral_vec([2.0, -24.0, 72.0], c2, np.array([c1]), 1 / 6, 1 / 4)[0])
        q = oscillatory_quadrature([2.0, -24.0, 72.0], c2, c1, 1 / 6, 1 / 4)
        worst = max(worst, abs(v - q))
    assert worst < 1e-11
