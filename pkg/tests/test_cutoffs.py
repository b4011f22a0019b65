"""Cutoff pieces, partition of unity, and exact norms."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thetaflow import cutoffs as co


def test_triangle_is_the_stated_trapezoid():
    # bump = plateau-free trapezoid with a=b=1/3, ramps 1/6 and 1/3
    t = np.linspace(0.0, 1.0, 2001)
    tri = co.evaluate(co.Triangle(), t)
    trap = co.evaluate(co.Trapezoid(1 / 3, 1 / 3, 1 / 6, 1 / 3), t)
    assert np.max(np.abs(tri - trap)) == 0.0


def test_triangle_values_and_continuity():
    f = co.Triangle()
    assert co.evaluate(f, np.array([1 / 6]))[0] == pytest.approx(0.0)
    assert co.evaluate(f, np.array([1 / 4]))[0] == pytest.approx(0.5)
    assert co.evaluate(f, np.array([1 / 3]))[0] == pytest.approx(1.0)
    assert co.evaluate(f, np.array([1 / 2]))[0] == pytest.approx(0.5)
    assert co.evaluate(f, np.array([2 / 3]))[0] == pytest.approx(0.0)
    t = np.linspace(0.0, 1.0, 40001)
    vals = co.evaluate(f, t)
    assert np.max(np.abs(np.diff(vals))) < 1e-3  # C^1, no jumps on a fine grid


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_dyadic_partition_of_unity(w):
    total = 0.0
    for j in range(0, 64):
        total += float(co.evaluate(co.Triangle(), np.array([(2.0**j) * w]))[0])
        total += float(co.evaluate(co.Triangle(), np.array([(2.0**j) * (1.0 - w)]))[0])
    assert total == pytest.approx(1.0, abs=1e-12)


def test_partition_identity_spec_point():
    w = 0.37
    total = sum(float(co.evaluate(co.Triangle(), np.array([(2.0**j) * w]))[0]) for j in range(40))
    total += sum(float(co.evaluate(co.Triangle(), np.array([(2.0**j) * (1 - w)]))[0]) for j in range(40))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_reflected_bump():
    t = np.linspace(-1.0, 1.0, 1001)
    left = co.evaluate(co.TriangleMinus(), t)
    right = co.evaluate(co.Triangle(), -t)
    assert np.max(np.abs(left - right)) == 0.0


def test_indicator_convention_half_open():
    vals = co.evaluate(co.IndicatorUnit(), np.array([0.0, 1e-12, 0.5, 1.0, 1.0 + 1e-12]))
    assert list(vals) == [0.0, 1.0, 1.0, 1.0, 0.0]


def test_l2_norms():
    assert co.l2_norm_squared(co.Gaussian()) == pytest.approx(2 ** -0.5)
    assert co.l2_norm_squared(co.IndicatorUnit()) == pytest.approx(1.0)
    assert co.l2_norm_squared(co.HermiteSeries((0.0, 1.0, 0.5))) == pytest.approx(1.25)
    # triangle: exact piecewise integral vs a dense Riemann sum
    t = np.linspace(0.0, 1.0, 2_000_001)
    riemann = np.trapezoid(co.evaluate(co.Triangle(), t) ** 2, t)
    assert co.l2_norm_squared(co.Triangle()) == pytest.approx(riemann, abs=1e-9)


def test_trapezoid_validation():
    from thetaflow.errors import DomainError

    with pytest.raises(DomainError):
        co.Trapezoid(0.5, 0.4, 0.1, 0.1)
    with pytest.raises(DomainError):
        co.Trapezoid(0.0, 1.0, 0.0, 0.1)
