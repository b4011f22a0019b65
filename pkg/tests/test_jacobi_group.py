"""Group arithmetic, flows, reduction, Haar sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetaflow import jacobi_group as jg
from thetaflow.errors import DegenerateMatrix, DomainError, OutOfRange


def random_element(rng):
    return jg.GroupElement(
        complex(rng.uniform(-3, 3), rng.uniform(0.1, 5.0)),
        rng.uniform(-7, 7), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
    )


coord = st.floats(min_value=-3.0, max_value=3.0)
height = st.floats(min_value=0.1, max_value=5.0)
angle = st.floats(min_value=-7.0, max_value=7.0)


@st.composite
def elements(draw):
    return jg.GroupElement(complex(draw(coord), draw(height)), draw(angle),
                           draw(coord), draw(coord), draw(coord))


# ------------------------------ group laws --------------------------------

def test_identity_law():
    rng = np.random.default_rng(0)
    for _ in range(50):
        g = random_element(rng)
        assert jg.element_distance(jg.jacobi_multiply(g, jg.IDENTITY), g) < 1e-12
        assert jg.element_distance(jg.jacobi_multiply(jg.IDENTITY, g), g) < 1e-12


@settings(max_examples=150, deadline=None)
@given(elements(), elements(), elements())
def test_associativity(g, h, k):
    left = jg.jacobi_multiply(jg.jacobi_multiply(g, h), k)
    right = jg.jacobi_multiply(g, jg.jacobi_multiply(h, k))
    scale = max(1.0, abs(left.x), abs(left.xi1), abs(left.zeta))
    assert jg.element_distance(left, right) < 1e-10 * scale


@settings(max_examples=100, deadline=None)
@given(elements())
def test_inverse_roundtrip(g):
    e1 = jg.jacobi_multiply(g, jg.jacobi_inverse(g))
    assert jg.element_distance(e1, jg.IDENTITY) < 1e-9


def test_associativity_thousand_triples():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(1000):
        g, h, k = (random_element(rng) for _ in range(3))
        left = jg.jacobi_multiply(jg.jacobi_multiply(g, h), k)
        right = jg.jacobi_multiply(g, jg.jacobi_multiply(h, k))
        scale = max(1.0, abs(left.x), abs(left.xi1), abs(left.xi2), abs(left.zeta))
        worst = max(worst, jg.element_distance(left, right) / scale)
    assert worst < 1e-10


# -------------------------------- flows -----------------------------------

def test_flow_group_law():
    g = jg.phi_flow(0.7)
    h = jg.phi_flow(-1.3)
    combined = jg.jacobi_multiply(g, h)
    assert jg.element_distance(combined, jg.phi_flow(-0.6)) < 1e-12


def test_flow_limits_at_special_angles():
    g0 = jg.GroupElement(complex(0.4, 1.7), 0.0, 0.1, 0.2, 0.3)
    flowed = jg.geodesic_flow(g0, 2.0)
    assert flowed.z == pytest.approx(complex(0.4, 1.7 * math.exp(-2.0)))
    assert flowed.phi == 0.0
    g1 = jg.GroupElement(complex(0.4, 1.7), math.pi / 2, 0.0, 0.0, 0.0)
    flowed = jg.geodesic_flow(g1, 2.0)
    assert flowed.z == pytest.approx(complex(0.4, 1.7 * math.exp(2.0)))
    assert flowed.phi == pytest.approx(math.pi / 2)


def test_flow_semigroup():
    rng = np.random.default_rng(1)
    for _ in range(200):
        g = random_element(rng)
        s, t = rng.uniform(-3, 3, size=2)
        a = jg.geodesic_flow(jg.geodesic_flow(g, s), t)
        b = jg.geodesic_flow(g, s + t)
        assert jg.element_distance(a, b) < 1e-10


def test_flow_matches_matrix_oracle():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        g = random_element(rng)
        s = rng.uniform(-5, 5)
        flowed = jg.geodesic_flow(g, s)
        M = g.matrix() @ jg.Sl2Matrix(math.exp(-s / 2), 0.0, 0.0, math.exp(s / 2))
        z, phi0 = jg.iwasawa(M)
        worst = max(worst, abs(z.real - flowed.x) / max(1, abs(z.real)),
                    abs(z.imag - flowed.y) / max(1, z.imag),
                    abs(np.exp(1j * (flowed.phi - phi0)) - 1))
    assert worst < 1e-12


def test_flow_equals_right_multiplication():
    rng = np.random.default_rng(3)
    for _ in range(300):
        g = random_element(rng)
        s = rng.uniform(-5, 5)
        a = jg.geodesic_flow(g, s)
        b = jg.jacobi_multiply(g, jg.phi_flow(s))
        assert jg.element_distance(a, b) < 1e-10 * max(1.0, abs(a.x))


def test_phi_lift_continuity_along_flow():
    g = jg.GroupElement(complex(0.3, 0.8), 2.2, 0.0, 0.0, 0.0)
    s_grid = np.arange(-4.0, 4.0, 1e-3)
    phis = np.array([jg.geodesic_flow(g, s).phi for s in s_grid])
    assert np.max(np.abs(np.diff(phis))) < math.pi / 2


# ------------------------------- Iwasawa ----------------------------------

def test_iwasawa_identity_and_diagonal():
    z, phi0 = jg.iwasawa(jg.Sl2Matrix(1, 0, 0, 1))
    assert z == pytest.approx(1j) and phi0 == 0.0
    z, phi0 = jg.iwasawa(jg.Sl2Matrix(2.0, 0.0, 0.0, 0.5))
    assert z == pytest.approx(4j) and phi0 == 0.0


def test_iwasawa_rotation():
    c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
    z, phi0 = jg.iwasawa(jg.Sl2Matrix(c, -s, s, c))
    assert z == pytest.approx(1j, abs=1e-15)
    assert phi0 == pytest.approx(math.pi / 3)


def test_iwasawa_roundtrip():
    rng = np.random.default_rng(4)
    for _ in range(300):
        g = random_element(rng)
        M = g.matrix()
        z, phi0 = jg.iwasawa(M)
        rebuilt = jg.GroupElement(z, phi0, 0, 0, 0).matrix()
        for attr in "abcd":
            assert getattr(rebuilt, attr) == pytest.approx(getattr(M, attr), abs=1e-12 * max(1, abs(getattr(M, attr))))


def test_degenerate_matrix_rejected():
    with pytest.raises(DegenerateMatrix):
        jg.Sl2Matrix(1.0, 0.0, 0.0, 1.1)


# ------------------------------ reduction ---------------------------------

def test_reduce_fixed_points():
    z, M = jg.reduce_to_fundamental(1j)
    assert z == 1j and M == (1, 0, 0, 1)
    z, M = jg.reduce_to_fundamental(0.1 + 5j)
    assert z == 0.1 + 5j and M == (1, 0, 0, 1)


def test_reduce_generic_point():
    z, M = jg.reduce_to_fundamental(2.3 + 0.5j)
    assert abs(z.real) <= 0.5 + 1e-12
    assert abs(z) >= 1 - 1e-12
    assert z.imag >= math.sqrt(3) / 2 - 1e-12
    a, b, c, d = M
    assert a * d - b * c == 1
    got = (a * (2.3 + 0.5j) + b) / (c * (2.3 + 0.5j) + d)
    assert got == pytest.approx(z, abs=1e-12)


def test_reduce_idempotent_and_integer():
    rng = np.random.default_rng(5)
    for _ in range(300):
        z0 = complex(rng.uniform(-8, 8), 10 ** rng.uniform(-4, 1))
        z1, M = jg.reduce_to_fundamental(z0)
        z2, M2 = jg.reduce_to_fundamental(z1)
        assert abs(z1 - z2) < 1e-12 * max(1, abs(z1))
        assert all(isinstance(v, int) for v in M)
        assert M2 == (1, 0, 0, 1) or abs(z1) == pytest.approx(1.0, abs=1e-9)


def test_cusp_height():
    assert jg.cusp_height(0.3 + 7j) == pytest.approx(7.0)
    corner = complex(0.5, math.sqrt(3) / 2)
    assert jg.cusp_height(corner) == pytest.approx(math.sqrt(3) / 2)
    h = jg.cusp_height(0.4999 + 1e-4j)
    assert h >= math.sqrt(3) / 2


# ----------------------------- Haar sampling ------------------------------

def test_haar_acceptance_rate_and_area():
    rng = np.random.default_rng(6)
    M = 10**6
    x = rng.uniform(-0.5, 0.5, size=M)
    y = jg.SQRT3_2 / (1 - rng.uniform(0, 1, size=M))
    rate = float((x * x + y * y >= 1).mean())
    assert rate == pytest.approx(math.pi * math.sqrt(3) / 6, abs=3e-3)
    area = rate * 2 / math.sqrt(3)
    assert area == pytest.approx(math.pi / 3, rel=0.01)


def test_haar_phi_marginal_uniform():
    rng = np.random.default_rng(7)
    _, _, phi, _, _, _ = jg.haar_sample_batch(rng, 200_000)
    counts, _ = np.histogram(phi, bins=32, range=(0, math.pi))
    expect = len(phi) / 32
    chi2 = float(((counts - expect) ** 2 / expect).sum())
    assert chi2 < 65.0  # 31 dof, far beyond the 99.9th percentile only on failure


def test_haar_samples_in_fundamental_domain():
    rng = np.random.default_rng(8)
    g = jg.haar_sample(rng)
    assert abs(g.x) <= 0.5 and abs(g.z) >= 1.0 - 1e-12 and 0 <= g.phi < math.pi


# ------------------------- generators and relations -----------------------

def test_gamma_generator_coordinates():
    g1 = jg.gamma_generator(1)
    assert (g1.z, g1.phi, g1.xi1, g1.xi2, g1.zeta) == (1j, math.pi / 2, 0.0, 0.0, 0.125)
    g3 = jg.gamma_generator(3)
    assert (g3.z, g3.phi, g3.xi1, g3.xi2, g3.zeta) == (1j, 0.0, 1.0, 0.0, 0.0)
    g5 = jg.gamma_generator(5)
    assert (g5.z, g5.phi, g5.xi1, g5.xi2, g5.zeta) == (1j, 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(OutOfRange):
        jg.gamma_generator(6)


def test_renormalization_coordinates_substitution():
    got = jg.afe_coordinates(1.0, 0.0, 0.0, 0.0, 10.0)
    xp, ap, up, bp, Np, phase = got
    assert (xp, ap, up, bp, Np) == (-1.0, 0.0, 1.0, 0.0, 10.0)
    assert phase == pytest.approx(np.exp(2j * math.pi / 8))


def test_renormalization_coordinates_generic():
    xp, ap, up, bp, Np, phase = jg.afe_coordinates(0.5, 0.3, 0.57601, 0.0, 100.0)
    assert (xp, Np) == (-2.0, 50.0)
    assert ap == pytest.approx(0.6)
    assert up == pytest.approx(0.6440025)
    assert bp == pytest.approx(0.3)
    with pytest.raises(DomainError):
        jg.afe_coordinates(-0.5, 0.0, 0.0, 0.0, 10.0)


def test_renormalization_element_identity():
    # gamma_1 n+(x,a) n-(u,b) Phi^{2 ln N} = n+(x') n-(u') Phi^{2 ln N'} (1;0,1/8-a^2/2x)
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(100):
        x = rng.uniform(0.05, 1.95)
        a = rng.uniform(-1, 1)
        u = rng.uniform(-2, 2)
        b = rng.uniform(-1, 1)
        N = rng.uniform(2, 1000)
        left = jg.jacobi_multiply(
            jg.jacobi_multiply(jg.jacobi_multiply(jg.gamma_generator(1), jg.n_plus(x, a)), jg.n_minus(u, b)),
            jg.phi_flow(2 * math.log(N)))
        xp, ap, up, bp, Np, _ = jg.afe_coordinates(x, a, u, b, N)
        right = jg.jacobi_multiply(
            jg.jacobi_multiply(jg.jacobi_multiply(jg.n_plus(xp, ap), jg.n_minus(up, bp)),
                               jg.phi_flow(2 * math.log(Np))),
            jg.heisenberg(0.0, 0.0, 0.125 - a * a / (2 * x)))
        worst = max(worst, jg.element_distance(left, right))
    assert worst < 1e-10


def test_renormalized_endpoint_inversion():
    # x' + 1/u' = -(x + 1/u)^{-1}
    rng = np.random.default_rng(10)
    for _ in range(50):
        x = rng.uniform(0.05, 1.95)
        u = rng.uniform(0.1, 3.0)
        xp, _, up, _, _, _ = jg.afe_coordinates(x, 0.0, u, 0.0, 10.0)
        assert xp + 1 / up == pytest.approx(-1 / (x + 1 / u), abs=1e-12)
