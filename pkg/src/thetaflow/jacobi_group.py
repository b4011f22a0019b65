"""Coordinates and arithmetic on the universal Jacobi group.

Elements are written (z, phi; xi1, xi2, zeta): z = x + iy in the upper half
plane, phi the unbounded angle coordinate on the universal cover of the
rotation circle, (xi1, xi2, zeta) the Heisenberg part.  The projection to
SL(2,R) of (z, phi) is n_x a_y k_phi; the angle lift of an element g is the
continuous branch of Arg(w sin phi + cos phi) on the upper half plane pinned
to the value phi at w = i (the imaginary part of w sin phi + cos phi has
constant sign for fixed phi, so the branch is global).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatrix, DomainError, NonConvergence, OutOfRange, RangeError

SQRT3_2 = math.sqrt(3.0) / 2.0
FUNDAMENTAL_MEASURE = math.pi**2 / 3.0  # total Haar mass of the fundamental domain


@dataclass(frozen=True)
class Sl2Matrix:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > 1e-9:
            raise DegenerateMatrix(f"determinant {det} != 1")

    def mobius(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def __matmul__(self, other: "Sl2Matrix") -> "Sl2Matrix":
        return Sl2Matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


@dataclass(frozen=True)
class GroupElement:
    z: complex
    phi: float
    xi1: float
    xi2: float
    zeta: float

    def __post_init__(self):
        if not self.z.imag > 0.0:
            raise DomainError(f"z = {self.z} not in the upper half plane")
        if not np.isfinite([self.z.real, self.z.imag, self.phi, self.xi1, self.xi2, self.zeta]).all():
            raise RangeError("non-finite coordinate")

    @property
    def x(self) -> float:
        return self.z.real

    @property
    def y(self) -> float:
        return self.z.imag

    def matrix(self) -> Sl2Matrix:
        """n_x a_y k_phi as a 2x2 matrix."""
        sy = math.sqrt(self.y)
        cp, sp = math.cos(self.phi), math.sin(self.phi)
        return Sl2Matrix(
            sy * cp + self.x * sp / sy,
            -sy * sp + self.x * cp / sy,
            sp / sy,
            cp / sy,
        )


IDENTITY = GroupElement(1j, 0.0, 0.0, 0.0, 0.0)


def n_plus(x: float, alpha: float) -> GroupElement:
    """Unstable horospherical element carrying the Weyl-sum data (x, alpha)."""
    return GroupElement(complex(x, 1.0), 0.0, alpha, 0.0, 0.0)


def n_minus(u: float, beta: float) -> GroupElement:
    """Stable horospherical element; angle lift is arctan(u)."""
    z = complex(u, 1.0) / (1.0 + u * u)
    return GroupElement(z, math.atan(u), 0.0, beta, 0.0)


def phi_flow(s: float) -> GroupElement:
    """The diagonal one-parameter element Phi^s (z = i e^{-s})."""
    y = math.exp(-s)
    if y == 0.0 or math.isinf(y):
        raise RangeError(f"flow time {s} overflows the height coordinate")
    return GroupElement(complex(0.0, y), 0.0, 0.0, 0.0, 0.0)


def heisenberg(xi1: float, xi2: float, zeta: float) -> GroupElement:
    return GroupElement(1j, 0.0, xi1, xi2, zeta)


def angle_lift(g: GroupElement, w: complex) -> float:
    """beta_g(w): continuous lift of Arg(w sin phi + cos phi), = phi at w = i."""
    s, c = math.sin(g.phi), math.cos(g.phi)
    return g.phi - math.atan2(s, c) + math.atan2(w.imag * s, w.real * s + c)


def jacobi_multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    """Product in the universal Jacobi group."""
    Mg = g.matrix()
    znew = Mg.mobius(h.z)
    if not (znew.imag > 0.0 and np.isfinite(znew.imag)):
        raise RangeError(f"height overflow in product: Im = {znew.imag}")
    phinew = angle_lift(g, h.z) + h.phi
    gx1 = Mg.a * h.xi1 + Mg.b * h.xi2
    gx2 = Mg.c * h.xi1 + Mg.d * h.xi2
    zetanew = g.zeta + h.zeta + 0.5 * (g.xi1 * gx2 - g.xi2 * gx1)
    return GroupElement(znew, phinew, g.xi1 + gx1, g.xi2 + gx2, zetanew)


def jacobi_inverse(g: GroupElement) -> GroupElement:
    M = g.matrix()
    Minv = Sl2Matrix(M.d, -M.b, -M.c, M.a)
    zinv = Minv.mobius(1j)
    phiinv = -angle_lift(g, zinv)
    x1 = -(Minv.a * g.xi1 + Minv.b * g.xi2)
    x2 = -(Minv.c * g.xi1 + Minv.d * g.xi2)
    return GroupElement(zinv, phiinv, x1, x2, -g.zeta)


def geodesic_flow(g: GroupElement, s: float) -> GroupElement:
    """g Phi^s in closed form; (xi, zeta) are untouched.

    At phi = k*pi the height contracts as e^{-s}, at phi = (k +- 1/2)*pi it
    expands as e^{+s}; the generic branch below reproduces both limits.  The
    denominator cosh(s) + cos(2 phi) sinh(s) is rewritten as a sum of
    positives on each sign of s to avoid the e^{2|s|} cancellation blow-up.
    """
    sp, cp = math.sin(g.phi), math.cos(g.phi)
    sh = math.sinh(s)
    if s >= 0.0:
        den = math.exp(-s) + 2.0 * cp * cp * sh
    else:
        den = math.exp(s) - 2.0 * sp * sp * sh
    ys = g.y / den
    if not (0.0 < ys < math.inf):
        raise RangeError(f"height overflow under flow: y_s = {ys}")
    xs = g.x - g.y * 2.0 * sp * cp * sh / den
    phis = g.phi + math.atan2(math.exp(-s) * sp, cp) - math.atan2(sp, cp)
    return GroupElement(complex(xs, ys), phis, g.xi1, g.xi2, g.zeta)


def iwasawa(M: Sl2Matrix) -> tuple[complex, float]:
    """Decompose M = n_x a_y k_phi0: returns (z = M i, phi0 in (-pi, pi])."""
    det = M.a * M.d - M.b * M.c
    if abs(det - 1.0) > 1e-12:
        raise DegenerateMatrix(f"determinant {det} != 1")
    den = M.c * M.c + M.d * M.d
    z = complex((M.a * M.c + M.b * M.d) / den, 1.0 / den)
    phi0 = math.atan2(M.c, M.d)
    return z, phi0


def reduce_to_fundamental(z: complex, max_steps: int = 10_000) -> tuple[complex, tuple[int, int, int, int]]:
    """Gauss reduction of z into the standard modular fundamental domain.

    Returns (z*, (a, b, c, d)) with integer entries, det 1, and z* = M z
    satisfying |Re z*| <= 1/2, |z*| >= 1 - 1e-12.
    """
    if not z.imag > 0.0:
        raise DomainError("z must lie in the upper half plane")
    a, b, c, d = 1, 0, 0, 1
    for _ in range(max_steps):
        m = round(z.real)
        if m != 0:
            z = complex(z.real - m, z.imag)
            a, b = a - m * c, b - m * d
        if z.real * z.real + z.imag * z.imag < 1.0 - 1e-12:
            z = -1.0 / z
            a, b, c, d = -c, -d, a, b
        else:
            return z, (a, b, c, d)
    raise NonConvergence("fundamental-domain reduction did not terminate (height underflow?)")


def cusp_height(z: complex) -> float:
    """Im of the fundamental-domain representative of z."""
    zstar, _ = reduce_to_fundamental(z)
    return zstar.imag


def gamma_generator(i: int) -> GroupElement:
    """The five generators of the invariance group of the theta functions."""
    if i == 1:
        return GroupElement(1j, math.pi / 2.0, 0.0, 0.0, 0.125)
    if i == 2:
        return GroupElement(1.0 + 1j, 0.0, 0.5, 0.0, 0.0)
    if i == 3:
        return GroupElement(1j, 0.0, 1.0, 0.0, 0.0)
    if i == 4:
        return GroupElement(1j, 0.0, 0.0, 1.0, 0.0)
    if i == 5:
        return GroupElement(1j, 0.0, 0.0, 0.0, 1.0)
    raise OutOfRange(f"generator index {i} not in 1..5")


def _translation_word(m: int) -> GroupElement:
    # gamma_2^m = (T^m; (m/2, 0), 0); z-coordinate m + i.
    return GroupElement(complex(float(m), 1.0), 0.0, 0.5 * m, 0.0, 0.0)


def reduce_group_element(g: GroupElement, max_steps: int = 10_000) -> GroupElement:
    """Left-translate g by invariance-group words until z is reduced and
    |xi_i| <= 1/2.  Theta functions agree at g and at the result."""
    gamma1 = gamma_generator(1)
    for _ in range(max_steps):
        m = round(g.x)
        if m != 0:
            g = jacobi_multiply(_translation_word(-m), g)
        if g.x * g.x + g.y * g.y < 1.0 - 1e-12:
            g = jacobi_multiply(gamma1, g)
        else:
            break
    else:
        raise NonConvergence("group-element reduction did not terminate")
    m1 = math.floor(g.xi1 + 0.5)
    m2 = math.floor(g.xi2 + 0.5)
    if m1 or m2:
        # gamma_3^{-m1} gamma_4^{-m2} = (1; (-m1, -m2), +m1*m2/2 * omega...)
        shift = jacobi_multiply(heisenberg(-float(m1), 0.0, 0.0), heisenberg(0.0, -float(m2), 0.0))
        g = jacobi_multiply(shift, g)
    k = math.floor(g.zeta)
    if k:
        g = jacobi_multiply(heisenberg(0.0, 0.0, -float(k)), g)
    return g


def haar_sample(rng: np.random.Generator) -> GroupElement:
    """One draw from the normalized Haar measure on the fundamental domain."""
    x, y, phi, xi1, xi2, zeta = (v[0] for v in haar_sample_batch(rng, 1))
    return GroupElement(complex(x, y), phi, xi1, xi2, zeta)


def haar_sample_batch(rng: np.random.Generator, n: int):
    """Vectorized Haar sampling; returns (x, y, phi, xi1, xi2, zeta) arrays.

    x uniform, y by inverse CDF of y^{-2} on [sqrt(3)/2, inf), rejection on
    |z| >= 1; the remaining coordinates are uniform on their boxes.
    """
    xs = np.empty(n)
    ys = np.empty(n)
    filled = 0
    while filled < n:
        m = max(n - filled, 64)
        x = rng.uniform(-0.5, 0.5, size=m)
        y = SQRT3_2 / (1.0 - rng.uniform(0.0, 1.0, size=m))
        ok = x * x + y * y >= 1.0
        k = min(int(ok.sum()), n - filled)
        xs[filled:filled + k] = x[ok][:k]
        ys[filled:filled + k] = y[ok][:k]
        filled += k
    phi = rng.uniform(0.0, math.pi, size=n)
    xi1 = rng.uniform(-0.5, 0.5, size=n)
    xi2 = rng.uniform(-0.5, 0.5, size=n)
    zeta = rng.uniform(-0.5, 0.5, size=n)
    return xs, ys, phi, xi1, xi2, zeta


def afe_coordinates(x: float, alpha: float, u: float, beta: float, N: float):
    """Renormalized coordinates of the one-step functional-equation move.

    Returns (x', alpha', u', beta', N', phase) with x' = -1/x, N' = N x,
    alpha' = alpha/x, u' = x (1 + u x), beta' = alpha + beta x and the
    accompanying phase e(1/8 - alpha^2/(2x)).
    """
    if x <= 0.0:
        raise DomainError("renormalization step needs x > 0")
    if N <= 0.0:
        raise DomainError("renormalization step needs N > 0")
    phase = complex(np.exp(2j * math.pi * (0.125 - alpha * alpha / (2.0 * x))))
    return -1.0 / x, alpha / x, x * (1.0 + u * x), alpha + beta * x, N * x, phase


def element_distance(g: GroupElement, h: GroupElement) -> float:
    """Max absolute coordinate difference (test helper)."""
    return max(
        abs(g.z.real - h.z.real),
        abs(g.z.imag - h.z.imag),
        abs(g.phi - h.phi),
        abs(g.xi1 - h.xi1),
        abs(g.xi2 - h.xi2),
        abs(g.zeta - h.zeta),
    )
