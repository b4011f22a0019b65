"""Cutoff functions entering generalized theta sums.

The tagged union `CutoffSpec` names the handful of cutoffs the library
understands: the Gaussian, the sharp indicator of (0, 1], the C^1
piecewise-quadratic triangle bump and its reflection, general trapezoids
with quadratic ramps, and finite Hermite series.  Piecewise-quadratic tags
expose their polynomial pieces, which is what the closed-form oscillatory
integrals consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError

Piece = tuple[float, float, tuple[float, ...]]  # (lo, hi, ascending poly coeffs)


@dataclass(frozen=True)
class Gaussian:
    """f(t) = exp(-pi t^2)."""


@dataclass(frozen=True)
class IndicatorUnit:
    """Sharp cutoff f = 1_(0,1]."""


@dataclass(frozen=True)
class Trapezoid:
    """Plateau on [a, b] with quadratic ramps of widths eps (left), del_ (right)."""

    a: float
    b: float
    eps: float
    del_: float

    def __post_init__(self):
        if not (self.a <= self.b):
            raise DomainError("trapezoid requires a <= b")
        if self.eps <= 0 or self.del_ <= 0:
            raise DomainError("trapezoid ramp widths must be positive")


@dataclass(frozen=True)
class Triangle:
    """The dyadic bump: trapezoid with a=b=1/3, eps=1/6, del=1/3."""


@dataclass(frozen=True)
class TriangleMinus:
    """Reflected bump, f(t) = Triangle(-t)."""


@dataclass(frozen=True)
class HermiteSeries:
    """Finite expansion sum_k c_k psi_k in the pi-normalized Hermite basis."""

    coeffs: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))


CutoffSpec = Union[Gaussian, IndicatorUnit, Trapezoid, Triangle, TriangleMinus, HermiteSeries]

TRIANGLE_PARAMS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0)


def trapezoid_pieces(a: float, b: float, eps: float, del_: float) -> list[Piece]:
    """Polynomial pieces of the quadratic-ramp trapezoid."""
    d = del_
    pieces: list[Piece] = []
    # 2/eps^2 (v - (a-eps))^2 on (a-eps, a-eps/2]
    c = 2.0 / eps**2
    r = a - eps
    pieces.append((a - eps, a - eps / 2, (c * r * r, -2 * c * r, c)))
    # 1 - 2/eps^2 (v - a)^2 on (a-eps/2, a]
    pieces.append((a - eps / 2, a, (1 - c * a * a, 2 * c * a, -c)))
    if b > a:
        pieces.append((a, b, (1.0,)))
    cd = 2.0 / d**2
    pieces.append((b, b + d / 2, (1 - cd * b * b, 2 * cd * b, -cd)))
    rd = b + d
    pieces.append((b + d / 2, b + d, (cd * rd * rd, -2 * cd * rd, cd)))
    return pieces


def _reflect(pieces: Sequence[Piece]) -> list[Piece]:
    out = []
    for lo, hi, coeffs in reversed(pieces):
        ref = tuple(c * (-1.0) ** k for k, c in enumerate(coeffs))
        out.append((-hi, -lo, ref))
    return out


def pieces_of(f: CutoffSpec) -> list[Piece]:
    """Polynomial pieces for the compactly supported tags."""
    if isinstance(f, Triangle):
        return trapezoid_pieces(*TRIANGLE_PARAMS)
    if isinstance(f, TriangleMinus):
        return _reflect(trapezoid_pieces(*TRIANGLE_PARAMS))
    if isinstance(f, Trapezoid):
        return trapezoid_pieces(f.a, f.b, f.eps, f.del_)
    if isinstance(f, IndicatorUnit):
        return [(0.0, 1.0, (1.0,))]
    raise DomainError(f"{type(f).__name__} has no piecewise-polynomial form")


def is_piecewise(f: CutoffSpec) -> bool:
    return isinstance(f, (Triangle, TriangleMinus, Trapezoid, IndicatorUnit))


def is_compactly_supported(f: CutoffSpec) -> bool:
    return isinstance(f, (Triangle, TriangleMinus, Trapezoid, IndicatorUnit))


def support(f: CutoffSpec) -> tuple[float, float]:
    pieces = pieces_of(f)
    return pieces[0][0], pieces[-1][1]


def evaluate(f: CutoffSpec, t) -> np.ndarray:
    """Pointwise values f(t); vectorized.

    The indicator uses the half-open convention 1_(0,1], matching the
    identification of S_N with a theta function at phi = 0.
    """
    t = np.asarray(t, dtype=float)
    if isinstance(f, Gaussian):
        return np.exp(-math.pi * t * t)
    if isinstance(f, IndicatorUnit):
        return ((t > 0.0) & (t <= 1.0)).astype(float)
    if isinstance(f, HermiteSeries):
        from .shale_weil import hermite_psi_all

        if not f.coeffs:
            return np.zeros_like(t)
        psi = hermite_psi_all(len(f.coeffs) - 1, t)
        return np.tensordot(np.asarray(f.coeffs), psi, axes=(0, 0))
    out = np.zeros_like(t, dtype=float)
    for lo, hi, coeffs in pieces_of(f):
        mask = (t >= lo) & (t <= hi)
        if np.any(mask):
            out[mask] = np.polynomial.polynomial.polyval(t[mask], np.asarray(coeffs))
    return out


def l2_norm_squared(f: CutoffSpec) -> float:
    """Exact ||f||_2^2 (piecewise tags by polynomial integration)."""
    if isinstance(f, Gaussian):
        return 1.0 / math.sqrt(2.0)          # int exp(-2 pi t^2)
    if isinstance(f, HermiteSeries):
        return float(sum(c * c for c in f.coeffs))
    total = 0.0
    for lo, hi, coeffs in pieces_of(f):
        sq = np.polynomial.polynomial.polymul(coeffs, coeffs)
        anti = np.polynomial.polynomial.polyint(sq)
        total += np.polynomial.polynomial.polyval(hi, anti) - np.polynomial.polynomial.polyval(lo, anti)
    return float(total)
