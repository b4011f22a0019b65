"""Continued fractions and finite-range Diophantine certificates.

A real x is of type (A, kappa) when |x - p/q| > A / q^{1+kappa} for every
rational p/q, i.e. q^kappa dist(qx, Z) > A for every q >= 1.  From a float
only a finite-range statement is decidable, so the estimates here carry
their range Q_max.  The minimum of q^kappa ||q x|| over q <= Q is attained
at continued-fraction denominators (best approximations of the second
kind), which makes the finite-range constant exact and cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PrecisionExhausted

_Q_LIMIT = 2**52


@dataclass(frozen=True)
class ContinuedFraction:
    a0: int
    partial_quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]    # (p, q) pairs, q increasing
    exhausted: bool = False                     # hit the 2^52 reliability edge


@dataclass(frozen=True)
class DiophantineEstimate:
    kappa: float
    A_lower: float
    Q_max: int


def continued_fraction(x: float, max_terms: int = 48, strict: bool = False) -> ContinuedFraction:
    """Euclidean expansion of the (exact rational) double x.

    Stops at max_terms (<= 64), at the exact tail of the float, or at the
    2^52 denominator edge beyond which the float's expansion no longer
    reflects the underlying real (raises PrecisionExhausted when strict,
    otherwise truncates with exhausted=True)."""
    if max_terms > 64:
        raise DomainError("max_terms beyond the double-precision reliability limit (64)")
    frac = Fraction(x)
    a0 = math.floor(frac)
    rem = frac - a0
    quotients: list[int] = []
    convergents: list[tuple[int, int]] = [(int(a0), 1)]
    p_prev, q_prev = 1, 0
    p_cur, q_cur = int(a0), 1
    exhausted = False
    while rem != 0 and len(quotients) < max_terms:
        rem = 1 / rem
        a = math.floor(rem)
        q_next = a * q_cur + q_prev
        if q_next > _Q_LIMIT:
            if strict:
                raise PrecisionExhausted(f"denominator {q_next} exceeds 2^52")
            exhausted = True
            break
        rem -= a
        quotients.append(int(a))
        p_prev, p_cur = p_cur, int(a) * p_cur + p_prev
        q_prev, q_cur = q_cur, q_next
        convergents.append((int(p_cur), int(q_cur)))
    return ContinuedFraction(int(a0), tuple(quotients), tuple(convergents), exhausted)


def diophantine_type(x: float, kappa: float = 1.0, Q_max: int = 10_000) -> DiophantineEstimate:
    """A_lower = min_{1 <= q <= Q_max} q^kappa dist(q x, Z).

    This is the largest A for which |x - p/q| > A/q^{1+kappa} holds over the
    scanned range; the minimum is attained at continued-fraction
    denominators (dist is nonincreasing until the next convergent while
    q^kappa grows).  A float that is rational with denominator in range
    reports exactly zero."""
    if kappa < 1.0:
        raise DomainError("kappa must be at least 1")
    cf = continued_fraction(x, max_terms=64)
    fx = Fraction(x)
    best = math.inf
    for _, q in cf.convergents:
        if not 1 <= q <= Q_max:
            continue
        dist = abs(fx * q - round(fx * q))
        if dist <= 8 * 2.3e-16 * q * (1.0 + abs(x)):
            # numerically rational within range
            return DiophantineEstimate(kappa, 0.0, Q_max)
        best = min(best, q**kappa * float(dist))
    if 1 > Q_max:
        raise DomainError("Q_max must be at least 1")
    if best is math.inf:
        best = float(abs(fx - round(fx)))
    return DiophantineEstimate(kappa, float(best), Q_max)


def z_su(x: float, u: float, s: float) -> complex:
    """Base point of the geodesic issued from n_x n_-(u) at time s:
    x + u/(e^{2s} + u^2) + i e^s/(e^{2s} + u^2)."""
    den = math.exp(2.0 * s) + u * u
    return complex(x + u / den, math.exp(s) / den)


def excursion_weight(t: float) -> float:
    """W(t) = 1 + (t^2 + |t| sqrt(4 + t^2)) / 2."""
    return 1.0 + 0.5 * (t * t + abs(t) * math.sqrt(4.0 + t * t))


def excursion_bound(x: float, u: float, A: float, kappa: float, s: float) -> float:
    """Cusp-height bound for the backward geodesic z_{-s}(x, u) when
    x + 1/u is Diophantine of type (A, kappa)."""
    if u == 0.0:
        raise DomainError("excursion bound needs u != 0")
    s_split = 2.0 * max(math.log(1.0 / abs(u)), 0.0)
    if 0.0 <= s <= s_split:
        return max(1.0 / (2.0 * abs(u)), 2.0)
    expo = 1.0 - 1.0 / kappa
    return A ** (-2.0 / kappa) * abs(u) ** expo * math.exp(-expo * s) * excursion_weight(u)
