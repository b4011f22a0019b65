"""Quadratic-phase oscillatory integrals.

Everything here evaluates integrals of the form

    I = int_a^b p(v) e(c2 v^2 + c1 v) dv,        e(x) = exp(2 pi i x),

for a low-degree polynomial p.  Three evaluation paths cover the parameter
space: a Taylor expansion in c2 when the quadratic phase is mild, a complex
error-function closed form when the stationary point sits in or near [a, b],
and a non-stationary integration-by-parts series when it is far away (that
regime would otherwise amplify phase rounding through the erf recurrence).
An oscillation-aware Gauss-Legendre panel rule serves as the independent
cross-check path and as the fallback of the public entry point.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import erf

from .errors import AccuracyNotMet, DomainError

TWO_PI = 2.0 * math.pi

# Path-selection gates.
_LINEAR_TAYLOR_GATE = 6.0       # |B|*halfspan below this: Taylor in c1
_ASYMPTOTIC_GATE = 12.0         # min |theta'| multiple required for IBP path


def e(x):
    """e(x) = exp(2 pi i x), elementwise on arrays."""
    return np.exp(2j * math.pi * np.asarray(x))


def _shift_poly(coeffs, mid):
    """Re-center p(v) = sum p_k v^k as sum r_k (v-mid)^k."""
    coeffs = np.asarray(coeffs, dtype=float)
    deg = len(coeffs) - 1
    r = np.zeros(deg + 1)
    for k, pk in enumerate(coeffs):
        if pk == 0.0:
            continue
        for j in range(k + 1):
            r[j] += pk * math.comb(k, j) * mid ** (k - j)
    return r


def _asymptotic_ibp_vec(coeffs, A, B, a, b, tol=5e-14, max_terms=30):
    """Non-stationary path: repeated integration by parts against the phase.

    theta(v) = A v^2 + B v with theta' = 2Av + B bounded away from zero on
    [a, b].  B may be an array; the by-parts polynomials depend only on A.
    Returns (values, converged_mask).
    """
    B = np.atleast_1d(np.asarray(B, dtype=float))
    w = {0: np.asarray(coeffs, dtype=float)}
    inv_tha = 1.0 / (2.0 * A * a + B)
    inv_thb = 1.0 / (2.0 * A * b + B)
    Ea = np.exp(1j * np.mod(A * a * a + B * a, TWO_PI))
    Eb = np.exp(1j * np.mod(A * b * b + B * b, TWO_PI))
    total = np.zeros(B.shape, dtype=complex)
    done = np.zeros(B.shape, dtype=bool)
    prev = np.full(B.shape, np.inf)
    diverged = np.zeros(B.shape, dtype=bool)
    for m in range(max_terms):
        va = np.zeros(B.shape, dtype=complex)
        vb = np.zeros(B.shape, dtype=complex)
        for j, q in w.items():
            va += npoly.polyval(a, q) * inv_tha ** (j + 1)
            vb += npoly.polyval(b, q) * inv_thb ** (j + 1)
        term = (1j ** (m - 1)) * (vb * Eb - va * Ea)
        total = np.where(done, total, total + term)
        mag = np.abs(term)
        done |= mag < tol
        diverged |= (~done) & (mag > prev * 1.2)
        if np.all(done | diverged):
            break
        prev = mag
        nw = {}
        for j, q in w.items():
            if len(q) > 1:
                nw[j + 1] = npoly.polyadd(nw.get(j + 1, np.zeros(1)), npoly.polyder(q))
            nw[j + 2] = npoly.polyadd(nw.get(j + 2, np.zeros(1)), (-2.0 * A * (j + 1)) * q)
        w = nw
    return total, done & ~diverged


@lru_cache(maxsize=256)
def _series_setup(h: float, kmax: int, series_tol: float):
    """Cached (gate, m_top, H-matrix) for the monomial table at (h, kmax)."""
    gate = max(3.0, 1.3 * kmax * h)
    m_top = 4
    while m_top < 90 and gate**m_top / math.factorial(m_top) > series_tol:
        m_top += 1
    M, K = np.meshgrid(np.arange(m_top), np.arange(kmax + 1), indexing="ij")
    S = M + K
    H = np.where(S % 2 == 0, 2.0 * h ** (S + 1) / (S + 1), 0.0)
    return gate, m_top, H


def _monomial_linear_table(B, h, kmax, series_tol=1e-18):
    """L_k(B) = int_{-h}^{h} t^k e^{iBt} dt for k = 0..kmax, B an array.

    The upward by-parts recurrence of the large-B branch is stable only for
    k < |B|, so the series gate is raised with kmax*h; the series length
    follows from the gate and series_tol.
    """
    B = np.asarray(B, dtype=float)
    L = np.empty((kmax + 1,) + B.shape, dtype=complex)
    gate, m_top, H = _series_setup(float(h), int(kmax), float(series_tol))
    small = np.abs(B) * h < gate
    if np.any(small):
        Bs = B[small]
        P = np.empty((m_top,) + Bs.shape, dtype=complex)
        P[0] = 1.0
        for m in range(1, m_top):
            P[m] = P[m - 1] * (1j * Bs) / m
        L[:, small] = H.T @ P
    big = ~small
    if np.any(big):
        Bb = B[big]
        eb = np.exp(1j * Bb * h)
        ea = np.exp(-1j * Bb * h)
        ib = 1.0 / (1j * Bb)
        cur = (eb - ea) * ib
        L[0, big] = cur
        hk_b, hk_a = 1.0, 1.0
        for k in range(1, kmax + 1):
            hk_b *= h
            hk_a *= -h
            cur = (hk_b * eb - hk_a * ea) * ib - k * ib * cur
            L[k, big] = cur
    return L


def _erf_path_vec(coeffs, A, B, a, b):
    """Closed form via the complex error function (stationary point welcome)."""
    B = np.atleast_1d(np.asarray(B, dtype=float))
    mid = 0.5 * (a + b)
    r = _shift_poly(coeffs, mid)
    deg = len(r) - 1
    Bp = 2.0 * A * mid + B
    t0, t1 = a - mid, b - mid
    s = complex(cmath.sqrt(-1j * A))
    h = Bp / (2.0 * A)
    pref = np.exp(-1j * Bp * Bp / (4.0 * A))
    J = [pref * (math.sqrt(math.pi) / (2.0 * s)) * (erf(s * (t1 + h)) - erf(s * (t0 + h)))]
    E1 = np.exp(1j * (A * t1 * t1 + Bp * t1))
    E0 = np.exp(1j * (A * t0 * t0 + Bp * t0))
    for k in range(1, deg + 1):
        bt = t1 ** (k - 1) * E1 - t0 ** (k - 1) * E0
        low = J[k - 2] if k >= 2 else 0.0
        J.append((bt - (k - 1) * low - 1j * Bp * J[k - 1]) / (2j * A))
    acc = np.zeros(B.shape, dtype=complex)
    for k in range(deg + 1):
        if r[k] != 0.0:
            acc += r[k] * J[k]
    return acc * np.exp(1j * (A * mid * mid + B * mid))


def quadratic_phase_integral_vec(coeffs, c2, c1, a, b):
    """int_a^b p(v) e(c2 v^2 + c1 v) dv for scalar c2 and an array of c1.

    The interval is split until each sub-piece has half-width <= 0.34, which
    keeps both the monomial by-parts recurrence and the Taylor-in-c2 series
    in their stable regimes; sub-pieces are then handled in the centered
    variable by the Taylor, far-stationary by-parts, or erf branch.
    """
    c1 = np.atleast_1d(np.asarray(c1, dtype=float))
    if b < a:
        raise DomainError("integration bounds must satisfy a <= b")
    if b == a:
        return np.zeros(c1.shape, dtype=complex)
    h = 0.5 * (b - a)
    A = TWO_PI * c2
    n_split = 1
    while (h / n_split > 0.34) or (abs(A) * (h / n_split) ** 2 > 0.25 and abs(A) <= 4.0):
        n_split += 1
        if n_split > 64:
            break
    if n_split > 1:
        edges = np.linspace(a, b, n_split + 1)
        total = np.zeros(c1.shape, dtype=complex)
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += quadratic_phase_integral_vec(coeffs, c2, c1, lo, hi)
        return total
    return _centered_piece_vec(coeffs, c2, c1, a, b)


def _centered_piece_vec(coeffs, c2, c1, a, b):
    mid = 0.5 * (a + b)
    h = 0.5 * (b - a)
    A = TWO_PI * c2
    r = _shift_poly(coeffs, mid)
    deg = len(r) - 1
    c1t = c1 + 2.0 * c2 * mid                      # centered linear coefficient
    phase0 = np.exp(2j * math.pi * (np.mod(c2 * mid * mid, 1.0) + np.mod(c1 * mid, 1.0)))

    if abs(A) * h * h <= 0.25:
        # Taylor in c2 against the monomial table
        m_top = 1
        while m_top < 16 and (abs(A) * h * h) ** m_top / math.factorial(m_top) > 1e-18:
            m_top += 1
        kmax = 2 * (m_top - 1) + deg
        L = _monomial_linear_table(TWO_PI * c1t, h, kmax)
        comb = np.zeros(kmax + 1, dtype=complex)
        cm = 1.0 + 0j
        for m in range(m_top):
            if m:
                cm *= 1j * A / m
            for k in range(deg + 1):
                if r[k] != 0.0:
                    comb[2 * m + k] += cm * r[k]
        total = np.tensordot(comb, L, axes=(0, 0))
        return phase0 * total

    out = np.empty(c1.shape, dtype=complex)
    B = TWO_PI * c1t
    tha = 2.0 * A * (-h) + B
    thb = 2.0 * A * h + B
    gate = _ASYMPTOTIC_GATE * (1.0 + abs(A) * 2.0 * h)
    far = (tha * thb > 0) & (np.minimum(np.abs(tha), np.abs(thb)) > gate)
    near = ~far
    if np.any(far):
        vals, ok = _asymptotic_ibp_vec(r, A, B[far], -h, h)
        sub = np.where(far)[0]
        out[sub[ok]] = vals[ok]
        near_extra = sub[~ok]
    else:
        near_extra = np.array([], dtype=int)
    idx = np.concatenate([np.where(near)[0], near_extra])
    if idx.size:
        out[idx] = _erf_path_vec(r, A, B[idx], -h, h)
    return phase0 * out


def quadratic_phase_integral_elements(coeffs, c2, c1, a, b, series_tol=1e-12):
    """Flat elementwise variant: c2 and c1 are same-shape arrays.

    Used by the batched theta evaluators.  Accuracy is tuned for Monte-Carlo
    tolerances (~1e-6 absolute): elements with mild quadratic phase go
    through the Taylor table, the rest through the erf closed form (whose
    far-stationary rounding stays below that level once the callers mask
    the far columns with the |sin phi|^{3/2} envelope).
    """
    c2 = np.asarray(c2, dtype=float)
    c1 = np.asarray(c1, dtype=float)
    if b < a:
        raise DomainError("integration bounds must satisfy a <= b")
    out = np.zeros(c1.shape, dtype=complex)
    h_full = 0.5 * (b - a)
    n_split = max(1, math.ceil(h_full / 0.34))
    edges = np.linspace(a, b, n_split + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        r = _shift_poly(coeffs, mid)
        deg = len(r) - 1
        A = TWO_PI * c2
        Bt = TWO_PI * (c1 + 2.0 * c2 * mid)
        phase0 = np.exp(2j * math.pi * (np.mod(c2 * mid * mid, 1.0) + np.mod(c1 * mid, 1.0)))
        taylor = np.abs(A) * h * h <= 0.25
        if np.any(taylor):
            Asub = A[taylor]
            Bsub = Bt[taylor]
            m_top = 2
            while m_top < 12 and 0.25**m_top / math.factorial(m_top) > series_tol:
                m_top += 1
            kmax = 2 * (m_top - 1) + deg
            L = _monomial_linear_table(Bsub, h, kmax, series_tol)
            cm = np.ones(Asub.shape, dtype=complex)
            acc = np.zeros(Bsub.shape, dtype=complex)
            for m in range(m_top):
                if m:
                    cm = cm * (1j * Asub) / m
                for k in range(deg + 1):
                    if r[k] != 0.0:
                        acc += (cm * r[k]) * L[2 * m + k]
            out[taylor] += phase0[taylor] * acc
        rest = ~taylor
        if np.any(rest):
            Asub = A[rest]
            Bsub = Bt[rest]
            s = np.sqrt(-1j * Asub)
            hs = Bsub / (2.0 * Asub)
            pref = np.exp(-1j * Bsub * Bsub / (4.0 * Asub))
            J = [pref * (math.sqrt(math.pi) / (2.0 * s)) * (erf(s * (h + hs)) - erf(s * (-h + hs)))]
            E1 = np.exp(1j * (Asub * h * h + Bsub * h))
            E0 = np.exp(1j * (Asub * h * h - Bsub * h))
            for k in range(1, deg + 1):
                bt = h ** (k - 1) * E1 - (-h) ** (k - 1) * E0
                low = J[k - 2] if k >= 2 else 0.0
                J.append((bt - (k - 1) * low - 1j * Bsub * J[k - 1]) / (2j * Asub))
            acc = np.zeros(Bsub.shape, dtype=complex)
            for k in range(deg + 1):
                if r[k] != 0.0:
                    acc += r[k] * J[k]
            out[rest] += phase0[rest] * acc
    return out


def oscillatory_quadrature(coeffs, c2, c1, a, b, order=24, max_step=0.25):
    """Gauss-Legendre panels sized so each holds at most ~one oscillation.

    Independent of the closed forms above; used as cross-check oracle and as
    the fallback of `fresnel_phase_integral`.
    """
    if b < a:
        raise DomainError("integration bounds must satisfy a <= b")
    gl_x, gl_w = np.polynomial.legendre.leggauss(order)
    pts = [a]
    v = a
    while v < b:
        step = min(max_step, 1.0 / (abs(2 * c2 * v + c1) + abs(2 * c2) * (abs(v) + 1.0) + 1.0), b - v)
        v += step
        pts.append(min(v, b))
    total = 0j
    p = np.asarray(coeffs, dtype=float)
    for lo, hi in zip(pts[:-1], pts[1:]):
        xm = 0.5 * (lo + hi)
        xr = 0.5 * (hi - lo)
        vv = xm + xr * gl_x
        total += xr * np.sum(gl_w * npoly.polyval(vv, p) * np.exp(2j * math.pi * (c2 * vv * vv + c1 * vv)))
    return complex(total)


def fresnel_phase_integral(coeffs, c2, c1, a, b, tol=1e-10):
    """int_a^b p(v) e(c2 v^2 + c1 v) dv to absolute accuracy `tol`.

    `coeffs` are ascending polynomial coefficients of p.  Raises
    AccuracyNotMet when neither the closed forms nor the panel fallback can
    certify the requested tolerance.
    """
    if b < a:
        raise DomainError("integration bounds must satisfy a <= b")
    if b == a:
        return 0j
    value = complex(quadratic_phase_integral_vec(coeffs, c2, np.array([c1]), a, b)[0])
    # Cheap rounding estimate: phase magnitudes times machine epsilon, with
    # the erf-recurrence amplification for a stationary point off-center.
    # The far-stationary by-parts branch caps that amplification at the gate.
    A = TWO_PI * c2
    B = TWO_PI * c1
    mid = 0.5 * (a + b)
    h = min(0.5 * (b - a), 0.34)
    Bp = 2 * A * mid + B
    phase_mag = abs(A) * max(a * a, b * b) + abs(B) * max(abs(a), abs(b))
    if abs(A) > 0:
        shift = min(abs(Bp / (2 * A)), _ASYMPTOTIC_GATE * (1 + 2 * abs(A) * h) / (2 * abs(A)) + 2 * h)
        phase_mag += abs(A) * shift * shift
        amp = max(1.0, shift) ** max(0, len(coeffs) - 1)
    else:
        amp = 1.0
    scale = float(np.max(np.abs(coeffs))) * (abs(b - a) + 1.0)
    est = 5e-16 * (1.0 + phase_mag) * amp * max(1.0, scale)
    if est <= tol:
        return value
    fallback = oscillatory_quadrature(coeffs, c2, c1, a, b, order=24)
    check = oscillatory_quadrature(coeffs, c2, c1, a, b, order=16)
    if abs(fallback - check) > tol:
        raise AccuracyNotMet(
            f"quadratic-phase integral: certified only to {abs(fallback - check):.2e} > {tol:.2e}")
    return fallback
