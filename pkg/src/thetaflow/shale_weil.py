"""Numerical action of the metaplectic rotation operators on cutoffs.

f_phi denotes the cutoff transported by the lifted rotation through angle
phi, i.e. the oscillatory-kernel operator with the eighth-root phase
e(-sigma_phi/8) in front.  Smooth cutoffs go through their Hermite
expansions (the rotations are diagonal in that basis); piecewise-quadratic
cutoffs go through closed-form quadratic-phase integrals; an
oscillation-aware quadrature path cross-checks both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import cutoffs as co
from .constants import C_SNAP_EDELTA
from .errors import AccuracyNotMet, UnsupportedCutoff
from .fresnel import e, oscillatory_quadrature, quadratic_phase_integral_vec

SQRT2PI = math.sqrt(2.0 * math.pi)

# |phi - nu*pi| below this is treated as an exact multiple of pi.
PHI_EXACT_EPS = 1e-13


@dataclass(frozen=True)
class KappaEstimate:
    """Grid lower bound for sup_{w,phi} |f_phi(w)| (1+|w|)^eta."""

    eta: float
    value: float
    grid_spec: str


def sigma_phi(phi: float) -> int:
    """Eighth-root index: 2*nu at phi = nu*pi, else 2*nu+1 on (nu*pi, (nu+1)*pi)."""
    nu_near = round(phi / math.pi)
    if abs(phi - nu_near * math.pi) < PHI_EXACT_EPS * max(1.0, abs(phi)):
        return 2 * nu_near
    return 2 * math.floor(phi / math.pi) + 1


def hermite_psi(k: int, t) -> np.ndarray:
    """pi-normalized Hermite function psi_k(t), stable for k up to 10^4.

    Upward recurrence on the normalized functions with dynamic rescaling, so
    deep evanescent regions do not freeze the recursion at zero.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    p0 = 2.0**0.25 * np.exp(-math.pi * t * t)
    if k == 0:
        out = p0
    else:
        # track log2-scale per point to survive underflow of the seed
        expo = np.zeros(t.shape)
        tiny = p0 == 0.0
        if np.any(tiny):
            # restart seeds at a representable magnitude; scale restored at the end
            expo[tiny] = -math.pi * t[tiny] ** 2 / math.log(2.0) + 0.25
            p0 = np.where(tiny, 2.0**0.25, p0)
        p1 = math.sqrt(4.0 * math.pi) * t * p0
        prev, cur = p0, p1
        for j in range(1, k):
            nxt = math.sqrt(4.0 * math.pi / (j + 1)) * t * cur - math.sqrt(j / (j + 1)) * prev
            prev, cur = cur, nxt
            big = np.abs(cur) > 1e250
            if np.any(big):
                prev = np.where(big, prev * 1e-250, prev)
                cur = np.where(big, cur * 1e-250, cur)
                expo = np.where(big, expo + 250 * math.log(10.0) / math.log(2.0), expo)
        out = cur * np.exp2(np.clip(expo, -1200.0, 0.0))
        out = np.where(np.isfinite(out), out, 0.0)
    return float(out[0]) if scalar else out


def hermite_psi_all(kmax: int, t) -> np.ndarray:
    """Array of psi_k(t) for k = 0..kmax; shape (kmax+1,) + t.shape."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((kmax + 1,) + t.shape)
    out[0] = 2.0**0.25 * np.exp(-math.pi * t * t)
    if kmax >= 1:
        out[1] = math.sqrt(4.0 * math.pi) * t * out[0]
    for j in range(1, kmax):
        out[j + 1] = math.sqrt(4.0 * math.pi / (j + 1)) * t * out[j] - math.sqrt(j / (j + 1)) * out[j - 1]
    return out


def _hermite_bar_all(kmax: int, t: np.ndarray) -> np.ndarray:
    """Gaussian-free normalized Hermite polynomials (psi_k = Hbar_k e^{-pi t^2})."""
    out = np.zeros((kmax + 1,) + t.shape)
    out[0] = 2.0**0.25
    if kmax >= 1:
        out[1] = math.sqrt(4.0 * math.pi) * t * out[0]
    for j in range(1, kmax):
        out[j + 1] = math.sqrt(4.0 * math.pi / (j + 1)) * t * out[j] - math.sqrt(j / (j + 1)) * out[j - 1]
    return out


def hermite_coeffs(f: co.CutoffSpec, K: int) -> np.ndarray:
    """First K Hermite coefficients <f, psi_k> of a smooth cutoff."""
    if isinstance(f, co.HermiteSeries):
        out = np.zeros(K)
        n = min(K, len(f.coeffs))
        out[:n] = f.coeffs[:n]
        return out
    if not isinstance(f, co.Gaussian):
        raise UnsupportedCutoff("Hermite coefficients need a Gaussian or HermiteSeries cutoff")
    return _weighted_hermite_coeffs(lambda t: np.ones_like(t), K)


def _weighted_hermite_coeffs(weighted_f, K: int) -> np.ndarray:
    """<f, psi_k> for f = weighted_f(t) * exp(-pi t^2), Gauss-Hermite nodes >= 4K."""
    n = max(4 * K, 80)
    u, w = np.polynomial.hermite.hermgauss(n)
    keep = w > 0.0  # extreme nodes underflow; their contribution is below 1e-180
    u, w = u[keep], w[keep]
    t = u / SQRT2PI
    hbar = _hermite_bar_all(max(K - 1, 0), t)
    vals = weighted_f(t)
    return np.asarray([(w * vals * hbar[k]).sum() / SQRT2PI for k in range(K)])


@lru_cache(maxsize=64)
def _hermite_rep(f: co.CutoffSpec, tol: float) -> np.ndarray:
    """Hermite coefficients truncated so the dropped tail is below tol/10."""
    if isinstance(f, co.HermiteSeries):
        return np.asarray(f.coeffs, dtype=float)
    if isinstance(f, co.Gaussian):
        return np.array([2.0**-0.25])
    raise UnsupportedCutoff(f"no Hermite path for {type(f).__name__}")


def _phi_snap_delta(phi: float) -> tuple[int, float]:
    nu = round(phi / math.pi)
    return nu, phi - nu * math.pi


def kphi_piecewise_grid(f: co.CutoffSpec, phi: float, w, tol: float = 1e-8):
    """f_phi on an array of w for piecewise-quadratic f.

    Returns (values, err_sum), where err_sum estimates the *summed* absolute
    error over the grid (value-weighted first-order rounding in the
    oscillatory case; the |phi - nu pi|^{3/4} correction envelope in the
    snapped case).  For |phi - nu pi| small enough that the rotation
    correction is below tol (C^1 tags only), the exact nu*pi case replaces
    the ill-conditioned oscillatory integral.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    pieces = co.pieces_of(f)
    nu, delta = _phi_snap_delta(phi)
    smooth = not isinstance(f, co.IndicatorUnit)
    snap_eps = PHI_EXACT_EPS
    if smooth:
        snap_eps = max(snap_eps, (tol / C_SNAP_EDELTA) ** (4.0 / 3.0))
    if abs(delta) <= snap_eps:
        sign = -1.0 if nu % 2 else 1.0
        vals = co.evaluate(f, sign * w).astype(complex)
        vals *= complex(e(-0.25 * nu))  # e(-sigma/8) with sigma = 2 nu
        if abs(delta) <= PHI_EXACT_EPS:
            err = 0.0
        else:
            near = int(np.count_nonzero(np.abs(w) <= 2.0))
            far = np.abs(w[np.abs(w) > 2.0])
            err = C_SNAP_EDELTA * (abs(delta) ** 0.75 * near
                                   + abs(delta) ** 1.5 * float(np.sum(1.0 / far**2)) if near or far.size else 0.0)
        return vals, err
    s, c = math.sin(phi), math.cos(phi)
    c2 = 0.5 * c / s
    c1 = -w / s
    total = np.zeros(w.shape, dtype=complex)
    for lo, hi, coeffs in pieces:
        total += quadratic_phase_integral_vec(list(coeffs), c2, c1, lo, hi)
    pref = complex(e(-sigma_phi(phi) / 8.0)) / math.sqrt(abs(s))
    quad_phase = np.mod(c2 * w * w, 1.0)
    vals = pref * np.exp(2j * math.pi * quad_phase) * total
    phase_mag = np.abs(c2) * w * w + np.abs(c1) + 1.0
    err = float(7e-16 * np.sum(np.abs(vals) * phase_mag))
    return vals, err


def _hermite_kphi(f: co.CutoffSpec, phi: float, w: np.ndarray, tol: float) -> np.ndarray:
    coeffs = _hermite_rep(f, tol)
    if len(coeffs) == 0:
        return np.zeros(w.shape, dtype=complex)
    psi = hermite_psi_all(len(coeffs) - 1, w)
    k = np.arange(len(coeffs))
    rot = np.exp(-0.5j * (2 * k + 1) * phi)
    return np.tensordot(coeffs * rot, psi, axes=(0, 0))


def apply_kphi(f: co.CutoffSpec, phi: float, w, tol: float = 1e-8):
    """f_phi(w): the rotated cutoff, including the e(-sigma_phi/8) phase.

    Dispatch: exact case formulas at phi = nu*pi, the Hermite expansion for
    Gaussian/HermiteSeries tags, closed-form quadratic-phase integrals for
    the piecewise tags.  Raises AccuracyNotMet when the internal estimate
    exceeds tol.
    """
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    scalar = np.asarray(w).ndim == 0
    nu, delta = _phi_snap_delta(phi)
    if isinstance(f, (co.Gaussian, co.HermiteSeries)):
        vals = _hermite_kphi(f, phi, w_arr, tol)
    else:
        if abs(delta) <= PHI_EXACT_EPS:
            sign = -1.0 if nu % 2 else 1.0
            vals = co.evaluate(f, sign * w_arr).astype(complex) * complex(e(-0.25 * nu))
        else:
            vals, err = kphi_piecewise_grid(f, phi, w_arr, tol)
            if err > tol:
                raise AccuracyNotMet(f"f_phi estimate {err:.2e} exceeds tol {tol:.2e}")
    return complex(vals[0]) if scalar else vals


def apply_kphi_quadrature(f: co.CutoffSpec, phi: float, w: float) -> complex:
    """Cross-check path: direct oscillation-aware quadrature of the kernel."""
    nu, delta = _phi_snap_delta(phi)
    if abs(delta) <= PHI_EXACT_EPS:
        sign = -1.0 if nu % 2 else 1.0
        return complex(co.evaluate(f, sign * np.asarray(w)) * e(-0.25 * nu))
    s, c = math.sin(phi), math.cos(phi)
    c2 = 0.5 * c / s
    c1 = -w / s
    if co.is_piecewise(f):
        total = 0j
        for lo, hi, coeffs in co.pieces_of(f):
            total += oscillatory_quadrature(list(coeffs), c2, c1, lo, hi)
    else:
        # smooth tags: quadrature against sampled values on the effective support
        from numpy.polynomial.legendre import leggauss

        gl_x, gl_w = leggauss(24)
        lo, hi = -8.0, 8.0
        total = 0j
        v = lo
        while v < hi:
            step = min(0.25, 1.0 / (abs(2 * c2 * v + c1) + abs(2 * c2) * (abs(v) + 1) + 1.0), hi - v)
            xm, xr = v + step / 2, step / 2
            vv = xm + xr * gl_x
            total += xr * np.sum(gl_w * co.evaluate(f, vv) * np.exp(2j * math.pi * (c2 * vv * vv + c1 * vv)))
            v += step
    pref = complex(e(-sigma_phi(phi) / 8.0)) / math.sqrt(abs(s))
    return pref * complex(e(np.mod(0.5 * c / s * w * w, 1.0))) * total


def trapezoid_fourier(T: co.Trapezoid, w, sign: int = 1):
    """Fourier transform of the trapezoid at +/-w (phi = +/-pi/2 rotation,
    without the caller's e(-sigma_phi/8) phase).

    Closed form for |w| away from zero; the w^3 cancellation near the origin
    is delegated to the exact linear-phase path.
    """
    a, b, eps, d = T.a, T.b, T.eps, T.del_
    w_arr = np.atleast_1d(np.asarray(w, dtype=float)) * (1.0 if sign >= 0 else -1.0)
    scalar = np.asarray(w).ndim == 0
    out = np.empty(w_arr.shape, dtype=complex)
    smallish = np.abs(w_arr) < 0.5
    if np.any(smallish):
        vals = np.zeros(np.count_nonzero(smallish), dtype=complex)
        for lo, hi, coeffs in co.trapezoid_pieces(a, b, eps, d):
            vals += quadratic_phase_integral_vec(list(coeffs), 0.0, -w_arr[smallish], lo, hi)
        out[smallish] = vals
    big = ~smallish
    if np.any(big):
        ww = w_arr[big]
        # two integrations by parts against the piecewise-constant second
        # derivative; the ramp curvatures 4/eps^2 and 4/del^2 concentrate at
        # the shoulders (quadrature-checked; the sign is fixed by the e(-wv)
        # convention)
        bracket = (d**2 * e(-a * ww) * (1 - e(ww * eps / 2)) ** 2
                   - eps**2 * e(-ww * (b + d)) * (1 - e(ww * d / 2)) ** 2)
        out[big] = 1j / (2 * math.pi**3 * ww**3 * eps**2 * d**2) * bracket
    return complex(out[0]) if scalar else out


def kappa_eta_bound(f: co.CutoffSpec, eta: float, w_max: float = 50.0,
                    n_phi: int = 256) -> KappaEstimate:
    """Grid estimate of kappa_eta(f) = sup |f_phi(w)| (1+|w|)^eta.

    A lower bound for the true sup (documented grid), intended as the
    diagnostic constant in truncation certificates.
    """
    if eta < 0:
        raise UnsupportedCutoff("eta must be nonnegative")
    if isinstance(f, co.IndicatorUnit) and eta > 1:
        raise UnsupportedCutoff("sharp cutoff decays too slowly: kappa_eta infinite for eta > 1")
    w_pos = np.concatenate([np.linspace(0.0, 1.0, 33), np.geomspace(1.0, w_max, 64)[1:]])
    w_grid = np.concatenate([-w_pos[::-1], w_pos])
    weight = (1.0 + np.abs(w_grid)) ** eta
    best = 0.0
    if isinstance(f, co.Gaussian):
        # |f_phi| = exp(-pi w^2) for every phi
        best = float(np.max(np.exp(-math.pi * w_grid**2) * weight))
        return KappaEstimate(eta, best, f"|w|<={w_max} (97x2 nodes), phi-independent")
    for phi in np.linspace(0.0, math.pi, n_phi, endpoint=False):
        if isinstance(f, co.HermiteSeries):
            vals = np.abs(_hermite_kphi(f, phi, w_grid, 1e-9))
        else:
            vals, _ = kphi_piecewise_grid(f, phi, w_grid, tol=1e-7)
            vals = np.abs(vals)
        best = max(best, float(np.max(vals * weight)))
    return KappaEstimate(eta, best, f"|w|<={w_max} (97x2 nodes), {n_phi} phi nodes in [0,pi)")


@lru_cache(maxsize=32)
def kappa_for_truncation(f: co.CutoffSpec, eta: int) -> float:
    """Cached kappa_eta value with a safety factor, for tail bounds.

    The dyadic bump constants are frozen (they sit on the hot path of the
    sharp-cutoff series); everything else is measured on the grid.
    """
    from .constants import KAPPA_DYADIC

    if isinstance(f, (co.Triangle, co.TriangleMinus)) and eta in KAPPA_DYADIC:
        return KAPPA_DYADIC[eta]
    return 2.0 * kappa_eta_bound(f, eta).value
