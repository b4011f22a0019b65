"""Theta functions on the Jacobi group.

theta_f sums the transported cutoff over the integers,

    Theta_f(z, phi; xi, zeta)
        = y^{1/4} e(zeta - xi1 xi2 / 2)
          sum_n f_phi((n - xi2) sqrt(y)) e((n - xi2)^2 x / 2 + n xi1),

with a certified truncation window.  theta_chi assembles the sharp-cutoff
theta function from the dyadic bump decomposition along the backward
geodesic; jacobi_theta is the classical two-variable theta with its exact
functional equation.  Invariance under the five group generators is what
ties all of this together, and check_gamma_invariance measures it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import cutoffs as co
from . import jacobi_group as jg
from .constants import C_ETA_TAIL, THETA_CHI_DIVERGENCE_LIMIT
from .errors import AccuracyNotMet, DivergenceSuspected, DomainError, UnsupportedCutoff
from .fresnel import e
from .shale_weil import PHI_EXACT_EPS, kappa_for_truncation, kphi_piecewise_grid

LOG2 = math.log(2.0)
_MAX_TERMS = 4_000_000


@dataclass(frozen=True)
class ThetaResult:
    value: complex
    terms_used: int
    certified_tail: float
    diophantine_warning: bool = False


def _phi_multiple_of_pi(phi: float):
    nu = round(phi / math.pi)
    if abs(phi - nu * math.pi) < PHI_EXACT_EPS * max(1.0, abs(phi)):
        return nu
    return None


def _exact_phase_array(narr: np.ndarray, xi2: float, x: float, xi1: float) -> np.ndarray:
    """e((n-xi2)^2 x/2 + n xi1) with the argument reduced mod 1 in exact
    rational arithmetic (floats are exact rationals)."""
    fx = Fraction(x)
    f1 = Fraction(xi1)
    f2 = Fraction(xi2)
    out = np.empty(len(narr), dtype=complex)
    for i, n in enumerate(narr):
        ni = Fraction(int(n))
        arg = ((ni - f2) ** 2 * fx / 2 + ni * f1) % 1
        out[i] = complex(e(float(arg)))
    return out


def _fast_phase_array(narr: np.ndarray, xi2: float, x: float, xi1: float) -> np.ndarray:
    d = narr - xi2
    arg = np.mod(0.5 * d * d * x, 1.0) + np.mod(narr * xi1, 1.0)
    return np.exp(2j * math.pi * arg)


def _sum_compensated(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _prefactor(g: jg.GroupElement) -> complex:
    return g.y**0.25 * complex(e(g.zeta - 0.5 * g.xi1 * g.xi2))


def _compact_window(g: jg.GroupElement, f: co.CutoffSpec, nu: int) -> np.ndarray:
    """Integers n with (n - xi2) sqrt(y) inside the support of f((-1)^nu .)."""
    lo, hi = co.support(f)
    if nu % 2:
        lo, hi = -hi, -lo
    sy = math.sqrt(g.y)
    n_lo = math.ceil(g.xi2 + lo / sy)
    n_hi = math.floor(g.xi2 + hi / sy)
    if n_hi - n_lo > _MAX_TERMS:
        raise AccuracyNotMet(f"theta series needs {n_hi - n_lo} terms")
    return np.arange(n_lo, n_hi + 1, dtype=float)


def _eta_window(g: jg.GroupElement, kappa: float, eta: int, tol: float) -> tuple[np.ndarray, float]:
    """Window |n - xi2| <= W/sqrt(y) with the kappa_eta tail bound < tol.

    Tail of sum over |w_n| > W of kappa (1+w)^{-eta} compared against an
    integral: 2 kappa [(1+W)^{-eta} + (1+W)^{1-eta} / ((eta-1) sqrt(y))].
    """
    sy = math.sqrt(g.y)
    pref = g.y**0.25
    W = 1.0
    for _ in range(400):
        tail = 2.0 * kappa * pref * ((1.0 + W) ** -eta + (1.0 + W) ** (1 - eta) / ((eta - 1) * sy))
        if tail < tol:
            break
        W *= 1.25
    else:
        raise AccuracyNotMet("kappa-based tail bound did not reach tolerance")
    half = int(math.ceil(W / sy)) + 1
    if 2 * half > _MAX_TERMS:
        raise AccuracyNotMet(f"theta series needs {2 * half} terms")
    n0 = round(g.xi2)
    return np.arange(n0 - half, n0 + half + 1, dtype=float), tail


def _gaussian_window(g: jg.GroupElement, tol: float) -> tuple[np.ndarray, float]:
    sy = math.sqrt(g.y)
    pref = g.y**0.25
    W = 1.0
    for _ in range(200):
        tail = 2.0 * pref * math.exp(-math.pi * W * W) * (1.0 + 1.0 / (2.0 * math.pi * W * sy))
        if tail < tol:
            break
        W *= 1.2
    half = int(math.ceil(W / sy)) + 1
    if 2 * half > _MAX_TERMS:
        raise AccuracyNotMet(f"theta series needs {2 * half} terms")
    n0 = round(g.xi2)
    return np.arange(n0 - half, n0 + half + 1, dtype=float), tail


def theta_f(g: jg.GroupElement, f: co.CutoffSpec, tol: float = 1e-9,
            exact_phases: bool = False) -> ThetaResult:
    """Evaluate Theta_f(g) with truncation certified below tol.

    The sharp cutoff is admitted only at phi = 0 mod pi, where the series is
    a finite sum; elsewhere it is not absolutely convergent.
    """
    nu = _phi_multiple_of_pi(g.phi)
    if isinstance(f, co.IndicatorUnit) and nu is None:
        raise UnsupportedCutoff("sharp cutoff: series not absolutely convergent off phi = 0 mod pi")

    if nu is not None and co.is_compactly_supported(f):
        narr = _compact_window(g, f, nu)
        sign = -1.0 if nu % 2 else 1.0
        fvals = co.evaluate(f, sign * (narr - g.xi2) * math.sqrt(g.y)).astype(complex)
        fvals *= complex(e(-0.25 * nu))
        tail = 0.0
    else:
        if co.is_piecewise(f):
            if g.y < 0.5:
                g = jg.reduce_group_element(g)
                nu = _phi_multiple_of_pi(g.phi)
                if nu is not None:
                    return theta_f(g, f, tol, exact_phases)
            kappa = kappa_for_truncation(f, 3)
            if isinstance(f, (co.Triangle, co.TriangleMinus)):
                # validated |sin phi|^{3/2} envelope shrinks the window a lot
                # when the rotation is close to a multiple of pi
                from .batch import _C_KW3

                kappa = min(kappa, _C_KW3 * abs(math.sin(g.phi)) ** 1.5)
            narr, tail = _eta_window(g, kappa, 3, tol)
            fvals, kerr = kphi_piecewise_grid(f, g.phi, (narr - g.xi2) * math.sqrt(g.y), tol=tol)
            tail += kerr * g.y**0.25
        elif isinstance(f, co.Gaussian):
            if g.y < 1e-6:
                g = jg.reduce_group_element(g)
            narr, tail = _gaussian_window(g, tol)
            w = (narr - g.xi2) * math.sqrt(g.y)
            fvals = np.exp(-0.5j * g.phi) * np.exp(-math.pi * w * w)
        elif isinstance(f, co.HermiteSeries):
            if g.y < 1e-6:
                g = jg.reduce_group_element(g)
            from .shale_weil import _hermite_kphi

            kappa = kappa_for_truncation(f, 3)
            narr, tail = _eta_window(g, kappa, 3, tol)
            fvals = _hermite_kphi(f, g.phi, (narr - g.xi2) * math.sqrt(g.y), tol)
        else:
            raise UnsupportedCutoff(f"unknown cutoff {type(f).__name__}")

    if exact_phases:
        phases = _exact_phase_array(narr, g.xi2, g.x, g.xi1)
    else:
        phases = _fast_phase_array(narr, g.xi2, g.x, g.xi1)
    value = _prefactor(g) * _sum_compensated(fvals * phases)
    return ThetaResult(value, len(narr), tail, False)


def jacobi_theta(z: complex, alpha: complex = 0j, tol: float = 1e-14) -> complex:
    """Classical theta sum over all integers, vartheta(z, alpha).

    x is reduced mod 2 and low points are pushed up by the exact functional
    equation (each inversion strictly increases y), then the rapidly
    convergent series is summed directly.
    """
    z = complex(z)
    alpha = complex(alpha)
    if not z.imag > 0:
        raise DomainError("z must lie in the upper half plane")
    prefactor = 1.0 + 0j
    for _ in range(64):
        shift = 2.0 * round(z.real / 2.0)
        z = complex(z.real - shift, z.imag)
        if z.imag < 0.5 and abs(z) < 1.0:
            prefactor *= np.sqrt(1j / z) * np.exp(-1j * math.pi * alpha * alpha / z)
            z, alpha = -1.0 / z, alpha / z
        else:
            break
    y = z.imag
    centre = -alpha.imag / y
    half = int(math.ceil(math.sqrt((-math.log(tol) + math.pi * alpha.imag**2 / y + 5) / (math.pi * y)))) + 2
    n = np.arange(round(centre) - half, round(centre) + half + 1)
    total = np.exp(1j * math.pi * (n * n * z + 2 * n * alpha))
    return complex(prefactor) * _sum_compensated(total)


def check_gamma_invariance(g: jg.GroupElement, f: co.CutoffSpec, i: int,
                           tol: float = 1e-10) -> float:
    """|Theta_f(gamma_i g) - Theta_f(g)|; zero in exact arithmetic."""
    left = theta_f(jg.jacobi_multiply(jg.gamma_generator(i), g), f, tol)
    right = theta_f(g, f, tol)
    return abs(left.value - right.value)


# ---------------------------------------------------------------------------
# the sharp-cutoff theta function via the dyadic series
# ---------------------------------------------------------------------------

_TRIANGLE = co.Triangle()
_TRIANGLE_MINUS = co.TriangleMinus()
_GEOM_TAIL = 1.0 / (1.0 - 2.0**-0.5)      # sum_{j>J} 2^{-j/2} = 2^{-J/2} (sqrt2/(sqrt2-1)) / sqrt2


def _per_term_bound(height: float) -> float:
    """Empirical bound for |Theta_Delta| at cusp height `height` (the frozen
    constant is validated against Haar samples in the test-suite)."""
    from .constants import C_THETA_DYADIC

    return C_THETA_DYADIC * max(height, jg.SQRT3_2) ** 0.25


def _backward_endpoint(g: jg.GroupElement) -> float:
    """Limit of Re(z) along g Phi^{-s}; the cusp excursion rate of the
    backward geodesic is governed by its Diophantine type."""
    s, c = math.sin(g.phi), math.cos(g.phi)
    if abs(s) < 1e-300:
        return math.inf
    return g.x - g.y * c / s


def theta_chi(g: jg.GroupElement, tol: float = 1e-6, J_max: int = 48) -> ThetaResult:
    """Theta_chi(g) by the dyadic bump series along the backward geodesic.

    Each term is a triangle-cutoff theta function, bounded through the cusp
    height of its (reduced) base point; summation stops when the
    height-aware geometric tail estimate drops below tol.  The certificate
    is semi-rigorous: it uses grid-estimated kappa constants and the
    observed height history as the model for future excursions.
    """
    nu = _phi_multiple_of_pi(g.phi)

    if nu is not None:
        # At phi = nu*pi the two dyadic branches terminate and resum exactly
        # to the finite sharp-cutoff window (the bump translates form a
        # partition of unity on the open unit interval), so the series is
        # evaluated in one pass from g's own coordinates with exact phases.
        sy = math.sqrt(g.y)
        sign = -1.0 if nu % 2 else 1.0
        rot = complex(e(-0.25 * nu))
        xi2 = g.xi2
        if 0.0 < abs(xi2 - round(xi2)) < 1e-9 * max(1.0, abs(xi2)):
            # an exactly-integer xi2 knocked off by product rounding would
            # flip the discontinuous endpoint terms; snap back
            xi2 = float(round(xi2))
        if sign > 0:
            n_lo, n_hi = math.floor(xi2), math.ceil(xi2 + 1.0 / sy)
        else:
            n_lo, n_hi = math.floor(xi2 - 1.0 / sy), math.ceil(xi2)
        narr = np.arange(n_lo, n_hi + 1, dtype=float)
        w = sign * (narr - xi2) * sy
        keep = (w > 1e-9) & (w < 1.0 - 1e-9)     # open interval, guarded ends
        narr = narr[keep]
        phases = _exact_phase_array(narr, xi2, g.x, g.xi1)
        pref = g.y**0.25 * complex(e(g.zeta - 0.5 * g.xi1 * g.xi2))
        total = pref * rot * _sum_compensated(phases)
        return ThetaResult(total, len(narr), 0.0, False)

    branches = [(g, _TRIANGLE), (jg.jacobi_multiply(g, jg.heisenberg(0.0, 1.0, 0.0)), _TRIANGLE_MINUS)]

    endpoint = _backward_endpoint(g)
    warning = False
    if math.isfinite(endpoint):
        from .diophantine import diophantine_type

        est = diophantine_type(endpoint, kappa=1.01, Q_max=100_000)
        warning = est.A_lower < 1e-9
    else:
        warning = True

    total = 0j
    terms = 0
    # budget: inner windows get 0.1 tol per branch-term (summed geometric
    # weight 2 * 3.41), the series remainder 0.3 tol, total just under tol
    tol_term = max(0.1 * tol, 1e-10)
    tail = math.inf
    inner_tails = 0.0
    # running max of observed cusp heights models future excursions; since
    # heights grow at most 4x per backward level, weight * height^{1/4} is
    # non-increasing and so is the certified tail
    height_max = jg.SQRT3_2
    reduced = [jg.reduce_group_element(h0) for h0, _ in branches]
    cutoffs_ = [cut for _, cut in branches]
    for j in range(J_max + 1):
        weight = 2.0 ** (-j / 2.0)
        for b in range(2):
            rg = reduced[b]
            height_max = max(height_max, rg.y)
            res = theta_f(rg, cutoffs_[b], tol=tol_term)
            total += weight * res.value
            terms += res.terms_used
            inner_tails += weight * res.certified_tail
            reduced[b] = jg.reduce_group_element(jg.geodesic_flow(rg, -2.0 * LOG2))
        if abs(total) > THETA_CHI_DIVERGENCE_LIMIT:
            raise DivergenceSuspected(f"partial sums reached {abs(total):.3e}")
        tail = 2.0 * _per_term_bound(height_max) * weight / math.sqrt(2.0) * _GEOM_TAIL
        if tail < 0.3 * tol:
            break
    else:
        warning = True
    return ThetaResult(total, terms, tail + inner_tails, warning)


def thm1_residual(x: float, alpha: float, u: float, beta: float, s: float,
                  f: co.CutoffSpec, tol: float = 1e-9) -> float:
    """|S_N(x, alpha; f) - e^{s/4} Theta_f(n+(x,alpha) n-(u,beta) Phi^s)|
    with N = e^{s/2}; zero exactly at u = beta = 0."""
    if s < 0:
        raise DomainError("geodesic time must be nonnegative")
    from .weyl import weyl_sum_general

    N = math.exp(s / 2.0)
    direct = weyl_sum_general(N, x, alpha, f)
    g = jg.jacobi_multiply(jg.jacobi_multiply(jg.n_plus(x, alpha), jg.n_minus(u, beta)), jg.phi_flow(s))
    theta = theta_f(g, f, tol)
    return abs(direct - math.exp(s / 4.0) * theta.value)
