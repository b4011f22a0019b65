"""Vectorized theta evaluation over arrays of group elements.

The Monte-Carlo harness needs millions of theta values; these routines
mirror the scalar implementations in `theta` (same reduction words, same
truncation logic) but operate on coordinate arrays.  The scalar/batch
agreement is pinned down in the test-suite.
"""

from __future__ import annotations

import math

import numpy as np

from . import cutoffs as co
from .constants import C_THETA_DYADIC, KAPPA_DYADIC, THETA_CHI_DIVERGENCE_LIMIT
from .fresnel import quadratic_phase_integral_elements
from .jacobi_group import SQRT3_2
from .shale_weil import PHI_EXACT_EPS

LOG2 = math.log(2.0)
_GEOM_TAIL = 1.0 / (1.0 - 2.0**-0.5)


class BatchState:
    """Structure-of-arrays coordinates (x, y, phi, xi1, xi2, zeta)."""

    __slots__ = ("x", "y", "phi", "xi1", "xi2", "zeta")

    def __init__(self, x, y, phi, xi1, xi2, zeta):
        self.x = np.array(x, dtype=float)
        self.y = np.array(y, dtype=float)
        self.phi = np.array(phi, dtype=float)
        self.xi1 = np.array(xi1, dtype=float)
        self.xi2 = np.array(xi2, dtype=float)
        self.zeta = np.array(zeta, dtype=float)

    def copy(self) -> "BatchState":
        return BatchState(self.x, self.y, self.phi, self.xi1, self.xi2, self.zeta)

    def __len__(self):
        return len(self.x)


def reduce_batch(st: BatchState, max_steps: int = 256) -> BatchState:
    """Vectorized invariance-group reduction (translate-invert, then xi)."""
    st = st.copy()
    for _ in range(max_steps):
        m = np.round(st.x)
        need_t = m != 0.0
        if np.any(need_t):
            mm = m[need_t]
            st.x[need_t] -= mm
            st.zeta[need_t] -= mm * st.xi2[need_t] / 4.0
            st.xi1[need_t] += -mm / 2.0 - mm * st.xi2[need_t]
        inv = st.x * st.x + st.y * st.y < 1.0 - 1e-12
        if not (np.any(inv) or np.any(need_t)):
            break
        if np.any(inv):
            xx, yy = st.x[inv], st.y[inv]
            r2 = xx * xx + yy * yy
            st.x[inv] = -xx / r2
            st.y[inv] = yy / r2
            st.phi[inv] += np.arctan2(yy, xx)
            st.zeta[inv] += 0.125
            x1 = st.xi1[inv].copy()
            st.xi1[inv] = -st.xi2[inv]
            st.xi2[inv] = x1
    m1 = np.floor(st.xi1 + 0.5)
    m2 = np.floor(st.xi2 + 0.5)
    st.zeta += m1 * m2 / 2.0 - m1 * st.xi2 / 2.0 + m2 * st.xi1 / 2.0
    st.xi1 -= m1
    st.xi2 -= m2
    st.zeta -= np.floor(st.zeta)
    return st


def flow_batch(st: BatchState, s: float) -> BatchState:
    """Vectorized geodesic flow by time s (same branch logic as the scalar)."""
    out = st.copy()
    sp = np.sin(st.phi)
    cp = np.cos(st.phi)
    sh = math.sinh(s)
    if s >= 0.0:
        den = math.exp(-s) + 2.0 * cp * cp * sh
    else:
        den = math.exp(s) - 2.0 * sp * sp * sh
    out.y = st.y / den
    out.x = st.x - st.y * 2.0 * sp * cp * sh / den
    out.phi = st.phi + np.arctan2(math.exp(-s) * sp, cp) - np.arctan2(sp, cp)
    return out


def right_multiply_heisenberg(st: BatchState, a1: float, a2: float, dz: float) -> BatchState:
    """st * (1; (a1, a2), dz), vectorized."""
    out = st.copy()
    sy = np.sqrt(st.y)
    cp, sp = np.cos(st.phi), np.sin(st.phi)
    # matrix columns of n_x a_y k_phi
    g11 = sy * cp + st.x * sp / sy
    g12 = -sy * sp + st.x * cp / sy
    g21 = sp / sy
    g22 = cp / sy
    v1 = g11 * a1 + g12 * a2
    v2 = g21 * a1 + g22 * a2
    out.xi1 = st.xi1 + v1
    out.xi2 = st.xi2 + v2
    out.zeta = st.zeta + dz + 0.5 * (st.xi1 * v2 - st.xi2 * v1)
    return out


def theta_gaussian_batch(st: BatchState) -> np.ndarray:
    """Theta values for the Gaussian cutoff; assumes y >= sqrt(3)/2 - eps."""
    sy = np.sqrt(st.y)
    half = int(math.ceil(4.0 / math.sqrt(SQRT3_2))) + 1
    n0 = np.round(st.xi2)
    total = np.zeros(len(st), dtype=complex)
    for k in range(-half, half + 1):
        n = n0 + k
        d = n - st.xi2
        w = d * sy
        phases = np.mod(0.5 * d * d * st.x, 1.0) + np.mod(n * st.xi1, 1.0)
        total += np.exp(-math.pi * w * w) * np.exp(2j * math.pi * phases)
    pref = st.y**0.25 * np.exp(2j * math.pi * (st.zeta - 0.5 * st.xi1 * st.xi2)) \
        * np.exp(-0.5j * st.phi)
    return pref * total


def _window_count(tol: float, eta: int = 3, kappa: float | None = None) -> int:
    """Half-width (in lattice points) of the kappa_eta window at y ~ sqrt3/2."""
    kappa = KAPPA_DYADIC[eta] if kappa is None else kappa
    sy = math.sqrt(SQRT3_2)
    W = 1.0
    for _ in range(200):
        tail = 2.0 * kappa * SQRT3_2**0.25 * ((1 + W) ** -eta + (1 + W) ** (1 - eta) / ((eta - 1) * sy))
        if tail < tol:
            break
        W *= 1.25
    return int(math.ceil(W / sy)) + 1


# Pointwise envelope for the rotated dyadic bumps, validated in tests:
#   |f_phi(w)| <= min(kappa3, C_KW3 |sin phi|^{3/2}) / (1+|w|)^3  (|w| >= 2;
# measured ratio sup |f_phi| (1+w)^3 / |sin phi|^{3/2} is ~4.7 out to w=1e4).
_C_KW3 = 8.0


def theta_piecewise_batch(st: BatchState, f: co.CutoffSpec, tol: float) -> np.ndarray:
    """Theta values for a piecewise-quadratic cutoff on reduced elements.

    Intended for Monte-Carlo tolerances (tol >= ~1e-5).  Far columns are
    masked per row through the |sin phi|^{3/2} envelope, which both saves
    work near phi = 0 mod pi and keeps the erf branch away from its
    far-stationary rounding amplification.
    """
    sy = np.sqrt(st.y)
    half = _window_count(tol)
    n0 = np.round(st.xi2)
    offsets = np.arange(-half, half + 1, dtype=float)
    narr = n0[:, None] + offsets[None, :]
    d = narr - st.xi2[:, None]
    w = d * sy[:, None]

    nu = np.round(st.phi / math.pi)
    delta = st.phi - nu * math.pi
    snap_eps = max(PHI_EXACT_EPS, (tol / 4.0) ** (4.0 / 3.0))
    snapped = np.abs(delta) <= snap_eps

    # per-row window from the |sin|^{3/2} envelope (tail below tol/2)
    sin_abs = np.abs(np.sin(st.phi))
    w_kappa3 = np.sqrt(4.0 * np.minimum(KAPPA_DYADIC[3], _C_KW3 * sin_abs**1.5) / (sy * tol))
    w_row = 2.0 + w_kappa3
    active = np.abs(w) <= w_row[:, None]

    fvals = np.zeros(w.shape, dtype=complex)
    snap_active = snapped[:, None] & active
    if np.any(snap_active):
        rows, cols = np.nonzero(snap_active)
        sign = np.where(nu[rows] % 2 == 0, 1.0, -1.0)
        vals = co.evaluate(f, sign * w[rows, cols])
        fvals[rows, cols] = vals * np.exp(-0.5j * math.pi * nu[rows])
    osc_active = (~snapped)[:, None] & active
    if np.any(osc_active):
        rows, cols = np.nonzero(osc_active)
        s = np.sin(st.phi[rows])
        c = np.cos(st.phi[rows])
        c2 = 0.5 * c / s
        wflat = w[rows, cols]
        c1 = -wflat / s
        total = np.zeros(c1.shape, dtype=complex)
        for lo, hi, coeffs in co.pieces_of(f):
            total += quadratic_phase_integral_elements(list(coeffs), c2, c1, lo, hi)
        sigma = 2.0 * nu[rows] + np.where(delta[rows] > 0, 1.0, -1.0)
        pref = np.exp(-2j * math.pi * sigma / 8.0) / np.sqrt(np.abs(s))
        quad = np.mod(c2 * wflat * wflat, 1.0)
        fvals[rows, cols] = pref * np.exp(2j * math.pi * quad) * total

    phases = np.mod(0.5 * d * d * st.x[:, None], 1.0) + np.mod(narr * st.xi1[:, None], 1.0)
    series = (fvals * np.exp(2j * math.pi * phases)).sum(axis=1)
    pref = st.y**0.25 * np.exp(2j * math.pi * (st.zeta - 0.5 * st.xi1 * st.xi2))
    return pref * series


_TRI = co.Triangle()
_TRI_MINUS = co.TriangleMinus()


def theta_chi_batch(st: BatchState, tol: float = 5e-3, J_max: int = 60):
    """Theta_chi over a batch by the dyadic series along the backward flow.

    Returns (values, certified_tail, converged, diverged, levels_used).
    Elements with phi at a multiple of pi are not handled here (the scalar
    finite path covers那 measure-zero set); callers pre-split.
    """
    n = len(st)
    tol_term = max(0.1 * tol, 1e-8)
    values = np.zeros(n, dtype=complex)
    height_max = np.full(n, SQRT3_2)
    diverged = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    levels = np.zeros(n, dtype=int)
    tails = np.full(n, np.inf)

    branches = [reduce_batch(st), reduce_batch(right_multiply_heisenberg(st, 0.0, 1.0, 0.0))]
    cutoffs_ = [_TRI, _TRI_MINUS]
    for j in range(J_max + 1):
        weight = 2.0 ** (-j / 2.0)
        idx = np.where(active)[0]
        if idx.size == 0:
            break
        for b in range(2):
            sub = BatchState(branches[b].x[idx], branches[b].y[idx], branches[b].phi[idx],
                             branches[b].xi1[idx], branches[b].xi2[idx], branches[b].zeta[idx])
            height_max[idx] = np.maximum(height_max[idx], sub.y)
            values[idx] += weight * theta_piecewise_batch(sub, cutoffs_[b], tol_term)
            nxt = reduce_batch(flow_batch(sub, -2.0 * LOG2))
            for name in BatchState.__slots__:
                getattr(branches[b], name)[idx] = getattr(nxt, name)
        newly_diverged = active & (np.abs(values) > THETA_CHI_DIVERGENCE_LIMIT)
        diverged |= newly_diverged
        active &= ~newly_diverged
        tails = np.where(active, 2.0 * C_THETA_DYADIC * height_max**0.25
                         * weight / math.sqrt(2.0) * _GEOM_TAIL, tails)
        levels[active] = j
        active &= tails >= 0.3 * tol
    converged = (~diverged) & (tails < 0.3 * tol)
    return values, tails, converged, diverged, levels
