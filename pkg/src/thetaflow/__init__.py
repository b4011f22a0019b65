"""Quadratic Weyl sums, Jacobi-group theta functions, and the theta process."""

from .constants import DEFAULT_TOLS, Tolerances
from .cutoffs import (
    CutoffSpec,
    Gaussian,
    HermiteSeries,
    IndicatorUnit,
    Trapezoid,
    Triangle,
    TriangleMinus,
)
from .jacobi_group import (
    GroupElement,
    Sl2Matrix,
    afe_coordinates,
    cusp_height,
    gamma_generator,
    geodesic_flow,
    haar_sample,
    iwasawa,
    jacobi_inverse,
    jacobi_multiply,
    n_minus,
    n_plus,
    phi_flow,
    reduce_to_fundamental,
)
from .theta import ThetaResult, check_gamma_invariance, jacobi_theta, theta_chi, theta_f, thm1_residual

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
