"""Hardy-Littlewood-Polya type operators on radial functions over Q_p.

Exact p-adic arithmetic, a boundedness decision procedure with closed-form
sharp norms, Schur-test upper bounds, and numerical lower bounds.
"""

from .analysis import (SchurCertificate, SharpNorm, Status, Verdict, balance_residual,
                       check_boundedness, closed_form_I, exact_norm_endpoint,
                       optimize_schur_bound, radial_integral_constant, schur_upper_bound,
                       sharp_norm, sharp_norm_terms)
from .errors import (BadWindowError, DivergesError, InfeasibleFreeParamsError,
                     NotAvailableError, NotBoundedError, OverflowFlag, PadicHLPError,
                     WindowTooShallowError, WrongRegimeError, ZeroInputError)
from .estimation import (NormReport, divergence_witness, estimate_norm, extremal_ratio_sweep,
                         growth_factor, matrix_lower_ladder, matrix_norm_lower)
from .operator import KernelParams, SpaceParams, apply_hlp, build_matrix, kernel_eval
from .padic_core import (Ball, PAdicScalar, PrimeBase, Sphere, digit_expansion, haar_measure,
                         padic_norm, valuation)
from .radial import (RadialFunction, ValuationWindow, extremal_family, integrate_radial,
                     weighted_norm)

__version__ = "0.1.0"

__all__ = [
    "Ball", "BadWindowError", "DivergesError", "InfeasibleFreeParamsError", "KernelParams",
    "NormReport", "NotAvailableError", "NotBoundedError", "OverflowFlag", "PAdicScalar",
    "PadicHLPError", "PrimeBase", "RadialFunction", "SchurCertificate", "SharpNorm",
    "SpaceParams", "Sphere", "Status", "ValuationWindow", "Verdict", "WindowTooShallowError",
    "WrongRegimeError", "ZeroInputError", "apply_hlp", "balance_residual", "build_matrix",
    "check_boundedness", "closed_form_I", "digit_expansion", "divergence_witness",
    "estimate_norm", "exact_norm_endpoint", "extremal_family", "extremal_ratio_sweep",
    "growth_factor", "haar_measure", "integrate_radial", "kernel_eval", "matrix_lower_ladder",
    "matrix_norm_lower", "optimize_schur_bound", "padic_norm", "radial_integral_constant",
    "schur_upper_bound", "sharp_norm", "sharp_norm_terms", "valuation", "weighted_norm",
]
