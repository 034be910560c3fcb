"""Growth-function calculus: classification, geodesic interpolation, embedding criteria
and a Luxembourg-norm witness on the weighted unit disk."""

from .bergman import LuxResult, QuadConfig, TestFunction, lux_norm, weighted_integral, witness_embedding
from .classification import (ClassReport, classify, dlog_constants, duality_check,
                             matuszewska_indices, type_exponents)
from .embedding import (BoundaryCurve, CminResult, EmbeddingParams, TDomain, beta_star,
                        boundary_sweep, cmin, member_E, member_F, verify_E_convexity,
                        verify_F_logconvexity)
from .growth import (DEFAULT_GRID, GRAMMAR, DExp, ExpM1, Geo, GridConfig, InverseView, InvGeo,
                     LogView, Pow, PowLog, format_spec, log_derivative, make_view, parse_spec)
from .interpolation import (InterpFamily, Mode, check_type_propagation, interp_ratio_preservation,
                            interpolate, ratio_monotonicity)

__version__ = "0.1.0"

__all__ = [
    "LuxResult", "QuadConfig", "TestFunction", "lux_norm", "weighted_integral",
    "witness_embedding",
    "ClassReport", "classify", "dlog_constants", "duality_check", "matuszewska_indices",
    "type_exponents",
    "BoundaryCurve", "CminResult", "EmbeddingParams", "TDomain", "beta_star", "boundary_sweep",
    "cmin", "member_E", "member_F", "verify_E_convexity", "verify_F_logconvexity",
    "DEFAULT_GRID", "GRAMMAR", "DExp", "ExpM1", "Geo", "GridConfig", "InverseView", "InvGeo",
    "LogView", "Pow", "PowLog", "format_spec", "log_derivative", "make_view", "parse_spec",
    "InterpFamily", "Mode", "check_type_propagation", "interp_ratio_preservation", "interpolate",
    "ratio_monotonicity",
]
