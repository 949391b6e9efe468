"""Fibred quadratic polynomials over a circle rotation.

The package builds an explicit map ``(theta, z) -> (theta + alpha, P_theta(z))``
with two disjoint attracting invariant curves, normalizes it to
``z^2 + C(theta)`` and classifies the critical circle by its fate.
"""

from .analysis import (
    Classification,
    basin_scan,
    classify_critical,
    empirical_rate,
    escape_radius,
    fiber_slice,
)
from .construction import (
    InvariantCurve,
    build_dwell_loop,
    correction,
    corrected_map,
    kappa2_closed_form,
    multiplicator,
    multiplicator2,
    unfold,
)
from .core import FibredMap, ParametricLoop, SampledLoop, iterate, quadrature
from .example import build_example
from .normalization import conjugate_curve, normalize, solve_u1
from .twocurve import TwoCurve, period2_points, track_two_curve

__all__ = [
    "Classification",
    "FibredMap",
    "InvariantCurve",
    "ParametricLoop",
    "SampledLoop",
    "TwoCurve",
    "basin_scan",
    "build_dwell_loop",
    "build_example",
    "classify_critical",
    "conjugate_curve",
    "correction",
    "corrected_map",
    "empirical_rate",
    "escape_radius",
    "fiber_slice",
    "iterate",
    "kappa2_closed_form",
    "multiplicator",
    "multiplicator2",
    "normalize",
    "period2_points",
    "quadrature",
    "solve_u1",
    "track_two_curve",
    "unfold",
]
