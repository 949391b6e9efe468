"""End-to-end construction of the two-curve example with default parameters."""

from __future__ import annotations

from dataclasses import dataclass

from .construction import (
    NotAttractingError,
    build_dwell_loop,
    correction,
    corrected_map,
    multiplicator2,
    unfold,
)
from .core import DEFAULT_ALPHA, DEFAULT_QUAD_N
from .normalization import conjugate_curve, normalize
from .twocurve import DEFAULT_CURVE_N, track_two_curve

KAPPA_MARGIN = 1e-9


@dataclass
class Example:
    r: float
    a: float
    alpha: float
    loop: object
    curve: object
    corr: object
    corrected: object
    kappa2: float
    unfolded: object = None
    norm: object = None
    curves: tuple = ()

    @property
    def attracting(self):
        return self.kappa2 < -KAPPA_MARGIN

    @property
    def normalized_map(self):
        return self.norm.map


def build_example(r=0.2, a=0.8, alpha=DEFAULT_ALPHA, n=DEFAULT_CURVE_N, quad_n=DEFAULT_QUAD_N,
                  tol_norm=1e-12, require_attracting=True, normalized=True):
    """Loop -> 2-curve -> corrected map -> unfolding -> normalization.

    Raises :class:`NotAttractingError` when the corrected 2-curve's
    multiplicator is not below ``-1e-9`` and ``require_attracting`` is set.
    """
    loop = build_dwell_loop(r, a)
    curve = track_two_curve(loop, n)
    corr = correction(curve, alpha)
    pmap = corrected_map(loop, corr, alpha)
    k2 = multiplicator2(pmap, curve, quad_n)
    ex = Example(r, a, alpha, loop, curve, corr, pmap, k2)
    if require_attracting and not ex.attracting:
        raise NotAttractingError(k2)
    ex.unfolded = unfold(pmap, curve, tau=1)
    if normalized:
        ex.norm = normalize(ex.unfolded.map, tol=tol_norm)
        ex.curves = (conjugate_curve(ex.norm, ex.unfolded.gamma1),
                     conjugate_curve(ex.norm, ex.unfolded.gamma2))
    return ex
