"""
The example itself: dwell loop, correction maps, the corrected fibred polynomial,
multiplicators and the 2-unfolding into two invariant curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_QUAD_N,
    FibredMap,
    ParameterLoop,
    ParametricLoop,
    SampledLoop,
    TWO_PI,
    cover_wrap,
    project,
    quadrature,
    trig_coefficients,
    trig_eval,
    uniform_grid,
    wrap,
)
from .twocurve import PARABOLIC, TwoCurve

DEGENERATE_TOL = 1e-6
UNFOLD_TOL = 1e-6


class InvarianceError(ValueError):
    """A curve is not invariant under the map it was handed with."""


class NotAttractingError(RuntimeError):
    """The measured multiplicator of the 2-curve is not negative."""

    def __init__(self, kappa2):
        self.kappa2 = kappa2
        super().__init__(f"2-curve multiplicator is not negative: kappa2 = {kappa2:.6g}")


# ---------------------------------------------------------------------------
# loop
# ---------------------------------------------------------------------------

def build_dwell_loop(r=0.2, a=0.8, M=1024):
    """``C(theta) = -3/4 + r exp(2 pi i g(theta))`` with dwell density ``1 - a cos(2 pi phi)``.

    The density peaks at ``phi = 1/2``, where the loop sits closest to the centre
    -1 of the period-2 limb. ``M`` control samples are used to confirm that the
    Newton inversion of ``g`` reached 1e-12.
    """
    loop = ParametricLoop(PARABOLIC, r, a)
    theta = uniform_grid(M)
    phi = loop.lift(theta)
    err = np.max(np.abs(phi - a / TWO_PI * np.sin(TWO_PI * phi) - theta))
    if err > 1e-12:
        raise RuntimeError(f"dwell reparametrization failed to invert: residual {err:.3g}")
    return loop


def dwell_density(phi, a):
    return 1.0 - a * np.cos(TWO_PI * np.asarray(phi, dtype=float))


def kappa2_closed_form(r, a):
    """Exact ``(1/2) int log|4(C(theta)+1)| dtheta`` over the dwell loop, namely ``-a r``."""
    if not 0.0 < r < 0.25 or not 0.0 <= a < 1.0:
        raise ValueError("need 0 < r < 1/4 and 0 <= a < 1")
    return -a * r


def cycle_term(loop, n=DEFAULT_QUAD_N):
    """Quadrature of ``(1/2) log|4(C(theta)+1)|``, the 2-cycle part of the multiplicator."""
    return quadrature(lambda th: 0.5 * np.log(np.abs(4.0 * (loop(th) + 1.0))), n)


# ---------------------------------------------------------------------------
# correction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrectionMap:
    """Fiberwise affine maps ``b_theta(w) = slope(theta) w + offset(theta)``."""

    slope: SampledLoop
    offset: SampledLoop
    alpha: float

    def __call__(self, theta, w):
        return self.slope(theta) * w + self.offset(theta)


def correction(curve: TwoCurve, alpha, n=None):
    """Affine maps sending the fiber of ``curve`` over theta to the fiber over theta+alpha.

    Point labels follow the continuation along the cover, so the result is
    continuous on the circle and unchanged if the two labels are exchanged.
    """
    n = curve.n if n is None else n
    theta = uniform_grid(n)
    z1 = curve(theta)
    z2 = curve(theta + 1.0)
    z1a = curve(theta + alpha)
    z2a = curve(theta + alpha + 1.0)
    gap = np.abs(z1 - z2)
    if gap.min() <= DEGENERATE_TOL:
        i = int(gap.argmin())
        raise ValueError(f"degenerate fiber at theta={theta[i]:.6f}: |z1 - z2| = {gap[i]:.3g}")
    slope = 1.0 + ((z1a - z1) - (z2a - z2)) / (z1 - z2)
    offset = z1a - slope * z1
    return CorrectionMap(SampledLoop(slope), SampledLoop(offset), wrap(alpha))


def corrected_map(loop: ParameterLoop, corr: CorrectionMap, alpha=None):
    """``(theta, z) -> (theta + alpha, b_theta(z^2 + C(theta)))`` as a :class:`FibredMap`."""
    alpha = corr.alpha if alpha is None else alpha
    n = corr.slope.n
    m = corr.slope.values
    c = np.asarray(loop.samples(n), dtype=complex)
    return FibredMap(
        alpha,
        corr.slope,
        SampledLoop.constant(0.0),
        SampledLoop(m * c + corr.offset.values),
    )


def two_curve_residual(fmap, curve: TwoCurve, tau=1, t=None):
    """``max |P_theta(z(t)) - z(t + alpha + tau)|`` over ``t`` (default: the curve grid)."""
    if t is None:
        t, z = curve.grid, curve.samples
    else:
        t = np.asarray(t, dtype=float)
        z = curve(t)
    image = fmap.fiber(project(t), z)
    target = curve(cover_wrap(t + fmap.alpha + tau))
    return float(np.max(np.abs(image - target)))


def shift_of(fmap, curve: TwoCurve):
    """The ``tau`` in Z/2 for which ``curve`` is invariant (the smaller residual)."""
    res = [two_curve_residual(fmap, curve, tau) for tau in (0, 1)]
    return int(np.argmin(res)), res


# ---------------------------------------------------------------------------
# invariant curves and unfolding
# ---------------------------------------------------------------------------

class InvariantCurve:
    """Closed curve T^1 -> C stored as uniform samples.

    ``func`` (optional) gives exact values off the grid; otherwise the
    trigonometric interpolant of ``samples`` is used.
    """

    def __init__(self, samples, func=None):
        self.samples = np.atleast_1d(np.asarray(samples, dtype=complex))
        self.samples.setflags(write=False)
        self.func = func
        self._coeffs = None

    @property
    def n(self):
        return self.samples.size

    @property
    def coeffs(self):
        if self._coeffs is None:
            self._coeffs = trig_coefficients(self.samples)
        return self._coeffs

    def __call__(self, theta):
        theta = wrap(theta)
        if self.func is not None:
            return self.func(theta)
        if self.n == 1:
            return np.full(np.shape(theta), self.samples[0]) if np.ndim(theta) else complex(self.samples[0])
        return trig_eval(self.coeffs, theta)

    def sampled(self):
        """Copy that evaluates through the trigonometric interpolant only."""
        return InvariantCurve(self.samples)

    @classmethod
    def constant(cls, z):
        return cls([complex(z)])


def curve_residual(fmap, curve: InvariantCurve, n=None):
    """``max |P_theta(g(theta)) - g(theta + alpha)|`` on a uniform grid."""
    n = curve.n if n is None else n
    theta = uniform_grid(n)
    z = curve.samples if n == curve.n else curve(theta)
    return float(np.max(np.abs(fmap.fiber(theta, z) - curve(theta + fmap.alpha))))


def _doubled(loop):
    if isinstance(loop, SampledLoop):
        return loop.doubled()
    return _ComposedLoop(loop)


class _ComposedLoop(ParameterLoop):
    def __init__(self, loop):
        self.loop = loop

    def __call__(self, t):
        return self.loop(wrap(2.0 * np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class UnfoldedSystem:
    map: FibredMap
    gamma1: InvariantCurve
    gamma2: InvariantCurve
    tau: int
    parent: FibredMap
    curve: TwoCurve


def unfold(fmap: FibredMap, curve: TwoCurve, tau=1, tol=UNFOLD_TOL):
    """2-unfolding ``(t, z) -> (t + (alpha + tau)/2, P_{2t}(z))`` and its two invariant curves."""
    tau = int(tau) % 2
    res = two_curve_residual(fmap, curve, tau)
    if res > tol:
        raise InvarianceError(f"2-curve not invariant with tau={tau}: residual {res:.3g}")
    rotation = wrap((fmap.alpha + tau) / 2.0)
    umap = FibredMap(rotation, _doubled(fmap.coeffA), _doubled(fmap.coeffB), _doubled(fmap.coeffC))
    n = curve.n
    gamma1 = InvariantCurve(curve.samples, func=lambda t: curve(2.0 * wrap(t)))
    gamma2 = InvariantCurve(np.roll(curve.samples, -(n // 2)),
                            func=lambda t: curve(2.0 * wrap(t) + 1.0))
    for g in (gamma1, gamma2):
        r = curve_residual(umap, g)
        if r > tol:
            raise InvarianceError(f"unfolded curve not invariant: residual {r:.3g}")
    return UnfoldedSystem(umap, gamma1, gamma2, tau, fmap, curve)


# ---------------------------------------------------------------------------
# multiplicators
# ---------------------------------------------------------------------------

def _log_abs(x):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(x))


def multiplicator(fmap: FibredMap, curve, n=DEFAULT_QUAD_N):
    """``kappa = int log|d/dz P_theta(g(theta))| dtheta``; negative means attracting."""
    return quadrature(lambda th: _log_abs(fmap.derivative(th, curve(th))), n)


def multiplicator2(fmap: FibredMap, curve: TwoCurve, n=DEFAULT_QUAD_N):
    """``kappa_2 = (1/2) int log|P'(z_1) P'(z_2)| dtheta`` of an invariant 2-curve."""
    def integrand(th):
        d1 = fmap.derivative(th, curve(th))
        d2 = fmap.derivative(th, curve(th + 1.0))
        return 0.5 * _log_abs(d1 * d2)
    return quadrature(integrand, n)


def multiplicator2_decomposition(loop, corr: CorrectionMap, n=DEFAULT_QUAD_N):
    """Cross-check of :func:`multiplicator2` for corrected maps:
    ``int log|slope| + (1/2) int log|4(C+1)|``."""
    slope_term = quadrature(lambda th: _log_abs(corr.slope(th)), n)
    return slope_term + cycle_term(loop, n), slope_term
