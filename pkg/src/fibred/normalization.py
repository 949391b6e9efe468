"""
Reduction of a fibred quadratic polynomial to the monic centred form ``z^2 + C(theta)``.

The fiberwise change of coordinates ``W(theta, z) = u1(theta) z + u2(theta)``
must satisfy

    u1(theta + alpha) = u1(theta)^2 / A(theta),    u2 = B u1 / (2 A).

Writing ``u1 = exp(l)`` turns the first equation into the cohomological equation
``l(theta + alpha) = 2 l(theta) - log A(theta)``, whose solution is the
geometric series ``l = sum_k 2^-(k+1) log A(theta + k alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .construction import InvariantCurve, curve_residual
from .core import (
    FibredMap,
    ParameterLoop,
    SampledLoop,
    trig_shift,
    uniform_grid,
    winding_number,
    wrap,
)

DEFAULT_TOL = 1e-12
DEFAULT_TERMS = 60
DEFAULT_GRID = 4096


class WindingError(ValueError):
    """``A`` winds around 0, so no continuous logarithm exists on the circle."""

    def __init__(self, winding):
        self.winding = winding
        super().__init__(f"coefficient A has winding number {winding} around 0")


def _grid_size(*loops):
    if all(isinstance(lp, SampledLoop) and lp.n == 1 for lp in loops):
        return 1
    sizes = [lp.n for lp in loops if isinstance(lp, SampledLoop) and lp.n > 1]
    return max(sizes) if sizes else DEFAULT_GRID


def continuous_log(values):
    """Logarithm of closed-loop samples, continued from the principal branch at index 0."""
    values = np.asarray(values, dtype=complex)
    if np.any(values == 0):
        i = int(np.flatnonzero(values == 0)[0])
        raise ValueError(f"coefficient vanishes at grid point {i}")
    w = winding_number(values)
    if w != 0:
        raise WindingError(w)
    arg = np.unwrap(np.angle(values))
    return np.log(np.abs(values)) + 1j * arg


def series_terms(sup_log, tol):
    if sup_log <= 0:
        return 1
    return max(1, math.ceil(math.log2(sup_log / tol)))


def solve_u1(A, alpha, tol=DEFAULT_TOL, n=None, terms=None):
    """Solve ``u1(theta + alpha) = u1(theta)^2 / A(theta)`` for a nowhere-zero loop ``A``.

    The truncation ``K`` of the dyadic series is the smallest with
    ``2^-K sup|log A| < tol`` unless ``terms`` is given.
    Returns a :class:`SampledLoop` with ``terms`` recorded on it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = _grid_size(A) if n is None else n
    a_vals = A.samples(n) if isinstance(A, ParameterLoop) else np.full(n, complex(A))
    logA = continuous_log(a_vals)
    K = series_terms(float(np.max(np.abs(logA))), tol) if terms is None else int(terms)
    ell = np.zeros(n, dtype=complex)
    # smallest terms first
    for k in reversed(range(K)):
        ell += 2.0 ** -(k + 1) * trig_shift(logA, wrap(k * alpha))
    u1 = SampledLoop(np.exp(ell))
    u1.terms = K
    return u1


@dataclass(frozen=True)
class NormalizationData:
    """Fiberwise affine change ``W = (u1, u2)`` and the normalized parameter ``ctilde``."""

    u1: SampledLoop
    u2: SampledLoop
    ctilde: SampledLoop
    terms: int
    residual: float
    functional_residual: float
    coefficient_residual: float
    source: FibredMap

    @property
    def alpha(self):
        return self.source.alpha

    @property
    def map(self):
        return FibredMap.standard(self.ctilde, self.source.alpha)

    def W(self, theta, z):
        return self.u1(theta) * z + self.u2(theta)

    def W_inv(self, theta, w):
        return (w - self.u2(theta)) / self.u1(theta)


def conjugacy_residual(fmap, u1, u2, ctilde, theta, z):
    """``max |W_{theta+alpha}(P_theta(W_theta^-1(z))) - (z^2 + ctilde(theta))|``."""
    th1 = wrap(theta + fmap.alpha)
    pre = (z - u2(theta)) / u1(theta)
    lhs = u1(th1) * fmap.fiber(theta, pre) + u2(th1)
    return float(np.max(np.abs(lhs - (z * z + ctilde(theta)))))


def normalize(fmap: FibredMap, tol=DEFAULT_TOL, n=None, terms=None, n_test=1000, seed=0):
    """Conjugate ``fmap`` to ``z^2 + ctilde(theta)`` by a fiberwise affine change.

    The conjugacy residual is measured on ``n_test`` random states with
    ``|z| <= 2``; grid residuals of the functional equation and of the
    normalized coefficients are recorded as well.
    """
    alpha = fmap.alpha
    n = _grid_size(fmap.coeffA, fmap.coeffB, fmap.coeffC) if n is None else n
    A = fmap.coeffA.samples(n)
    B = fmap.coeffB.samples(n)
    C = fmap.coeffC.samples(n)
    u1 = solve_u1(fmap.coeffA, alpha, tol, n=n, terms=terms)
    v1 = u1.values
    v2 = B * v1 / (2.0 * A)
    v1a = trig_shift(v1, alpha)
    v2a = trig_shift(v2, alpha)
    ctilde = v1a * (A * v2**2 / v1**2 - B * v2 / v1 + C) + v2a

    functional = float(np.max(np.abs(v1a * A / v1**2 - 1.0)))
    quad = v1a * A / v1**2
    lin = v1a * (-2.0 * A * v2 / v1**2 + B / v1)
    coeff_res = float(max(np.max(np.abs(quad - 1.0)), np.max(np.abs(lin))))

    u2 = SampledLoop(v2)
    ct = SampledLoop(ctilde)
    rng = np.random.default_rng(seed)
    theta = rng.random(n_test)
    z = 2.0 * np.sqrt(rng.random(n_test)) * np.exp(2j * np.pi * rng.random(n_test))
    resid = conjugacy_residual(fmap, u1, u2, ct, theta, z)
    return NormalizationData(u1, u2, ct, u1.terms, resid, functional, coeff_res, fmap)


def conjugate_curve(data: NormalizationData, curve: InvariantCurve):
    """Transport an invariant curve through ``W``; the result is sample-based."""
    n = max(curve.n, data.u1.n)
    theta = uniform_grid(n)
    z = curve.samples if n == curve.n else curve(theta)
    return InvariantCurve(data.u1.samples(n) * z + data.u2.samples(n))


def transport_check(data: NormalizationData, curve: InvariantCurve):
    """Invariance residual of the transported curve under the normalized map."""
    image = conjugate_curve(data, curve)
    return image, curve_residual(data.map, image)
