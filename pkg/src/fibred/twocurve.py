"""
Period-2 cycles of ``z^2 + c`` and 2-curves obtained by continuing them around a loop.

A 2-curve is stored as samples ``z(t_k)`` on the double cover, ``t_k = 2k/N``;
the two points over ``theta`` are ``z(theta)`` and ``z(theta + 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ParameterLoop,
    cover_wrap,
    project,
    trig_coefficients,
    trig_eval,
    uniform_grid,
    winding_number,
)

PARABOLIC = -0.75
BRANCH_TOL = 1e-6
DEFAULT_CURVE_N = 2048


class MonodromyError(ValueError):
    """Continuation around the loop did not transpose the two period-2 points."""

    def __init__(self, message, parity):
        self.parity = parity
        super().__init__(f"{message} (winding parity around -3/4: {parity})")


class BranchPointError(ValueError):
    """The loop comes too close to the parabolic parameter -3/4."""


@dataclass(frozen=True)
class CyclePair:
    z1: complex
    z2: complex

    def __iter__(self):
        yield self.z1
        yield self.z2


def _sqrt_disc(c):
    return np.sqrt(-0.75 - np.asarray(c, dtype=complex))


def period2_points(c):
    """The two roots of ``z^2 + z + c + 1`` (principal square-root branch)."""
    s = _sqrt_disc(c)
    if np.ndim(s):
        return -0.5 + s, -0.5 - s
    return CyclePair(complex(-0.5 + s), complex(-0.5 - s))


def cycle_derivative_product(c):
    """Multiplier ``q_c'(z1) q_c'(z2) = 4 z1 z2 = 4(c + 1)`` of the period-2 cycle."""
    return 4.0 * (np.asarray(c, dtype=complex) + 1.0) if np.ndim(c) else 4.0 * (complex(c) + 1.0)


class TwoCurve:
    """Branch-tracked 2-curve ``t -> z(t)`` over ``t`` in ``[0, 2)``.

    ``samples`` holds ``z(2k/N)``. When ``loop`` is attached, off-grid values are
    snapped onto the exact period-2 root selected by the interpolant; without it
    (e.g. a curve read back from disk) the trigonometric interpolant is used as is.
    """

    def __init__(self, samples, loop=None):
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 2 or samples.size % 2:
            raise ValueError("a 2-curve needs an even number of samples on [0, 2)")
        self.samples = samples
        self.samples.setflags(write=False)
        self.loop = loop
        self._coeffs = trig_coefficients(samples)

    @property
    def n(self):
        return self.samples.size

    @property
    def grid(self):
        return uniform_grid(self.n, 2.0)

    def interpolate(self, t):
        # period 2 in t == period 1 in t/2
        return trig_eval(self._coeffs, np.asarray(t, dtype=float) / 2.0)

    def __call__(self, t):
        t = cover_wrap(t)
        guess = self.interpolate(t)
        if self.loop is None:
            return guess
        s = _sqrt_disc(self.loop(project(t)))
        a, b = -0.5 + s, -0.5 - s
        return np.where(np.abs(a - guess) <= np.abs(b - guess), a, b) if np.ndim(t) \
            else complex(a if abs(a - guess) <= abs(b - guess) else b)

    def partner(self, t):
        """The other point in the same fiber, ``z(t + 1)``."""
        return self(cover_wrap(np.asarray(t, dtype=float) + 1.0))

    def fiber_points(self, theta):
        """Ordered fiber ``(z_{1,theta}, z_{2,theta})`` for ``theta`` in ``[0, 1)``."""
        theta = project(theta)
        return self(theta), self.partner(theta)


def track_two_curve(loop: ParameterLoop, n=DEFAULT_CURVE_N, basepoint=0, tol=BRANCH_TOL):
    """Continue ``-1/2 + sqrt(-3/4 - C(t mod 1))`` along ``t`` in ``[0, 2)``.

    At each grid step the root nearest to the previous value is chosen. The
    basepoint ``z(0)`` uses the square root with positive imaginary part (ties:
    positive real part); ``basepoint=1`` starts from the other root instead.

    Raises
    ------
    BranchPointError
        if the loop passes within ``tol`` of -3/4.
    MonodromyError
        if one turn of the loop does not swap the two roots.
    """
    if n < 16 or n % 2:
        raise ValueError("n must be an even count >= 16")
    t = uniform_grid(n, 2.0)
    theta = project(t[: n // 2])
    c = np.asarray(loop(theta), dtype=complex)
    dist = np.abs(c - PARABOLIC)
    if dist.min() <= tol:
        i = int(dist.argmin())
        raise BranchPointError(
            f"loop within {dist[i]:.3g} of -3/4 at theta={theta[i]:.6f} (tol {tol})"
        )
    s_half = _sqrt_disc(c)
    s_all = np.concatenate([s_half, s_half])

    s0 = s_all[0]
    if s0.imag < 0 or (s0.imag == 0 and s0.real < 0):
        s0 = -s0
    if basepoint:
        s0 = -s0

    out = np.empty(n + 1, dtype=complex)
    out[0] = -0.5 + s0
    prev = s0
    for k in range(1, n + 1):
        s = s_all[k % n]
        s = s if abs(s - prev) <= abs(s + prev) else -s
        out[k] = -0.5 + s
        prev = s

    parity = winding_number(-0.75 - c) % 2
    gap = 2.0 * abs(s_all[0])
    if abs(out[n // 2] - out[0]) < 0.5 * gap:
        raise MonodromyError("z(1) returned to z(0): no transposition", parity)
    if abs(out[n] - out[0]) > 0.5 * gap:
        raise MonodromyError("z(2) does not close up on z(0)", parity)
    curve = TwoCurve(out[:n], loop=loop)
    curve.closure_error = abs(out[n] - out[0])
    curve.transposition_error = abs(out[n // 2] - (-1.0 - out[0]))
    return curve


def fiber_distance(curve, t):
    """``|z(t) - z(t+1)|``, the separation of the two points over ``t mod 1``."""
    return np.abs(curve(t) - curve.partner(t))
