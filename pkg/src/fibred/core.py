"""
Circle arithmetic, parameter loops, fibred quadratic maps and periodic quadrature.

Angles on the base circle are plain floats (or float arrays) in [0, 1); points of
the double cover live in [0, 2). Loops T^1 -> C are objects with a vectorized
``__call__(theta)``; the two concrete kinds are :class:`ParametricLoop` (exact
closed form) and :class:`SampledLoop` (uniform samples + trigonometric
interpolation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGLE_TOL = 1e-12
DEFAULT_ALPHA = 0.0618033988749895
DEFAULT_QUAD_N = 4096
TWO_PI = 2.0 * np.pi


class QuadratureError(ValueError):
    """A non-finite integrand sample was met on the quadrature grid."""

    def __init__(self, index, theta, value):
        self.index = int(index)
        self.theta = float(theta)
        self.value = value
        super().__init__(
            f"non-finite integrand {value!r} at grid point {self.index} "
            f"(theta={self.theta:.17g})"
        )


# ---------------------------------------------------------------------------
# circle arithmetic
# ---------------------------------------------------------------------------

def wrap(x, period=1.0):
    """Reduce ``x`` into ``[0, period)`` using floor; safe against round-up to ``period``."""
    x = np.asarray(x, dtype=float)
    r = x - period * np.floor(x / period)
    r = np.where(r >= period, 0.0, r)
    return r if r.ndim else float(r)


def cover_wrap(t):
    """Reduce a double-cover parameter into ``[0, 2)``."""
    return wrap(t, 2.0)


def project(t):
    """Projection of the double cover onto the base circle."""
    return wrap(t, 1.0)


def circle_distance(a, b):
    """Circle metric on T^1, values in [0, 1/2]."""
    d = np.abs(wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    d = np.minimum(d, 1.0 - d)
    return d if np.ndim(d) else float(d)


def uniform_grid(n, period=1.0):
    return period * np.arange(n) / n


# ---------------------------------------------------------------------------
# trigonometric interpolation
# ---------------------------------------------------------------------------

def trig_coefficients(samples):
    """Discrete Fourier coefficients ``c_k`` with ``f(j/N) = sum_k c_k e^{2 pi i k j / N}``."""
    samples = np.asarray(samples, dtype=complex)
    return np.fft.fft(samples) / samples.size


def _modes(n):
    return np.fft.fftfreq(n, d=1.0 / n)


def trig_eval(coeffs, theta, chunk=2048):
    """Evaluate the trigonometric interpolant with period 1 at arbitrary ``theta``.

    The Nyquist mode of an even-length grid is split symmetrically (a cosine), so
    the interpolant of real data stays real and passes through every sample.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    n = coeffs.size
    theta = np.asarray(theta, dtype=float)
    flat = theta.ravel()
    if n == 1:
        return np.full(theta.shape, coeffs[0]) if theta.ndim else complex(coeffs[0])
    grid = _grid_shift(flat)
    if grid is not None:
        shift, M = grid
        return _grid_eval(coeffs, M, shift)[:flat.size].reshape(theta.shape)
    k = _modes(n)
    c = coeffs.copy()
    nyq = None
    if n % 2 == 0:
        nyq = c[n // 2]
        c[n // 2] = 0.0
    out = np.empty(flat.size, dtype=complex)
    for s in range(0, flat.size, chunk):
        th = wrap(flat[s:s + chunk])
        phase = np.exp(1j * TWO_PI * np.outer(th, k))
        out[s:s + chunk] = phase @ c
        if nyq is not None:
            out[s:s + chunk] += nyq * np.cos(np.pi * n * th)
    out = out.reshape(theta.shape)
    return out if theta.ndim else complex(out)


def _grid_shift(theta):
    """``(s, M)`` if ``theta`` is the progression ``s + j/M`` (mod 1) for an integer ``M``."""
    m = theta.size
    if m < 8:
        return None
    s = theta[0]
    h = (theta[1] - s) % 1.0
    if h <= 0:
        return None
    M = int(round(1.0 / h))
    if M < m or M > 8 * m or abs(M * h - 1.0) > 1e-9:
        return None
    d = theta - s - np.arange(m) / M
    d -= np.rint(d)
    if np.max(np.abs(d)) < 1e-13:
        return float(s), M
    return None


def _grid_eval(coeffs, m, shift):
    # fold the (phase-shifted) modes onto an m-point grid and invert with one FFT
    n = coeffs.size
    k = _modes(n).astype(int)
    c = coeffs.copy()
    if n % 2 == 0:
        h = n // 2
        k = np.append(k, h)
        c = np.append(c, 0.5 * c[h])
        c[h] *= 0.5
    c = c * np.exp(1j * TWO_PI * k * shift)
    bins = np.zeros(m, dtype=complex)
    np.add.at(bins, k % m, c)
    return np.fft.ifft(bins) * m


def trig_shift(samples, shift):
    """Samples of the trigonometric interpolant on the grid shifted by ``shift``."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.size
    if n == 1:
        return samples.copy()
    k = _modes(n)
    mult = np.exp(1j * TWO_PI * k * shift)
    if n % 2 == 0:
        mult[n // 2] = np.cos(np.pi * n * shift)
    return np.fft.ifft(np.fft.fft(samples) * mult)


def trig_resample(samples, m):
    """Values of the trigonometric interpolant on a uniform grid of ``m`` points."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.size
    if m == n:
        return samples.copy()
    if n == 1:
        return np.full(m, samples[0])
    if m % n == 0:
        # exact zero-padding; the Nyquist mode is split in two halves
        c = np.fft.fft(samples) / n
        big = np.zeros(m, dtype=complex)
        h = n // 2
        if n % 2 == 0:
            big[:h] = c[:h]
            big[m - h + 1:] = c[h + 1:]
            big[h] = 0.5 * c[h]
            big[m - h] = 0.5 * c[h]
        else:
            big[:h + 1] = c[:h + 1]
            big[m - h:] = c[h + 1:]
        return np.fft.ifft(big) * m
    return trig_eval(trig_coefficients(samples), uniform_grid(m))


# ---------------------------------------------------------------------------
# parameter loops
# ---------------------------------------------------------------------------

def dwell_lift(theta, weight, tol=1e-12, maxiter=100):
    """Lift ``g`` of the dwell reparametrization: solves ``phi - (a/2pi) sin(2 pi phi) = theta``.

    The pushforward of Lebesgue measure under ``g`` has density
    ``1 - a cos(2 pi phi)``, so ``g`` lingers near ``phi = 1/2``. The result is the
    degree-one lift, i.e. ``g(theta + 1) = g(theta) + 1``.
    """
    theta = np.asarray(theta, dtype=float)
    if weight == 0.0:
        return theta.copy() if theta.ndim else float(theta)
    a = float(weight)
    half = a / TWO_PI
    lo = theta - half
    hi = theta + half
    phi = theta.copy()
    for _ in range(maxiter):
        f = phi - half * np.sin(TWO_PI * phi) - theta
        lo = np.where(f < 0, phi, lo)
        hi = np.where(f > 0, phi, hi)
        df = 1.0 - a * np.cos(TWO_PI * phi)
        step = f / df
        new = phi - step
        outside = (new < lo) | (new > hi)
        new = np.where(outside, 0.5 * (lo + hi), new)
        done = np.all(np.abs(new - phi) < tol)
        phi = new
        if done:
            break
    return phi if phi.ndim else float(phi)


class ParameterLoop:
    """A closed loop T^1 -> C."""

    def __call__(self, theta):
        raise NotImplementedError

    def samples(self, n):
        """Values on the uniform grid ``k/n``."""
        return np.asarray(self(uniform_grid(n)), dtype=complex)

    def shifted_samples(self, n, shift):
        """Values on the grid ``k/n + shift``."""
        return np.asarray(self(wrap(uniform_grid(n) + shift)), dtype=complex)


class ParametricLoop(ParameterLoop):
    """``C(theta) = center + r exp(2 pi i g(theta))`` with ``g`` a degree-one circle map.

    By default ``g`` is the dwell reparametrization with weight ``a``; pass
    ``reparam`` (a lift R -> R with ``g(x+1) = g(x)+1``) to override it.
    """

    def __init__(self, center, radius, weight=0.0, reparam=None):
        if not 0.0 < radius < 0.25:
            raise ValueError(f"radius must satisfy 0 < r < 1/4, got {radius}")
        if not 0.0 <= weight < 1.0:
            raise ValueError(f"weight must satisfy 0 <= a < 1, got {weight}")
        self.center = complex(center)
        self.radius = float(radius)
        self.weight = float(weight)
        self._reparam = reparam

    def lift(self, x):
        if self._reparam is not None:
            return self._reparam(x)
        return dwell_lift(x, self.weight)

    def __call__(self, theta):
        return self.center + self.radius * np.exp(1j * TWO_PI * self.lift(theta))

    def __repr__(self):
        return (f"ParametricLoop(center={self.center!r}, radius={self.radius!r}, "
                f"weight={self.weight!r})")


class SampledLoop(ParameterLoop):
    """Loop given by ``N`` samples at ``k/N``, evaluated by trigonometric interpolation."""

    def __init__(self, values):
        values = np.atleast_1d(np.asarray(values, dtype=complex))
        if values.ndim != 1 or values.size == 0:
            raise ValueError("SampledLoop needs a non-empty 1-D array of samples")
        self.values = values
        self.values.setflags(write=False)
        self._coeffs = None

    @classmethod
    def constant(cls, c):
        return cls([complex(c)])

    @property
    def n(self):
        return self.values.size

    @property
    def coeffs(self):
        if self._coeffs is None:
            self._coeffs = trig_coefficients(self.values)
        return self._coeffs

    @property
    def is_constant(self):
        return self.n == 1

    def __call__(self, theta):
        if self.n == 1:
            theta = np.asarray(theta, dtype=float)
            return np.full(theta.shape, self.values[0]) if theta.ndim else complex(self.values[0])
        return trig_eval(self.coeffs, theta)

    def samples(self, n):
        return trig_resample(self.values, n)

    def shifted_samples(self, n, shift):
        if n == self.n:
            return trig_shift(self.values, shift)
        if self.n == 1:
            return np.full(n, self.values[0])
        if n % self.n == 0:
            return trig_shift(trig_resample(self.values, n), shift)
        return super().shifted_samples(n, shift)

    def doubled(self):
        """The loop ``t -> self(2t)``, exactly, at twice the resolution."""
        if self.n == 1:
            return self
        return SampledLoop(np.concatenate([self.values, self.values]))

    def __repr__(self):
        return f"SampledLoop(n={self.n})"


def as_loop(obj):
    """Coerce constants to :class:`SampledLoop`; pass loops and callables through."""
    if isinstance(obj, ParameterLoop):
        return obj
    if np.isscalar(obj):
        return SampledLoop.constant(obj)
    if callable(obj):
        return _CallableLoop(obj)
    return SampledLoop(obj)


class _CallableLoop(ParameterLoop):
    def __init__(self, fn):
        self.fn = fn

    def __call__(self, theta):
        return np.asarray(self.fn(theta), dtype=complex) if np.ndim(theta) else complex(self.fn(theta))


def winding_number(values):
    """Winding number around 0 of the closed polygon through ``values``."""
    values = np.asarray(values, dtype=complex)
    if np.any(values == 0):
        raise ValueError("loop passes through the origin")
    closed = np.append(values, values[0])
    dphi = np.angle(closed[1:] / closed[:-1])
    return int(np.rint(dphi.sum() / TWO_PI))


# ---------------------------------------------------------------------------
# fibred quadratic maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FibredMap:
    """``(theta, z) -> (theta + alpha, A(theta) z^2 + B(theta) z + C(theta))``."""

    alpha: float
    coeffA: ParameterLoop
    coeffB: ParameterLoop
    coeffC: ParameterLoop

    def __post_init__(self):
        object.__setattr__(self, "alpha", wrap(float(self.alpha)))
        for name in ("coeffA", "coeffB", "coeffC"):
            object.__setattr__(self, name, as_loop(getattr(self, name)))

    @classmethod
    def standard(cls, C, alpha=DEFAULT_ALPHA):
        """The family ``z^2 + C(theta)``."""
        return cls(alpha, SampledLoop.constant(1.0), SampledLoop.constant(0.0), C)

    def coefficients(self, theta):
        return self.coeffA(theta), self.coeffB(theta), self.coeffC(theta)

    def fiber(self, theta, z):
        A, B, C = self.coefficients(theta)
        return (A * z + B) * z + C

    def derivative(self, theta, z):
        A, B, _ = self.coefficients(theta)
        return 2.0 * A * z + B

    def critical_point(self, theta):
        A, B, _ = self.coefficients(theta)
        return -B / (2.0 * A)

    def __call__(self, theta, z):
        return wrap(np.asarray(theta) + self.alpha), self.fiber(theta, z)


def eval_fiber(fmap, theta, z):
    return fmap.fiber(theta, z)


def fiber_derivative(fmap, theta, z):
    return fmap.derivative(theta, z)


@dataclass(frozen=True)
class Orbit:
    """States ``(theta_k, z_k)``; ``escaped_at`` is the index of the first escaped state."""

    thetas: np.ndarray
    zs: np.ndarray
    escaped_at: int | None = None

    def __len__(self):
        return self.zs.size

    @property
    def escaped(self):
        return self.escaped_at is not None


def iterate(fmap, theta0, z0, n, escape_radius=np.inf):
    """Forward orbit of ``(theta0, z0)`` for ``n`` steps, cut at the first escaped state."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if escape_radius <= 0:
        raise ValueError("escape_radius must be positive")
    thetas = [wrap(float(theta0))]
    zs = [complex(z0)]
    escaped_at = 0 if abs(zs[0]) > escape_radius else None
    k = 0
    while escaped_at is None and k < n:
        th, z = fmap(thetas[-1], zs[-1])
        thetas.append(float(th))
        zs.append(complex(z))
        k += 1
        if abs(zs[-1]) > escape_radius:
            escaped_at = k
    return Orbit(np.array(thetas), np.array(zs, dtype=complex), escaped_at)


def quadrature(f, n=DEFAULT_QUAD_N):
    """Uniform-grid rule for the integral over T^1 of a periodic real function ``f``.

    Exact for trigonometric polynomials of degree < n; spectrally accurate for
    analytic integrands.
    """
    if n < 2:
        raise ValueError("quadrature needs at least 2 points")
    theta = uniform_grid(n)
    vals = np.asarray(f(theta), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise QuadratureError(i, theta[i], vals[i])
    return float(np.mean(vals))
