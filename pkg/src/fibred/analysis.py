"""
Fate of the critical circle and measured contraction along invariant curves.

Orbits started on a set of base angles are advanced together. Periodic
functions (coefficient loops, curves) are evaluated along the rotating angles
from their trigonometric coefficients: each sample keeps a row of phases that
is multiplied by ``exp(2 pi i k alpha)`` per step, so the work for one sample
never depends on which other samples share its batch.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .construction import InvariantCurve
from .core import TWO_PI, FibredMap, SampledLoop, uniform_grid, wrap

log = logging.getLogger(__name__)

ATTRACTED, ESCAPED, UNDECIDED = "attracted", "escaped", "undecided"

DEFAULT_EPS = 1e-6
DEFAULT_WINDOW = 50
DEFAULT_BUDGET = 100_000
DEFAULT_G = 2048
COLLAPSE = 1e-12
_REANCHOR = 256
_MODE_CUT = 1e-14


@dataclass(frozen=True)
class Classification:
    kind: str
    curve: int | None = None
    step: int | None = None
    distance: float | None = None

    @property
    def label(self):
        """Compact label: ``"g1"``, ``"g2"``, ... , ``"esc"`` or ``"und"``."""
        if self.kind == ATTRACTED:
            return f"g{self.curve + 1}"
        return "esc" if self.kind == ESCAPED else "und"


# ---------------------------------------------------------------------------
# evaluation along rotating angles
# ---------------------------------------------------------------------------

class _Tracker:
    """Values of a periodic function at ``theta0 + k alpha`` for a batch of orbits."""

    def __init__(self, f, theta0, alpha):
        self.alpha = alpha
        self.step_count = 0
        self.theta0 = np.asarray(theta0, dtype=float)
        self.const = None
        self.fn = None
        coeffs = None
        if isinstance(f, SampledLoop):
            if f.n == 1:
                self.const = complex(f.values[0])
            else:
                coeffs = f.coeffs
        elif isinstance(f, InvariantCurve) and f.func is None:
            if f.n == 1:
                self.const = complex(f.samples[0])
            else:
                coeffs = f.coeffs
        elif np.isscalar(f):
            self.const = complex(f)
        else:
            self.fn = f
        if coeffs is not None:
            n = coeffs.size
            k = np.fft.fftfreq(n, d=1.0 / n)
            c = coeffs.copy()
            if n % 2 == 0:
                # split the Nyquist mode so the interpolant matches trig_eval
                h = n // 2
                k = np.append(k, h)
                c = np.append(c, 0.5 * c[h])
                c[h] *= 0.5
            keep = np.abs(c) > _MODE_CUT * np.abs(c).max()
            self.k = k[keep]
            self.c = c[keep]
            self.rot = np.exp(1j * TWO_PI * self.k * alpha)
            self._anchor()

    def _thetas(self):
        return wrap(self.theta0 + self.step_count * self.alpha)

    def _anchor(self):
        self.E = self.c[None, :] * np.exp(1j * TWO_PI * np.outer(self._thetas(), self.k))

    def values(self):
        if self.const is not None:
            return np.full(self.theta0.shape, self.const)
        if self.fn is not None:
            return np.asarray(self.fn(self._thetas()), dtype=complex)
        return self.E.sum(axis=1)

    def advance(self):
        self.step_count += 1
        if self.const is None and self.fn is None:
            if self.step_count % _REANCHOR == 0:
                self._anchor()
            else:
                self.E *= self.rot

    def select(self, mask):
        self.theta0 = self.theta0[mask]
        if self.const is None and self.fn is None:
            self.E = self.E[mask]


# ---------------------------------------------------------------------------
# escape radius and distances
# ---------------------------------------------------------------------------

def _sup_abs(loop, n=4096):
    return float(np.max(np.abs(loop.samples(n))))


def _inf_abs(loop, n=4096):
    return float(np.min(np.abs(loop.samples(n))))


def escape_radius(fmap: FibredMap, start=2.0):
    """Smallest ``R`` in a doubling search with ``inf|A| R^2 - sup|B| R - sup|C| >= 2 R``.

    Beyond such an ``R`` every fiber map at least doubles ``|z|``.
    """
    a = _inf_abs(fmap.coeffA)
    b = _sup_abs(fmap.coeffB)
    c = _sup_abs(fmap.coeffC)
    if a <= 0:
        raise ValueError("quadratic coefficient vanishes")
    R = start
    while a * R * R - b * R - c < 2.0 * R:
        R *= 2.0
    return R


def distance_to_curve(curve, theta, z):
    """Fiberwise distance ``|z - curve(theta)|``."""
    return np.abs(np.asarray(z) - curve(theta))


def min_curve_gap(curves, n=4096):
    theta = uniform_grid(n)
    vals = [np.asarray(c(theta)) for c in curves]
    gap = np.inf
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            gap = min(gap, float(np.min(np.abs(vals[i] - vals[j]))))
    return gap


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def classify_batch(fmap, theta0, z0, curves, budget=DEFAULT_BUDGET, eps_conv=DEFAULT_EPS,
                   R_escape=None, window=DEFAULT_WINDOW):
    """Classify the orbits of ``(theta0[i], z0[i])``.

    Returns ``(kind, curve, step, distance)`` arrays; ``kind`` holds 0 for
    attracted, 1 for escaped and 2 for undecided. ``step`` is the first step of
    the confirming window (attracted) or the escape step.
    """
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    z = np.broadcast_to(np.asarray(z0, dtype=complex), theta0.shape).astype(complex)
    if window < 1:
        raise ValueError("window must be >= 1")
    R = escape_radius(fmap) if R_escape is None else R_escape
    m, nc = theta0.size, len(curves)
    kind = np.full(m, 2, dtype=np.int8)
    which = np.full(m, -1, dtype=np.int64)
    step = np.full(m, -1, dtype=np.int64)
    dist = np.full(m, np.nan)
    if budget < window or m == 0:
        return kind, which, step, dist

    alpha = fmap.alpha
    trk = [_Tracker(f, theta0, alpha) for f in (fmap.coeffA, fmap.coeffB, fmap.coeffC)]
    ctrk = [_Tracker(c, theta0, alpha) for c in curves]
    idx = np.arange(m)
    run = np.zeros((m, nc), dtype=np.int64)

    for k in range(budget + 1):
        esc = np.abs(z) > R
        gam = [t.values() for t in ctrk]
        d = np.stack([np.abs(z - g) for g in gam], axis=1) if nc else np.zeros((z.size, 0))
        run = np.where(d < eps_conv, run + 1, 0)
        hit = run >= window
        done = esc | hit.any(axis=1)
        if done.any():
            for j in np.flatnonzero(done):
                i = idx[j]
                if esc[j]:
                    kind[i], step[i], dist[i] = 1, k, np.nan
                    continue
                cand = np.flatnonzero(hit[j])
                if cand.size > 1:
                    log.warning("orbit %d meets the criterion for curves %s", i, cand.tolist())
                c = cand[np.argmin(d[j, cand])]
                kind[i], which[i], step[i], dist[i] = 0, c, k - window + 1, d[j, c]
            keep = ~done
            idx, z, run = idx[keep], z[keep], run[keep]
            for t in trk + ctrk:
                t.select(keep)
            if idx.size == 0:
                break
        if k == budget:
            break
        A, B, C = (t.values() for t in trk)
        z = (A * z + B) * z + C
        for t in trk + ctrk:
            t.advance()
    return kind, which, step, dist


def _to_classifications(kind, which, step, dist):
    out = []
    for kd, w, s, d in zip(kind, which, step, dist):
        if kd == 0:
            out.append(Classification(ATTRACTED, int(w), int(s), float(d)))
        elif kd == 1:
            out.append(Classification(ESCAPED, None, int(s)))
        else:
            out.append(Classification(UNDECIDED))
    return out


def classify_critical(fmap, theta, curves, budget=DEFAULT_BUDGET, eps_conv=DEFAULT_EPS,
                      R_escape=None, window=DEFAULT_WINDOW):
    """Fate of the critical point of the fiber over ``theta``."""
    if budget == 0:
        return Classification(UNDECIDED)
    z0 = fmap.critical_point(theta)
    res = classify_batch(fmap, [theta], [z0], curves, budget, eps_conv, R_escape, window)
    return _to_classifications(*res)[0]


@dataclass
class BasinScan:
    grid: np.ndarray
    labels: list
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    undecided: list = field(default_factory=list)
    steps: dict = field(default_factory=dict)
    omega_nonempty: bool = False
    complement_witness: bool = False

    @property
    def codes(self):
        return [c.label for c in self.labels]


def _scan_chunk(args):
    fmap, theta, curves, budget, eps, R, window = args
    z0 = np.asarray(fmap.critical_point(theta), dtype=complex)
    return classify_batch(fmap, theta, z0, curves, budget, eps, R, window)


def basin_scan(fmap, curves, G=DEFAULT_G, budget=DEFAULT_BUDGET, eps_conv=DEFAULT_EPS,
               R_escape=None, window=DEFAULT_WINDOW, workers=1):
    """Classify the critical point over ``G`` uniform base angles.

    The summary records label counts, the indices ``i`` where the label of
    ``i`` differs from that of ``i + 1`` (cyclically) and the undecided samples.
    """
    if G < 8:
        raise ValueError("G must be >= 8")
    if len(curves) > 1:
        gap = min_curve_gap(curves)
        if eps_conv >= gap / 2:
            raise ValueError(f"eps_conv={eps_conv} not below half the curve gap {gap:.3g}")
    R = escape_radius(fmap) if R_escape is None else R_escape
    theta = uniform_grid(G)
    if workers > 1:
        chunks = np.array_split(np.arange(G), workers)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_scan_chunk, [
                (fmap, theta[c], curves, budget, eps_conv, R, window) for c in chunks
            ]))
        res = [np.concatenate([p[i] for p in parts]) for i in range(4)]
    else:
        res = _scan_chunk((fmap, theta, curves, budget, eps_conv, R, window))
    labels = _to_classifications(*res)
    codes = [c.label for c in labels]
    counts = {}
    for c in codes:
        counts[c] = counts.get(c, 0) + 1
    witnesses = [i for i in range(G) if codes[i] != codes[(i + 1) % G]]
    undecided = [i for i, c in enumerate(codes) if c == "und"]
    steps = {}
    for lab in labels:
        if lab.kind == ATTRACTED:
            steps.setdefault(lab.label, []).append(lab.step)
    steps = {k: {"min": int(min(v)), "max": int(max(v)), "mean": float(np.mean(v))}
             for k, v in steps.items()}
    omega = all(counts.get(f"g{i + 1}", 0) >= 1 for i in range(len(curves)))
    return BasinScan(theta, labels, counts, witnesses, undecided, steps,
                     omega_nonempty=omega,
                     complement_witness=bool(witnesses or undecided))


def fiber_slice(fmap, theta, curves, center=0j, extent=2.0, px=128, budget=2000,
                eps_conv=DEFAULT_EPS, R_escape=None, window=DEFAULT_WINDOW):
    """Classification codes on a ``px x px`` grid of starting points in the fiber over ``theta``.

    Row 0 is the top (largest imaginary part). Codes: curve index, -1 escaped, -2 undecided.
    """
    xs = center.real + np.linspace(-extent, extent, px)
    ys = center.imag + np.linspace(extent, -extent, px)
    Z = xs[None, :] + 1j * ys[:, None]
    kind, which, _, _ = classify_batch(fmap, np.full(Z.size, float(theta)), Z.ravel(), curves,
                                       budget, eps_conv, R_escape, window)
    codes = np.where(kind == 0, which, np.where(kind == 1, -1, -2))
    return codes.reshape(px, px)


# ---------------------------------------------------------------------------
# measured contraction
# ---------------------------------------------------------------------------

def empirical_rates(fmap, curve, theta0, delta=1e-3, n=10_000, renormalize=True,
                    escape=None):
    """Per-step logarithmic contraction of perturbations ``curve(theta0) + delta``.

    With ``renormalize`` the displacement is rescaled back to ``delta`` whenever
    it shrinks below ``delta * 1e-6`` and the log factors are accumulated, so all
    ``n`` steps enter the average. Otherwise the average stops at the first step
    where the distance falls below 1e-12.
    """
    if delta <= COLLAPSE:
        raise ValueError(f"delta must exceed the collapse floor {COLLAPSE}")
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    R = escape_radius(fmap) if escape is None else escape
    trk = [_Tracker(f, theta0, fmap.alpha) for f in (fmap.coeffA, fmap.coeffB, fmap.coeffC)]
    ctrk = _Tracker(curve, theta0, fmap.alpha)
    g = ctrk.values()
    z = g + delta
    acc = np.zeros(theta0.size)
    used = np.zeros(theta0.size, dtype=np.int64)
    live = np.ones(theta0.size, dtype=bool)
    last = np.full(theta0.size, float(delta))
    floor = delta * 1e-6
    for _ in range(n):
        A, B, C = (t.values() for t in trk)
        z = (A * z + B) * z + C
        for t in trk:
            t.advance()
        ctrk.advance()
        g = ctrk.values()
        if np.any(live & (np.abs(z) > R)):
            raise RuntimeError("perturbed orbit escaped; try a smaller delta")
        d = np.abs(z - g)
        if renormalize:
            # an exact hit (superattracting curve) ends the average for that orbit
            live &= d > 0
            small = live & (d < floor)
            if small.any():
                acc[small] += np.log(d[small] / delta)
                z[small] = g[small] + (z[small] - g[small]) * (delta / d[small])
                d = np.where(small, delta, d)
        collapsed = live & (d < COLLAPSE)
        live &= ~collapsed
        last = np.where(live, d, last)
        used += live
        if not live.any():
            break
    with np.errstate(divide="ignore"):
        rate = (acc + np.log(last / delta)) / used
    return np.where(used > 0, rate, -np.inf)


def empirical_rate(fmap, curve, theta0=0.0, delta=1e-3, n=10_000, renormalize=True):
    """Scalar version of :func:`empirical_rates`; approximates the multiplicator."""
    return float(empirical_rates(fmap, curve, [theta0], delta, n, renormalize)[0])


def settle_steps(fmap, curve, theta0, delta=1e-3, target=1e-6, budget=DEFAULT_BUDGET):
    """Steps until ``|z - curve|`` first drops below ``target``; -1 if never within budget."""
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    trk = [_Tracker(f, theta0, fmap.alpha) for f in (fmap.coeffA, fmap.coeffB, fmap.coeffC)]
    ctrk = _Tracker(curve, theta0, fmap.alpha)
    z = ctrk.values() + delta
    out = np.full(theta0.size, -1, dtype=np.int64)
    for k in range(1, budget + 1):
        A, B, C = (t.values() for t in trk)
        z = (A * z + B) * z + C
        for t in trk:
            t.advance()
        ctrk.advance()
        d = np.abs(z - ctrk.values())
        newly = (out < 0) & (d < target)
        out[newly] = k
        if np.all(out >= 0):
            break
    return out
