"""End-to-end acceptance checks at the default parameters.

Each test prints one ``PASS``/``FAIL`` line (visible even without ``-s``).
"""

import numpy as np
import pytest

from fibred.analysis import basin_scan, empirical_rates, settle_steps
from fibred.construction import (
    build_dwell_loop,
    curve_residual,
    cycle_term,
    multiplicator,
    two_curve_residual,
)
from fibred.core import FibredMap
from fibred.normalization import conjugacy_residual, normalize
from fibred.twocurve import period2_points, track_two_curve

R, A = 0.2, 0.8


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, detail
    return emit


def test_period2_algebra(verdict):
    rng = np.random.default_rng(2024)
    c = 2.0 * np.sqrt(rng.random(10_000)) * np.exp(2j * np.pi * rng.random(10_000))
    z1, z2 = period2_points(c)
    q = lambda z: z * z + c  # noqa: E731
    e_fix = max(np.abs(q(q(z1)) - z1).max(), np.abs(q(q(z2)) - z2).max())
    e_swap = np.abs(q(z1) - z2).max()
    e_mult = np.abs(4 * z1 * z2 - 4 * (c + 1)).max()
    verdict("1 period-2 algebra", e_fix < 1e-9 and e_swap < 1e-10 and e_mult < 1e-10,
            f"q2 {e_fix:.2e}, swap {e_swap:.2e}, multiplier {e_mult:.2e}")


def test_monodromy(verdict, example):
    curve = track_two_curve(build_dwell_loop(R, A), 2048)
    z0 = curve.samples[0]
    opposite = abs(curve.samples[1024] - (-1.0 - z0))
    closure = curve.closure_error
    verdict("2 monodromy", opposite < 1e-9 and closure < 1e-9 and abs(curve.samples[1024] - z0) > 0.5,
            f"z(1) vs partner root {opposite:.2e}, z(2) vs z(0) {closure:.2e}")


def test_multiplicator_closed_form(verdict):
    worst = 0.0
    for r in np.linspace(0.05, 0.2, 5):
        for a in np.linspace(0.0, 0.9, 5):
            worst = max(worst, abs(cycle_term(build_dwell_loop(r, a), 4096) + a * r))
    uniform = abs(cycle_term(build_dwell_loop(R, 0.0), 4096))
    verdict("3 multiplicator closed form", worst < 1e-6 and uniform < 1e-9,
            f"max |measured + a r| {worst:.2e}, a=0 value {uniform:.2e}")


def test_correction_and_invariance(verdict, example):
    t = np.arange(2048) * (2.0 / 2048)
    res1 = two_curve_residual(example.corrected, example.curve, tau=1, t=t)
    res0 = two_curve_residual(example.corrected, example.curve, tau=0, t=t)
    verdict("4 correction and invariance", res1 < 1e-9 and res0 > 0.1,
            f"residual tau=1 {res1:.2e}, tau=0 {res0:.2e}")


def test_unfolding_identities(verdict, example):
    u = example.unfolded
    rot_ok = u.map.alpha == (example.alpha + 1) / 2
    g1, g2 = u.gamma1, u.gamma2
    t = np.arange(2048) / 2048
    shift_exact = bool(np.all(g2(t) == g1(t + 0.5)))
    gap = np.abs(g1.samples - g2.samples).min()
    k1, k2 = multiplicator(u.map, g1), multiplicator(u.map, g2)
    dk = max(abs(k1 - example.kappa2), abs(k2 - example.kappa2))
    ok = rot_ok and shift_exact and abs(gap - 2 * np.sqrt(R)) < 1e-9 and dk < 1e-6
    verdict("5 unfolding identities", ok,
            f"rotation {u.map.alpha!r}, shift exact {shift_exact}, gap {gap:.12f}, "
            f"kappa1 {k1:.9f}, kappa2 {k2:.9f}")


def test_two_attracting_curves(verdict, example):
    u = example.unfolded
    theta = np.random.default_rng(99).random(32)
    lines, ok = [], True
    for name, g in (("gamma1", u.gamma1), ("gamma2", u.gamma2)):
        kappa = multiplicator(u.map, g)
        gs = g.sampled()
        settle = settle_steps(u.map, gs, theta, 1e-3, 1e-6, 100_000)
        rates = empirical_rates(u.map, gs, theta, 1e-3, 10_000)
        rel = np.max(np.abs(np.exp(rates) / np.exp(kappa) - 1))
        ok &= kappa < 0 and bool(np.all(settle > 0)) and rel < 0.1
        lines.append(f"{name} kappa {kappa:.6f} (margin {-kappa:.3g}), settle <= {settle.max()}, "
                     f"rate error {rel:.1e}")
    verdict("6 two attracting curves", ok, "; ".join(lines))


def test_normalization(verdict, example):
    nd = example.norm
    rng = np.random.default_rng(5)
    theta = rng.random(1000)
    z = 2 * np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    res = conjugacy_residual(nd.source, nd.u1, nd.u2, nd.ctilde, theta, z)
    u = example.unfolded
    dk = max(abs(multiplicator(u.map, g) - multiplicator(nd.map, h))
             for g, h in zip((u.gamma1, u.gamma2), example.curves))
    inv = max(curve_residual(nd.map, h) for h in example.curves)
    b0, c0 = 0.3 - 0.2j, -0.1 + 0.4j
    const = normalize(FibredMap(0.1, 1.0, b0, c0))
    analytic = abs(const.ctilde.values[0] - (c0 + b0 / 2 - b0**2 / 4))
    ok = res < 1e-7 and nd.coefficient_residual < 1e-9 and dk < 1e-6 and analytic < 1e-12 and inv < 1e-7
    verdict("7 normalization", ok,
            f"conjugacy {res:.2e}, coefficients {nd.coefficient_residual:.2e}, "
            f"kappa change {dk:.2e}, constant case {analytic:.2e}")


def test_basin_structure(verdict, example):
    fmap, curves = example.normalized_map, list(example.curves)
    first = basin_scan(fmap, curves, G=2048)
    again = basin_scan(fmap, curves, G=2048)
    split = basin_scan(fmap, curves, G=2048, workers=2)

    def key(s):
        return [(c.kind, c.curve, c.step, c.distance) for c in s.labels]

    same = key(first) == key(again) == key(split)
    ok = first.omega_nonempty and first.complement_witness and same
    verdict("8 basin structure", ok,
            f"counts {dict(sorted(first.counts.items()))}, label changes {len(first.witnesses)}, "
            f"undecided {len(first.undecided)}, reproducible {same}")
