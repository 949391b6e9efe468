import numpy as np
import pytest

from fibred.analysis import empirical_rates, settle_steps
from fibred.construction import (
    InvariantCurve,
    InvarianceError,
    build_dwell_loop,
    correction,
    corrected_map,
    curve_residual,
    cycle_term,
    dwell_density,
    kappa2_closed_form,
    multiplicator,
    multiplicator2,
    multiplicator2_decomposition,
    shift_of,
    two_curve_residual,
    unfold,
)
from fibred.core import DEFAULT_ALPHA, FibredMap, QuadratureError, SampledLoop, quadrature, uniform_grid
from fibred.twocurve import TwoCurve, track_two_curve

ALPHA = DEFAULT_ALPHA


def test_dwell_loop_uniform_when_unweighted():
    loop = build_dwell_loop(0.2, 0.0)
    th = uniform_grid(64)
    np.testing.assert_allclose(loop.lift(th), th, atol=0)


def test_dwell_density_values():
    assert dwell_density(0.5, 0.8) == pytest.approx(1.8)
    assert dwell_density(0.0, 0.8) == pytest.approx(0.2)


def test_dwell_pushforward_histogram():
    loop = build_dwell_loop(0.2, 0.8)
    phi = loop.lift(uniform_grid(400_000)) % 1.0
    hist, edges = np.histogram(phi, bins=40, range=(0, 1), density=True)
    mids = 0.5 * (edges[1:] + edges[:-1])
    # bin-averaged density of 1 - a cos(2 pi phi)
    h = edges[1] - edges[0]
    exact = 1 - 0.8 * (np.sin(2 * np.pi * edges[1:]) - np.sin(2 * np.pi * edges[:-1])) / (2 * np.pi * h)
    np.testing.assert_allclose(hist, exact, atol=2e-3)
    assert hist[np.argmin(abs(mids - 0.5))] > 1.7
    assert hist[0] < 0.3


@pytest.mark.parametrize("r, a", [(0.2, 0.8), (0.1, 0.3)])
def test_dwell_loop_on_circle(r, a):
    loop = build_dwell_loop(r, a)
    np.testing.assert_allclose(np.abs(loop(uniform_grid(100)) + 0.75), r, atol=1e-15)


def test_dwell_loop_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_dwell_loop(0.3, 0.5)
    with pytest.raises(ValueError):
        build_dwell_loop(0.1, 1.0)


def test_kappa2_closed_form_against_quadrature():
    loop = build_dwell_loop(0.2, 0.8)
    oracle = quadrature(lambda th: 0.5 * np.log(np.abs(4 * (loop(th) + 1))), 8192)
    assert kappa2_closed_form(0.2, 0.8) == pytest.approx(-0.16)
    assert abs(oracle - kappa2_closed_form(0.2, 0.8)) < 1e-6


def test_uniform_loop_gives_zero():
    assert kappa2_closed_form(0.2, 0.0) == 0.0
    assert abs(cycle_term(build_dwell_loop(0.2, 0.0), 8192)) < 1e-12


def test_small_radius_limit():
    assert kappa2_closed_form(1e-9, 0.9) == pytest.approx(0.0, abs=1e-8)


@pytest.fixture(scope="module")
def default_curve():
    loop = build_dwell_loop(0.2, 0.8)
    return loop, track_two_curve(loop, 2048)


def test_correction_identity_at_zero_rotation(default_curve):
    _, curve = default_curve
    corr = correction(curve, 0.0, n=256)
    np.testing.assert_allclose(corr.slope.values, 1.0, atol=1e-15)
    np.testing.assert_allclose(corr.offset.values, 0.0, atol=1e-15)


def test_correction_label_swap(default_curve):
    loop, curve = default_curve
    swapped = track_two_curve(loop, 2048, basepoint=1)
    a, b = correction(curve, ALPHA, n=512), correction(swapped, ALPHA, n=512)
    np.testing.assert_allclose(a.slope.values, b.slope.values, atol=1e-14)
    np.testing.assert_allclose(a.offset.values, b.offset.values, atol=1e-14)


def test_correction_moves_cycle_points(default_curve):
    _, curve = default_curve
    corr = correction(curve, ALPHA)
    th = uniform_grid(2048)
    for shift in (0.0, 1.0):
        np.testing.assert_allclose(corr(th, curve(th + shift)), curve(th + ALPHA + shift), atol=1e-9)
    off = np.random.default_rng(2).random(200)
    np.testing.assert_allclose(corr(off, curve(off)), curve(off + ALPHA), atol=1e-9)
    # on the circle loop the fiber gap is constant, so the slope is unimodular
    np.testing.assert_allclose(np.abs(corr.slope.values), 1.0, atol=1e-12)


def test_correction_rejects_degenerate_fiber():
    with pytest.raises(ValueError, match="degenerate"):
        correction(TwoCurve(np.full(32, 0.5 + 0j)), 0.1)


def test_corrected_map_without_rotation(default_curve):
    loop, curve = default_curve
    pmap = corrected_map(loop, correction(curve, 0.0, n=512), 0.0)
    th = np.random.default_rng(5).random(50)
    z = np.random.default_rng(6).normal(size=50) + 0.5j
    np.testing.assert_allclose(pmap.fiber(th, z), z * z + loop(th), atol=1e-12)


def test_corrected_map_invariance_and_tau(default_curve):
    loop, curve = default_curve
    pmap = corrected_map(loop, correction(curve, ALPHA), ALPHA)
    assert two_curve_residual(pmap, curve, tau=1) < 1e-9
    off = np.random.default_rng(4).random(500) * 2
    assert two_curve_residual(pmap, curve, tau=1, t=off) < 1e-9
    tau, res = shift_of(pmap, curve)
    assert tau == 1 and res[0] > 0.5
    th = np.linspace(0, 1, 9, endpoint=False)
    np.testing.assert_allclose(pmap.fiber(th, curve(th)), curve(th + 1 + ALPHA), atol=1e-9)


def test_slope_shrinks_with_rotation(default_curve):
    _, curve = default_curve
    sup = [np.abs(correction(curve, al, n=512).slope.values - 1).max() for al in (0.1, 0.05, 0.025)]
    assert sup[0] > sup[1] > sup[2]


@pytest.fixture(scope="module")
def unfolded(default_curve):
    loop, curve = default_curve
    corr = correction(curve, ALPHA)
    pmap = corrected_map(loop, corr, ALPHA)
    return loop, curve, corr, pmap, unfold(pmap, curve, 1)


def test_unfold_rotation_and_shift(unfolded):
    *_, u = unfolded
    assert u.map.alpha == (ALPHA + 1) / 2
    assert u.map.alpha == pytest.approx(0.5309016994, abs=1e-10)
    n = u.gamma1.n
    np.testing.assert_array_equal(u.gamma2.samples, np.roll(u.gamma1.samples, -n // 2))
    t = np.random.default_rng(8).random(100)
    np.testing.assert_allclose(u.gamma2(t), u.gamma1(t + 0.5), atol=1e-13)


def test_unfold_gap_and_invariance(unfolded):
    *_, u = unfolded
    assert abs(np.abs(u.gamma1.samples - u.gamma2.samples).min() - 2 * np.sqrt(0.2)) < 1e-9
    assert curve_residual(u.map, u.gamma1) < 1e-8
    assert curve_residual(u.map, u.gamma2, n=3000) < 1e-8


def test_unfold_rejects_wrong_shift(unfolded):
    _, curve, _, pmap, _ = unfolded
    with pytest.raises(InvarianceError):
        unfold(pmap, curve, tau=0)


def test_unfolded_multiplicators_equal_kappa2(unfolded):
    loop, curve, corr, pmap, u = unfolded
    k2 = multiplicator2(pmap, curve)
    k1, kk2 = multiplicator(u.map, u.gamma1), multiplicator(u.map, u.gamma2)
    assert abs(k1 - kk2) < 1e-8
    assert abs(k1 - k2) < 1e-6
    decomp, slope_term = multiplicator2_decomposition(loop, corr)
    assert abs(decomp - k2) < 1e-10
    assert k2 < 0
    assert abs(k2 - (-0.16)) <= abs(slope_term) + 1e-9


def test_multiplicator_fixed_point_curve():
    beta = (1 - np.sqrt(1 - 0.8)) / 2
    assert beta == pytest.approx(0.2763932, abs=1e-7)
    fmap = FibredMap.standard(0.2, ALPHA)
    kappa = multiplicator(fmap, InvariantCurve.constant(beta))
    assert kappa == pytest.approx(np.log(2 * beta), abs=1e-14)
    assert kappa == pytest.approx(-0.5927836, abs=1e-7)


def test_multiplicator_guards_superattracting_curve():
    n = 64
    curve = TwoCurve(np.r_[np.zeros(n // 2), -np.ones(n // 2)], loop=SampledLoop.constant(-1.0))
    with pytest.raises(QuadratureError):
        multiplicator2(FibredMap.standard(-1.0, 0.0), curve, 64)


def test_multiplicator2_without_rotation():
    for a, expected in ((0.8, -0.16), (0.0, 0.0)):
        loop = build_dwell_loop(0.2, a)
        curve = track_two_curve(loop, 2048)
        pmap = corrected_map(loop, correction(curve, 0.0), 0.0)
        assert abs(multiplicator2(pmap, curve) - expected) < 1e-9


@pytest.mark.parametrize("r", np.linspace(0.05, 0.2, 5))
def test_multiplicator2_grid_matches_closed_form(r):
    for a in np.linspace(0.0, 0.9, 5):
        loop = build_dwell_loop(r, a)
        curve = track_two_curve(loop, 2048)
        pmap = corrected_map(loop, correction(curve, 0.0, n=1024), 0.0)
        assert abs(multiplicator2(pmap, curve) - kappa2_closed_form(r, a)) < 1e-6


def test_perturbations_return_at_the_multiplicator_rate(unfolded):
    *_, u = unfolded
    g = u.gamma1.sampled()
    theta = np.random.default_rng(9).random(8)
    assert np.all(settle_steps(u.map, g, theta, 1e-3, 1e-6, 10_000) > 0)
    kappa = multiplicator(u.map, u.gamma1)
    rates = empirical_rates(u.map, g, theta, 1e-3, 10_000)
    np.testing.assert_allclose(np.exp(rates), np.exp(kappa), rtol=0.1)
