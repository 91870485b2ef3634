"""Escape-rate evaluator: base heights, potentials, functional equations."""

import numpy as np
import pytest

from ratpot import catalog, escape
from ratpot.maps import RationalMap
from ratpot.rng import rng_stream


def test_base_heights_match_oracle(evaluators, oracle):
    for name, want in oracle["base_heights"].items():
        assert evaluators[name].g01 == pytest.approx(want, abs=1e-10), name


def test_circle_case_potential_spot_values(evaluators, oracle):
    ev = evaluators["1/z^2"]
    want = oracle["potential_circle_cases"]
    assert escape.potential(ev, 3.0) == pytest.approx(
        want["inv_z2_at_3"], abs=1e-9)
    assert escape.potential(ev, 2.0j) == pytest.approx(
        want["inv_z2_at_2i"], abs=1e-9)
    assert escape.potential(ev, 0.5) == pytest.approx(
        want["inv_z2_at_half"], abs=1e-9)


def test_z2_potential_is_log_plus(evaluators):
    ev = evaluators["z^2"]
    xs = np.linspace(-2.0, 2.0, 41)
    Z = xs[None, :] + 1j * xs[:, None]
    got = ev.potential(Z)
    want = np.maximum(0.0, np.log(np.maximum(np.abs(Z), 1e-300)))
    assert np.max(np.abs(got - want)) < 1e-9


def test_potential_grows_like_log_at_infinity(evaluators):
    # p(z) - log|z| -> 0 along |z| -> inf for every suite map
    radii = np.array([1e3, 1e5, 1e7])
    for name, ev in evaluators.items():
        z = radii * np.exp(0.37j)
        gap = ev.potential(z) - np.log(radii)
        assert abs(gap[-1]) < 1e-6, name
        assert np.all(np.abs(np.diff(np.abs(gap))) < np.abs(gap[:-1]) + 1e-12)


def test_functional_equation_residuals_basilica(evaluators):
    res = escape.functional_equation_residuals(evaluators["z^2-1"],
                                               samples=100, seed=0)
    for key, val in res.items():
        assert val < 1e-9, (key, val)


def test_functional_equation_residuals_counterexample(evaluators):
    res = escape.functional_equation_residuals(evaluators["(z^3+0.1)/z"],
                                               samples=100, seed=0)
    for key, val in res.items():
        assert val < 1e-8, (key, val)


def test_pullback_identity_exact_iterate(evaluators):
    # for 1/z^2 the second iterate is the lift of z^4; the pullback
    # relation at n = 2 holds to rounding at any sane point
    ev = evaluators["1/z^2"]
    assert escape.pullback_residual(ev, 2, 2.0) < 1e-10


def test_pullback_residual_random_points(evaluators, suite_maps):
    s = rng_stream(7, 99)
    for name, ev in evaluators.items():
        f = suite_maps[name]
        z = 2.0 * (s.uniform(64) - 0.5) + 2.0j * (s.uniform(64) - 0.5)
        den = np.polyval(np.asarray(f.denominator.coeffs)[::-1], z)
        z = z[np.abs(den) > 1e-3][:32]
        for n in (1, 2):
            assert escape.pullback_residual(ev, n, z) < 1e-8, (name, n)


def test_evaluator_is_deterministic(evaluators):
    ev = evaluators["(z^3+0.1)/z"]
    z = np.array([0.3 + 0.4j, 2.0, -1.0 + 0.1j])
    a = ev.potential(z)
    b = ev.potential(z)
    assert np.array_equal(a, b)


def test_scaled_lift_shifts_base_height(evaluators, suite_maps):
    # G^{cF}(0,1) = G^F(0,1) + log|c|/(d-1), exercised through a fresh
    # evaluator over the doubled lift
    for name in ("1/z^2", "2/(z-1)^3+1"):
        f = suite_maps[name]
        ev = evaluators[name]
        ev2 = escape.EscapeRateEvaluator(f.lift.scaled(2.0), tol=ev.tol,
                                         max_depth=ev.max_depth)
        shift = np.log(2.0) / (f.degree - 1)
        assert ev2.g01 == pytest.approx(ev.g01 + shift, abs=1e-10), name


def test_depth_override_is_respected():
    f = catalog.get_map("z^2-1")
    ev = escape.evaluator_for(f, depth=8)
    ev2 = escape.evaluator_for(f, depth=40)
    # both converge here; deeper evaluation must not move the answer much
    assert abs(ev.potential(3.0) - ev2.potential(3.0)) < 1e-6
