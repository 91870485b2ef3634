"""Normalization constant, level-set tracing, and the claim statistics."""

import numpy as np
import pytest

from ratpot import catalog, equilibrium, escape, harmonic, lemniscates
from ratpot.errors import DegenerateLemniscate
from ratpot.lemniscates import NormalizedLemniscate
from ratpot.maps import RationalMap


@pytest.fixture(scope="module")
def circle_setup(evaluators, witnesses_10k):
    f = catalog.get_map("1/z^2")
    ev = evaluators["1/z^2"]
    mu = witnesses_10k["1/z^2"]
    energy = float(equilibrium.energy(f, mu, ev))
    return f, ev, mu, energy


def test_circle_normalization_constant_is_one(circle_setup, oracle):
    f, ev, mu, energy = circle_setup
    c = lemniscates.normalization_constant(f, ev, energy)
    assert abs(c - oracle["normalization_c_inv_z2"]) < 1e-6


def test_circle_claims_vanish(circle_setup):
    f, ev, mu, energy = circle_setup
    c = lemniscates.normalization_constant(f, ev, energy)
    L = lemniscates.make_lemniscate(f, ev, energy, n=1, c=c)
    trace = lemniscates.trace_level_set(L, (-1.6, -1.6, 1.6, 1.6), 256, 256)
    checks = lemniscates.claim_checks(f, L, mu, trace=trace)
    for key, val in checks.items():
        assert val < 1e-6, (key, val)


def test_special_family_claims_small(evaluators, witnesses_10k):
    f = catalog.get_map("2/(z-1)^3+1")
    ev = evaluators["2/(z-1)^3+1"]
    mu = witnesses_10k["2/(z-1)^3+1"]
    energy = float(equilibrium.energy(f, mu, ev))
    L = lemniscates.make_lemniscate(f, ev, energy, n=1)
    bbox = harmonic.default_bbox(mu)
    trace = lemniscates.trace_level_set(L, bbox, 256, 256)
    checks = lemniscates.claim_checks(f, L, mu, trace=trace)
    assert checks["julia_containment"] < 0.02
    for key, val in checks.items():
        assert val < 5e-3, (key, val)


def test_counterexample_julia_escapes_the_lemniscate(evaluators, witnesses_10k):
    f = catalog.get_map("(z^3+0.1)/z")
    ev = evaluators["(z^3+0.1)/z"]
    mu = witnesses_10k["(z^3+0.1)/z"]
    energy = float(equilibrium.energy(f, mu, ev))
    L = lemniscates.make_lemniscate(f, ev, energy, n=1)
    checks = lemniscates.claim_checks(f, L, mu,
                                      trace=lemniscates.trace_level_set(
                                          L, harmonic.default_bbox(mu),
                                          256, 256))
    assert checks["julia_containment"] > 0.05
    # the doubling relation is a potential identity and holds regardless
    assert checks["doubling"] < 1e-8


def test_composition_identity_residual_all_nonpoly(suite_maps, evaluators,
                                                   witnesses_10k):
    for name in ("1/z^2", "1/z^3", "2/(z-1)^3+1", "(z^3+0.1)/z"):
        f = suite_maps[name]
        ev = evaluators[name]
        energy = float(equilibrium.energy(f, witnesses_10k[name], ev))
        c = lemniscates.normalization_constant(f, ev, energy)
        res = lemniscates.composition_identity_residual(f, c, samples=100,
                                                        seed=0)
        assert res < 1e-10, name


def test_polynomial_is_degenerate(evaluators):
    f = catalog.get_map("z^2")
    with pytest.raises(DegenerateLemniscate):
        lemniscates.make_lemniscate(f, evaluators["z^2"], 0.0)


def test_two_oval_synthetic_trace(evaluators):
    # |2 (z^2 - 1)| = 1 is a pair of closed ovals around +1 and -1; feed
    # the tracer a hand-built level set over the denominator of 1/(z^2-1)
    f = RationalMap([1], [-1, 0, 1])
    ev = escape.evaluator_for(f)
    L = NormalizedLemniscate(c=2.0, n=1, denom_poly=None, f=f, ev=ev,
                             energy=0.0)
    trace = lemniscates.trace_level_set(L, (-2.0, -1.2, 2.0, 1.2), 256, 256)
    assert len(trace) == 2
    for poly in trace.polylines:
        assert abs(poly[0] - poly[-1]) < 1e-9  # closed
        assert np.max(np.abs(L.value(poly) - 1.0)) < 2.0 * trace.trace_tol
    # one oval around each square root pair; |z^2-1| = 1/2 centers its
    # ovals at (sqrt(3/2) + sqrt(1/2))/2 ~ 0.966, by symmetry of the arcs
    centers = sorted(float(np.mean(p).real) for p in trace.polylines)
    oval = 0.5 * (np.sqrt(1.5) + np.sqrt(0.5))
    assert centers[0] == pytest.approx(-oval, abs=0.02)
    assert centers[1] == pytest.approx(oval, abs=0.02)


def test_trace_determinism(circle_setup):
    f, ev, mu, energy = circle_setup
    L = lemniscates.make_lemniscate(f, ev, energy, n=1)
    t1 = lemniscates.trace_level_set(L, (-1.6, -1.6, 1.6, 1.6), 128, 128)
    t2 = lemniscates.trace_level_set(L, (-1.6, -1.6, 1.6, 1.6), 128, 128)
    assert len(t1) == len(t2)
    assert np.array_equal(t1.vertices(), t2.vertices())


def test_equality_family_order_two_form_is_flat(circle_setup):
    # f^2 = z^4 for 1/z^2, so the composed denominator form is constant
    # and the normalized order-2 value is 1 everywhere: the level "set"
    # is the whole plane and the tracer rightly finds no curve
    f, ev, mu, energy = circle_setup
    L2 = lemniscates.make_lemniscate(f, ev, energy, n=2)
    z = np.array([0.2 + 0.1j, 1.5, -0.7j, 3.0 - 2.0j])
    assert np.max(np.abs(L2.value(z) - 1.0)) < 1e-9
    from ratpot.errors import EmptyLevelSet
    with pytest.raises(EmptyLevelSet):
        lemniscates.trace_level_set(L2, (-1.6, -1.6, 1.6, 1.6), 128, 128)


def test_counterexample_order_two_is_a_real_curve(evaluators, witnesses_10k):
    # f^2 is not a polynomial for (z^3+0.1)/z, so the order-2 level set
    # exists; both evaluation routes (expanded composed coefficients vs
    # step-accumulated logs) must agree on its vertices
    f = catalog.get_map("(z^3+0.1)/z")
    ev = evaluators["(z^3+0.1)/z"]
    mu = witnesses_10k["(z^3+0.1)/z"]
    energy = float(equilibrium.energy(f, mu, ev))
    L2 = lemniscates.make_lemniscate(f, ev, energy, n=2)
    bbox = harmonic.default_bbox(mu)
    trace = lemniscates.trace_level_set(L2, bbox, 192, 192)
    verts = trace.vertices()
    assert verts.size > 100
    assert np.max(np.abs(L2.value(verts) - 1.0)) < 1e-6
    stepped = NormalizedLemniscate(c=L2.c, n=2, denom_poly=None, f=f, ev=ev,
                                   energy=energy)
    assert np.max(np.abs(stepped.value(verts) - L2.value(verts))) < 1e-9
