"""Replay of the frozen anchor values in tests/data/oracle_values.json.

Each number in that file was computed by scripts/gen_oracle_values.py
through an independent route (closed forms, convolution composition,
numpy root finders, a pure-Python scalar recursion).  These tests pin the
library to those anchors, so a regression in any numerical kernel shows
up as a drift against an externally derived value rather than against
the library's own output.
"""

import numpy as np
import pytest

from ratpot import catalog, equilibrium, escape, lemniscates, maps

CEX = "(z^3+0.1)/z"
SPECIAL_CUBIC = "2/(z-1)^3+1"


def pairs(entry):
    return np.array([complex(re, im) for re, im in entry])


def sorted_roots(vals):
    vals = np.asarray(vals, dtype=np.complex128)
    order = np.lexsort((np.round(vals.imag, 9), np.round(vals.real, 9)))
    return vals[order]


def test_self_composition_numerator(oracle):
    f = catalog.get_map("z^2-1")
    F2 = maps.compose_lift(f.lift, f.lift)
    num = F2.f1 / F2.f1[-1]  # monic, as the oracle stores it
    assert np.allclose(num, pairs(oracle["compose_num_z2m1_self"]),
                       atol=1e-12)
    assert np.allclose(maps.polys.trim(F2.f0), [1.0], atol=1e-12)


def test_fiber_over_infinity(oracle):
    fiber = maps.preimages(catalog.get_map(CEX), maps.ProjectivePoint.infinity())
    ref = oracle["fiber_infinity_cex"]
    finite = [(p, m) for p, m in zip(fiber.points, fiber.multiplicities)
              if not p.is_infinity]
    inf_mult = sum(m for p, m in zip(fiber.points, fiber.multiplicities)
                   if p.is_infinity)
    assert inf_mult == ref["infinity_mult"]
    got = sorted_roots([p.affine() for p, _ in finite])
    assert np.allclose(got, pairs(ref["finite_roots"]), atol=1e-12)
    assert [m for _, m in finite] == ref["finite_mults"]


def test_second_preimages_of_infinity(oracle):
    f = catalog.get_map(CEX)
    second = set()
    for p in maps.preimages(f, maps.ProjectivePoint.infinity()).points:
        if p.is_infinity:
            continue
        for q in maps.preimages(f, p).points:
            if not q.is_infinity:
                second.add(complex(round(q.affine().real, 10),
                                   round(q.affine().imag, 10)))
    got = sorted_roots(sorted(second, key=lambda z: (z.real, z.imag)))
    ref = pairs(oracle["second_preimages_of_infinity_cex"])
    assert np.allclose(got, sorted_roots(ref), atol=1e-9)


def test_quartic_fiber(oracle):
    f = catalog.get_map("z^2-1")
    level2 = []
    for p in maps.preimages(f, 10.0).points:
        for q in maps.preimages(f, p).points:
            level2.append(q.affine())
    got = sorted_roots(level2)
    assert np.allclose(got, sorted_roots(pairs(oracle["quartic_fiber_z2m1_over_10"])),
                       atol=1e-9)


def test_potential_closed_forms(oracle):
    cases = oracle["potential_circle_cases"]
    ev = escape.evaluator_for(catalog.get_map("1/z^2"))
    assert ev.potential(3.0) == pytest.approx(cases["inv_z2_at_3"], abs=1e-11)
    assert ev.potential(2j) == pytest.approx(cases["inv_z2_at_2i"], abs=1e-11)
    assert ev.potential(0.5) == pytest.approx(cases["inv_z2_at_half"], abs=1e-11)
    ev2 = escape.evaluator_for(catalog.get_map("z^2"))
    assert ev2.potential(2.0 + 2.0j) == pytest.approx(
        cases["z2_field_corner_2_2"], abs=1e-11)


def test_base_heights(oracle, evaluators):
    for name, ref in oracle["base_heights"].items():
        assert evaluators[name].g01 == pytest.approx(ref, abs=1e-10), name


def test_energies(oracle, evaluators, witnesses_10k):
    for name, ref in oracle["energies"].items():
        mu = witnesses_10k[name]
        got = equilibrium.energy(catalog.get_map(name), mu, evaluators[name])
        assert got == pytest.approx(ref, abs=5e-3), name


def test_lemniscate_normalization_constant(oracle, evaluators, witnesses_10k):
    f = catalog.get_map("1/z^2")
    ev = evaluators["1/z^2"]
    e = equilibrium.energy(f, witnesses_10k["1/z^2"], ev)
    L = lemniscates.make_lemniscate(f, ev, I=e)
    assert L.c == pytest.approx(oracle["normalization_c_inv_z2"], abs=1e-6)


def test_special_form_matches(oracle):
    got = maps.classify_special_form(catalog.get_map(SPECIAL_CUBIC))
    assert got is not None
    a, b = got
    ref = oracle["special_form_special_cubic"]
    assert abs(a - complex(*ref["a"])) < 1e-10
    assert abs(b - complex(*ref["b"])) < 1e-10


def test_chordal_metric_anchors(oracle):
    ref = oracle["chordal"]
    got = maps.chordal_from_affine(np.array([0.0, 1.0, 3.0]))
    assert got[0] == pytest.approx(ref["at_0"], abs=1e-15)
    assert got[1] == pytest.approx(ref["at_1"], abs=1e-15)
    assert got[2] == pytest.approx(ref["at_3"], abs=1e-15)
