"""Parsing, canonical lifts, fibers, and the algebraic classifiers."""

import numpy as np
import pytest

from ratpot import catalog
from ratpot.errors import ValidationError
from ratpot.maps import (
    ProjectivePoint,
    RationalMap,
    chordal_from_affine,
    classify_special_form,
    exceptional_set,
    is_polynomial,
    is_square_polynomial,
    preimages,
)


def map_of(num, den):
    return RationalMap(num, den)


# --------------------------------------------------------------------------
# construction and validation


def test_degree_and_labels(suite_maps):
    expected_d = {"z^2": 2, "z^2-1": 2, "1/z^2": 2, "1/z^3": 3,
                  "2/(z-1)^3+1": 3, "(z^3+0.1)/z": 3}
    for name, f in suite_maps.items():
        assert f.degree == expected_d[name]


def test_rejects_degree_one():
    with pytest.raises(ValidationError):
        map_of([0, 1], [1])  # z


def test_rejects_shared_root_with_diagnostic():
    with pytest.raises(ValidationError, match="share a root"):
        map_of([-1, 0, 1], [-1, 1])  # (z^2-1)/(z-1)


def test_rejects_zero_denominator():
    with pytest.raises(ValidationError):
        map_of([0, 0, 1], [0])


def test_canonical_lift_max_coeff_is_one(suite_maps):
    for f in suite_maps.values():
        m = max(np.max(np.abs(f.lift.f0)), np.max(np.abs(f.lift.f1)))
        assert m == pytest.approx(1.0, abs=1e-14)


# --------------------------------------------------------------------------
# composition and fibers


def test_second_iterate_of_basilica_is_the_oracle_quartic(oracle):
    f = catalog.get_map("z^2-1")
    comp = np.array([complex(re, im)
                     for re, im in oracle["compose_num_z2m1_self"]])
    z = np.array([0.3 + 0.1j, -1.2j, 2.0, 0.5 - 0.5j, 1.0 + 1.0j])
    lhs = f(f(z))
    rhs = np.polyval(comp[::-1], z)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_fiber_over_infinity_of_counterexample(oracle):
    f = catalog.get_map("(z^3+0.1)/z")
    fiber = preimages(f, ProjectivePoint.infinity())
    assert fiber.total() == 3
    want = oracle["fiber_infinity_cex"]
    finite = [(p, m) for p, m in fiber if not p.is_infinity]
    inf_mult = sum(m for p, m in fiber if p.is_infinity)
    assert inf_mult == want["infinity_mult"]
    assert len(finite) == len(want["finite_roots"])
    for (p, m), (re, im), mult in zip(finite, want["finite_roots"],
                                      want["finite_mults"]):
        assert m == mult
        assert abs(p.affine() - complex(re, im)) < 1e-12


def test_second_preimages_of_infinity_are_cube_roots(oracle):
    f = catalog.get_map("(z^3+0.1)/z")
    fiber = preimages(f, 0.0)
    got = sorted((p.affine() for p, _ in fiber if not p.is_infinity),
                 key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    want = [complex(re, im)
            for re, im in oracle["second_preimages_of_infinity_cex"]]
    assert len(got) == 3
    for g, w in zip(got, want):
        assert abs(g - w) < 1e-9


def test_fiber_multiplicities_sum_to_degree(suite_maps):
    for f in suite_maps.values():
        for a in (0.37 + 0.2j, -1.5, ProjectivePoint.infinity()):
            assert preimages(f, a).total() == f.degree


# --------------------------------------------------------------------------
# classifiers (the tabulated suite facts)


def test_polynomial_flags(suite_maps):
    want = {"z^2": True, "z^2-1": True, "1/z^2": False, "1/z^3": False,
            "2/(z-1)^3+1": False, "(z^3+0.1)/z": False}
    for name, f in suite_maps.items():
        assert is_polynomial(f) == want[name], name


def test_square_polynomial_flags(suite_maps):
    want = {"z^2": True, "z^2-1": True, "1/z^2": True, "1/z^3": True,
            "2/(z-1)^3+1": True, "(z^3+0.1)/z": False}
    for name, f in suite_maps.items():
        assert is_square_polynomial(f) == want[name], name


def test_exceptional_sets(suite_maps):
    def as_set(points):
        out = set()
        for p in points:
            out.add("inf" if p.is_infinity else complex(round(p.affine().real, 9),
                                                        round(p.affine().imag, 9)))
        return out

    want = {
        "z^2": {0.0 + 0.0j, "inf"},
        "z^2-1": {"inf"},
        "1/z^2": {0.0 + 0.0j, "inf"},
        "1/z^3": {0.0 + 0.0j, "inf"},
        "2/(z-1)^3+1": {1.0 + 0.0j, "inf"},
        "(z^3+0.1)/z": set(),
    }
    for name, f in suite_maps.items():
        assert as_set(exceptional_set(f)) == want[name], name


def test_special_form_parameters(suite_maps, oracle):
    got = classify_special_form(suite_maps["2/(z-1)^3+1"])
    assert got is not None
    a, b = got
    want = oracle["special_form_special_cubic"]
    assert abs(a - complex(*want["a"])) < 1e-12
    assert abs(b - complex(*want["b"])) < 1e-12

    inv = classify_special_form(suite_maps["1/z^2"])
    assert inv is not None
    assert abs(inv[0] - 1.0) < 1e-12 and abs(inv[1]) < 1e-12

    assert classify_special_form(suite_maps["z^2"]) is None
    assert classify_special_form(suite_maps["(z^3+0.1)/z"]) is None


# --------------------------------------------------------------------------
# sphere geometry


def test_chordal_spot_values(oracle):
    want = oracle["chordal"]
    assert chordal_from_affine(0.0) == pytest.approx(want["at_0"], abs=1e-15)
    assert chordal_from_affine(1.0) == pytest.approx(want["at_1"], abs=1e-15)
    assert chordal_from_affine(3.0) == pytest.approx(want["at_3"], abs=1e-15)


def test_projective_point_roundtrip():
    p = ProjectivePoint.from_affine(2.0 - 1.0j)
    assert abs(p.affine() - (2.0 - 1.0j)) < 1e-15
    assert not p.is_infinity
    assert ProjectivePoint.infinity().is_infinity
    assert p.chordal_to_infinity() == pytest.approx(
        float(chordal_from_affine(2.0 - 1.0j)), abs=1e-15)
