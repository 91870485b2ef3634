"""The built-in map suite used by calibration, acceptance, and `suite`.

Five equality-family maps (square polynomials: the square of the map,
or the map itself, is a polynomial) and one genuine counterexample with
a superattracting fixed point at infinity whose second iterate is not
a polynomial.  Coefficients ascending.
"""

from __future__ import annotations

from .maps import RationalMap

SUITE_DEFS = [
    ("z^2", [0, 0, 1], [1]),
    ("z^2-1", [-1, 0, 1], [1]),
    ("1/z^2", [1], [0, 0, 1]),
    ("1/z^3", [1], [0, 0, 0, 1]),
    ("2/(z-1)^3+1", [1, 3, -3, 1], [-1, 3, -3, 1]),
    ("(z^3+0.1)/z", [0.1, 0, 0, 1], [0, 1]),
]

# map ids whose potential spread should vanish (the equality family)
EQUALITY_IDS = ["z^2", "z^2-1", "1/z^2", "1/z^3", "2/(z-1)^3+1"]

# the converse-direction test map
COUNTEREXAMPLE_ID = "(z^3+0.1)/z"


def suite_maps() -> list:
    """[(map_id, RationalMap)] for the whole suite, in suite order."""
    return [(name, RationalMap(num, den, name=name)) for name, num, den in SUITE_DEFS]


def get_map(map_id: str) -> RationalMap:
    for name, num, den in SUITE_DEFS:
        if name == map_id:
            return RationalMap(num, den, name=name)
    raise KeyError(f"unknown suite map {map_id!r}")
