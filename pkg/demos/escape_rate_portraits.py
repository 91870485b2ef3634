"""Grayscale escape-rate portraits of the six built-in maps.

Writes one 16-bit PGM per map into demos/out/, together with the
{min, max} sidecar that records the affine rescale.  The potential is
zero on the filled-in part of the sphere and grows like log|z| near
infinity, so the Julia set shows up as the black/gray frontier.

Run from the repository root:

    python3 demos/escape_rate_portraits.py
"""

import pathlib
import time

import numpy as np

from ratpot import catalog, escape
from ratpot.mapio import emit_raster

OUT = pathlib.Path(__file__).parent / "out"
GRID = 512
WINDOWS = {
    "z^2": (-1.8, -1.8, 1.8, 1.8),
    "z^2-1": (-2.1, -1.4, 2.1, 1.4),
    "1/z^2": (-1.8, -1.8, 1.8, 1.8),
    "1/z^3": (-1.8, -1.8, 1.8, 1.8),
    "2/(z-1)^3+1": (-1.4, -2.4, 3.4, 2.4),
    "(z^3+0.1)/z": (-1.6, -1.6, 1.6, 1.6),
}


def slug(name: str) -> str:
    return (name.replace("/", "_over_").replace("^", "").replace("+", "p")
            .replace("(", "").replace(")", "").replace("-", "m"))


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, f in catalog.suite_maps():
        t0 = time.perf_counter()
        ev = escape.evaluator_for(f)
        x0, y0, x1, y1 = WINDOWS[name]
        xs = np.linspace(x0, x1, GRID)
        ys = np.linspace(y1, y0, GRID)  # row 0 is the top of the image
        Z = xs[None, :] + 1j * ys[:, None]
        field = ev.potential(Z.ravel()).reshape(GRID, GRID)
        path = OUT / f"potential_{slug(name)}.pgm"
        emit_raster(field, path)
        print(f"{name:14s} -> {path.name}  "
              f"(range [{field.min():.3f}, {field.max():.3f}], "
              f"{time.perf_counter() - t0:.2f} s)")


if __name__ == "__main__":
    main()
