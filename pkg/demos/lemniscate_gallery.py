"""Normalized lemniscates of the non-polynomial built-in maps.

For each map with a non-constant denominator the script computes the
normalization constant, traces the unit level set of |cF_0(1, z)|, and
writes the curve to a polyline CSV.  It also prints the four claim
statistics, so the qualitative story is visible in the terminal: for
the maps whose second iterate is a polynomial the traced curve hugs the
Julia witnesses, while for (z^3+0.1)/z the containment number is large
because no lemniscate of that map passes through its Julia set.

Run from the repository root:

    python3 demos/lemniscate_gallery.py
"""

import pathlib
import time

from ratpot import catalog, equilibrium, escape, lemniscates
from ratpot.mapio import write_polylines_csv

OUT = pathlib.Path(__file__).parent / "out"
N_WITNESSES = 10_000
TRACE_GRID = 384
WINDOWS = {
    "1/z^2": (-1.6, -1.6, 1.6, 1.6),
    "1/z^3": (-1.6, -1.6, 1.6, 1.6),
    "2/(z-1)^3+1": (-1.2, -2.2, 3.2, 2.2),
    "(z^3+0.1)/z": (-1.8, -1.8, 1.8, 1.8),
}


def slug(name: str) -> str:
    return (name.replace("/", "_over_").replace("^", "").replace("+", "p")
            .replace("(", "").replace(")", "").replace("-", "m"))


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, window in WINDOWS.items():
        t0 = time.perf_counter()
        f = catalog.get_map(name)
        ev = escape.evaluator_for(f)
        mu = equilibrium.sample_julia(
            f, equilibrium.SamplerConfig(n_samples=N_WITNESSES, seed=0))
        I = float(equilibrium.energy(f, mu, ev))
        L = lemniscates.make_lemniscate(f, ev, I=I)
        trace = lemniscates.trace_level_set(L, window, TRACE_GRID, TRACE_GRID)
        checks = lemniscates.claim_checks(f, L, mu, trace)

        path = OUT / f"lemniscate_{slug(name)}.csv"
        write_polylines_csv(path, trace.polylines)
        n_verts = sum(len(p) for p in trace.polylines)
        print(f"{name}: |c| = {abs(L.c):.6f}, energy = {I:+.6f}, "
              f"{len(trace.polylines)} curve(s), {n_verts} vertices "
              f"({time.perf_counter() - t0:.1f} s)")
        for key, value in checks.items():
            print(f"    {key:20s} {value:.3e}")
        print(f"    -> {path.name}")


if __name__ == "__main__":
    main()
