"""The two canonical measures on the basilica Julia set, side by side.

For f = z^2 - 1 the backward-orbit sampler draws from the balanced
measure and the walk-on-spheres sampler draws from the harmonic measure
of the unbounded Fatou component.  Because f is a polynomial the two
agree; what a finite run shows is agreement up to the resolution of the
walk, since walkers are stopped one grid band short of the Julia set.
The script therefore runs the comparison twice, on a coarse and a fine
grid, and the two distances (binned angular total variation and the
worst potential gap over frontier probes) shrink with the cell size.

Point clouds for the fine run land in demos/out/ as CSV.

Run from the repository root:

    python3 demos/two_measures_basilica.py
"""

import pathlib
import time

import numpy as np

from ratpot import catalog, equilibrium, harmonic
from ratpot.mapio import write_points_csv

OUT = pathlib.Path(__file__).parent / "out"
N_WITNESSES = 20_000
N_WALKERS = 100_000
GRIDS = (512, 2048)
SEED = 0


def main() -> None:
    OUT.mkdir(exist_ok=True)
    f = catalog.get_map("z^2-1")

    t0 = time.perf_counter()
    mu = equilibrium.sample_julia(
        f, equilibrium.SamplerConfig(n_samples=N_WITNESSES, seed=SEED))
    print(f"balanced-measure witnesses: {mu.points.size} "
          f"({time.perf_counter() - t0:.1f} s)")
    write_points_csv(OUT / "basilica_balanced.csv", mu.points, mu.weights)
    center = complex(mu.points.mean())

    print(f"\n{'grid':>6s} {'band width':>11s} {'hits':>7s} "
          f"{'angular TV':>11s} {'potential gap':>14s}")
    for n_cells in GRIDS:
        t0 = time.perf_counter()
        grid = harmonic.label_grid(f, mu, harmonic.default_bbox(mu),
                                   n_cells, n_cells)
        hs = harmonic.sample_harmonic(f, grid, n_walkers=N_WALKERS, seed=SEED)
        nu = hs.hits

        tv = harmonic.binned_angle_tv(mu.points, nu.points, bins=64,
                                      center=center)
        probes = harmonic.probes_on_frontier(grid, 64, atoms=nu.points)
        p_mu = equilibrium.empirical_potential(mu.points, mu.weights, probes)
        p_nu = equilibrium.empirical_potential(nu.points, nu.weights, probes)
        gap = float(np.max(np.abs(p_mu - p_nu)))
        print(f"{n_cells:6d} {grid.delta:11.5f} {nu.points.size:7d} "
              f"{tv:11.4f} {gap:14.4f}   ({time.perf_counter() - t0:.1f} s)")

    write_points_csv(OUT / "basilica_harmonic.csv", nu.points, nu.weights)
    print(f"\nboth distances track the band width; CSVs in {OUT}/")


if __name__ == "__main__":
    main()
