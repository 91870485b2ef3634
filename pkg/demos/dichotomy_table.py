"""The polynomial-square dichotomy, measured on the built-in maps.

Runs the full verdict pipeline on each built-in map at a light
configuration and prints one row per map: the algebraic classification
next to the measured potential spread over Julia witnesses.  Five maps
have a polynomial second iterate and their spreads sit at floating-point
noise; the sixth does not, and its spread is order one.  The full
summary also lands in demos/out/dichotomy.csv.

Run from the repository root (about half a minute):

    python3 demos/dichotomy_table.py
"""

import pathlib
import time

from ratpot import verdict
from ratpot.mapio import Config, write_suite_csv

OUT = pathlib.Path(__file__).parent / "out"
CFG = Config(samples=20_000, walkers=20_000, grid=(384, 384))


def main() -> None:
    OUT.mkdir(exist_ok=True)
    t0 = time.perf_counter()
    reports, rows = verdict.run_suite(CFG)
    write_suite_csv(OUT / "dichotomy.csv", rows)

    print(f"{'map':14s} {'d':>2s} {'f^2 poly':>9s} {'spread':>12s} "
          f"{'discrepancy':>12s} {'verdict':>12s}")
    for row in rows:
        print(f"{row['map_id']:14s} {row['d']:2d} "
              f"{str(row['is_square_poly']):>9s} {row['spread']:12.3e} "
              f"{row['discrepancy']:12.3e} {row['verdict']:>12s}")
    print(f"\n{len(rows)} maps in {time.perf_counter() - t0:.1f} s; "
          f"full table in {OUT / 'dichotomy.csv'}")


if __name__ == "__main__":
    main()
