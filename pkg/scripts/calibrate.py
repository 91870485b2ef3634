"""Measure the statistical thresholds and write the calibration log.

Runs the full verdict pipeline over the built-in suite at the reference
settings, across the calibration seeds, and derives:

  TAU_SPREAD        = SPREAD_SAFETY x max equality-family spread
  DISCREPANCY_BAND  = BAND_SAFETY   x max equality-family discrepancy

The raw numbers land in calibration/calibration_log.json next to the
derived constants; the values in src/ratpot/calibration.py must be
frozen copies of that log.  Rerun this script (and re-freeze) whenever
the reference settings or the sampling machinery change.

Usage:  python3 scripts/calibrate.py [--quick]

--quick shrinks the workload for a smoke run; its output is NOT valid
for freezing.
"""

import argparse
import json
import os
import sys
import time

from ratpot import calibration, catalog, verdict
from ratpot.mapio import Config

OUT_PATH = os.path.join(os.path.dirname(__file__), "..", "calibration",
                        "calibration_log.json")


def measure(quick: bool) -> dict:
    ref = calibration.REFERENCE
    witnesses = 10_000 if quick else ref["witnesses"]
    walkers = 20_000 if quick else ref["walkers"]
    grid = (256, 256) if quick else tuple(ref["grid"])
    seeds = ref["seeds"][:1] if quick else ref["seeds"]

    runs = []
    for seed in seeds:
        cfg = Config(seed=seed, samples=witnesses, walkers=walkers,
                     burn_in=ref["burn_in"], grid=grid)
        for map_id, f in catalog.suite_maps():
            t0 = time.perf_counter()
            rep = verdict.run_verdict(f, cfg)
            if rep.stage_failure is not None:
                raise RuntimeError(f"{map_id} seed {seed}: "
                                   f"stage {rep.stage_failure}")
            runs.append({
                "map_id": map_id,
                "seed": seed,
                "equality_family": map_id in catalog.EQUALITY_IDS,
                "spread": rep.spread,
                "discrepancy": rep.harmonic_discrepancy,
                "energy": rep.energy,
                "base_height": rep.base_height,
                "verdict": rep.verdict,
                "runtime_s": round(time.perf_counter() - t0, 2),
            })
            print("seed=%d %-14s spread=%.4e disc=%.4e verdict=%-12s (%.1fs)"
                  % (seed, map_id, rep.spread, rep.harmonic_discrepancy,
                     rep.verdict, runs[-1]["runtime_s"]))

    eq = [r for r in runs if r["equality_family"]]
    cx = [r for r in runs if not r["equality_family"]]
    max_eq_spread = max(r["spread"] for r in eq)
    max_eq_disc = max(r["discrepancy"] for r in eq)
    tau_spread = calibration.SPREAD_SAFETY * max_eq_spread
    band = calibration.BAND_SAFETY * max_eq_disc
    min_cx_spread = min(r["spread"] for r in cx)
    min_cx_disc = min(r["discrepancy"] for r in cx)

    return {
        "calibration_version": calibration.CALIBRATION_VERSION,
        "reference": {
            "witnesses": witnesses,
            "walkers": walkers,
            "grid": list(grid),
            "burn_in": ref["burn_in"],
            "probes": ref["probes"],
            "probe_factor": ref["probe_factor"],
            "seeds": list(seeds),
        },
        "quick": quick,
        "runs": runs,
        "max_equality_spread": max_eq_spread,
        "max_equality_discrepancy": max_eq_disc,
        "spread_safety": calibration.SPREAD_SAFETY,
        "band_safety": calibration.BAND_SAFETY,
        "TAU_SPREAD": tau_spread,
        "DISCREPANCY_BAND": band,
        "separation": {
            "counterexample_min_spread": min_cx_spread,
            "counterexample_min_discrepancy": min_cx_disc,
            "spread_over_2tau": min_cx_spread / (2 * tau_spread),
            "discrepancy_over_3band": min_cx_disc / (3 * band),
        },
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true",
                    help="smoke run at reduced workload (not for freezing)")
    args = ap.parse_args()

    t0 = time.perf_counter()
    log = measure(args.quick)
    os.makedirs(os.path.dirname(os.path.abspath(OUT_PATH)), exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8") as fh:
        json.dump(log, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print("\nwrote %s  (%.0fs total)" % (os.path.normpath(OUT_PATH),
                                         time.perf_counter() - t0))
    print("freeze into src/ratpot/calibration.py:")
    print("  TAU_SPREAD = %.6e" % log["TAU_SPREAD"])
    print("  DISCREPANCY_BAND = %.6e" % log["DISCREPANCY_BAND"])
    sep = log["separation"]
    print("separation: counterexample spread / 2 tau = %.3g%s"
          % (sep["spread_over_2tau"],
             "  OK" if sep["spread_over_2tau"] > 1 else "  SHORT"))
    print("separation: counterexample disc / 3 band = %.3g%s"
          % (sep["discrepancy_over_3band"],
             "  OK" if sep["discrepancy_over_3band"] > 1 else "  SHORT"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
