"""Versioned statistical thresholds and the settings that produced them.

The dichotomy this package tests is exact in theory (the potential
spread over the Julia set is zero or strictly positive), so any finite
threshold is a statistical artifact and has to be traceable.  The rule:

  TAU_SPREAD is 3x the largest potential spread observed over the
  equality-family calibration maps, across the seeds below, at the
  reference settings below.  DISCREPANCY_BAND is 1.5x the largest
  equality-family measure discrepancy observed the same way.

scripts/calibrate.py reruns the measurement and writes the raw numbers
to calibration/calibration_log.json; the constants here are frozen
copies of that run and carry its version tag.  Do not edit the numbers
by hand without rerunning the script.
"""

# version tag of the calibration run the constants were frozen from
CALIBRATION_VERSION = "2026.08-r1"

# reference settings: thresholds apply to statistics gathered this way
REFERENCE = {
    "witnesses": 100_000,
    "burn_in": 48,
    "walkers": 200_000,
    "grid": (2048, 2048),
    "probes": 64,
    "probe_factor": 1.25,
    "seeds": (101, 202, 303),
}

# safety factors baked into the frozen constants
SPREAD_SAFETY = 3.0
BAND_SAFETY = 1.5

# frozen thresholds from the 2026.08-r1 run of scripts/calibrate.py
# (raw numbers in calibration/calibration_log.json)
TAU_SPREAD = 5.867856e-11
DISCREPANCY_BAND = 1.335881e-02
