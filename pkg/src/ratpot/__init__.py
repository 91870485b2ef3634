"""Potential-theoretic invariants of rational maps on the Riemann sphere.

The library computes, for a rational map f = P/Q of degree d >= 2 given
by its coefficient lists, the escape-rate function of a canonical
homogeneous lift, the equilibrium measure of the Julia set by inverse
iteration, the harmonic measure of the Fatou component of infinity by
walk-on-spheres, and the normalized lemniscates of the iterates.  On top
of those it runs a numerical test of a dichotomy: the two measures agree
exactly when the second iterate of f is a polynomial, and the potential
spread over Julia witnesses is the statistic that separates the cases.

Entry points, roughly inside-out:

  maps         parsing, canonical lifts, algebraic classification
  escape       escape-rate evaluator, potentials, functional equation
  equilibrium  inverse-iteration witnesses, energy, empirical potentials
  harmonic     grid labeling and walk-on-spheres hitting measure
  lemniscates  normalization constant, level-set traces, claim checks
  verdict      the staged pipeline and the suite runner
  mapio        file formats, Config, report envelopes
  cli          `ratpot` subcommands (also `python3 -m ratpot`)

Everything is deterministic given (seed, stream); the RNG policy lives
in rng.py and the thresholds with their provenance in calibration.py.
"""

from ._version import __version__
from .calibration import CALIBRATION_VERSION, DISCREPANCY_BAND, TAU_SPREAD
from .equilibrium import (
    EmpiricalMeasure,
    SamplerConfig,
    empirical_potential,
    energy,
    from_atoms,
    full_preimage_tree,
    probe_circle,
    sample_julia,
)
from .errors import (
    IoError,
    ParseError,
    RatpotError,
    ValidationError,
)
from .escape import EscapeRateEvaluator, evaluator_for, potential
from .harmonic import (
    GridLabeling,
    HarmonicSample,
    default_bbox,
    label_grid,
    sample_harmonic,
)
from .lemniscates import (
    LevelSetTrace,
    NormalizedLemniscate,
    claim_checks,
    composition_identity_residual,
    make_lemniscate,
    normalization_constant,
    trace_level_set,
)
from .mapio import (
    Config,
    emit_raster,
    load_config,
    parse_map_file,
    report_envelope,
    serialize_map,
    write_map_file,
    write_report,
)
from .maps import (
    ProjectivePoint,
    RationalMap,
    chordal_from_affine,
    classify_special_form,
    exceptional_set,
    is_polynomial,
    is_square_polynomial,
)
from .rng import rng_stream
from .verdict import (
    SpreadStatistic,
    VerdictReport,
    infinity_in_fatou,
    julia_potential_spread,
    measure_discrepancy,
    run_suite,
    run_verdict,
)

__all__ = [
    "__version__",
    "CALIBRATION_VERSION", "TAU_SPREAD", "DISCREPANCY_BAND",
    "RationalMap", "ProjectivePoint", "chordal_from_affine",
    "is_polynomial", "is_square_polynomial", "classify_special_form",
    "exceptional_set",
    "EscapeRateEvaluator", "evaluator_for", "potential",
    "EmpiricalMeasure", "SamplerConfig", "sample_julia",
    "full_preimage_tree", "from_atoms", "empirical_potential",
    "probe_circle", "energy",
    "GridLabeling", "HarmonicSample", "label_grid", "sample_harmonic",
    "default_bbox",
    "NormalizedLemniscate", "LevelSetTrace", "normalization_constant",
    "make_lemniscate", "trace_level_set", "claim_checks",
    "composition_identity_residual",
    "SpreadStatistic", "VerdictReport", "infinity_in_fatou",
    "julia_potential_spread", "measure_discrepancy", "run_verdict",
    "run_suite",
    "Config", "parse_map_file", "serialize_map", "write_map_file",
    "load_config", "emit_raster", "report_envelope", "write_report",
    "rng_stream",
    "RatpotError", "ValidationError", "ParseError", "IoError",
]
