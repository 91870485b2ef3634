"""End-to-end equivalence experiment and the consistency verdict.

One run gathers both sides of the dichotomy for a single map: the
algebraic side (is the second iterate a polynomial?) and the measure
side (is the potential constant on the Julia witnesses, and does the
equilibrium cloud match the harmonic-hit cloud?).  The verdict is the
agreement bit between the two sides.

The dichotomy itself is exact; every threshold here is a statistical
artifact.  τ_spread and the discrepancy band therefore live in
calibration.py next to the log that produced them, and the verdict is
computed at the same reference settings the calibration used.  A map
whose witness cloud crowds the point at infinity is refused outright:
the experiment presumes infinity sits in a Fatou component, and no
verdict is meaningful without that.

Stages run in a fixed order, each timed, and any stage error is caught
and recorded so a broken run still yields a partial report instead of
a stack trace.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import calibration, catalog, equilibrium, escape, harmonic, lemniscates, maps
from .equilibrium import EmpiricalMeasure, SamplerConfig
from .errors import InfinityInJulia, InsufficientWitnesses, RatpotError
from .mapio import Config
from .rng import JULIA_CHAIN_BASE, STREAM_START_POINT, WALKER_BASE

DELTA_INF = 0.05          # witness chordal distance to infinity below this refuses
MIN_SPREAD_WITNESSES = 10_000
FATOU_CHECK_SAMPLES = 4096  # internal witness draw when none are supplied

VERDICT_STAGES = (
    "parse", "classify", "escape", "julia", "energy",
    "infinity", "spread", "harmonic", "discrepancy", "lemniscate", "consistency",
)


# --------------------------------------------------------------------------
# spread of the closed-form potential over Julia witnesses


@dataclass(frozen=True)
class SpreadStatistic:
    """Range of the potential over a witness cloud."""

    max_p: float
    min_p: float
    mean_p: float
    spread: float
    n_witnesses: int

    def to_dict(self) -> dict:
        return {
            "max_p": self.max_p,
            "min_p": self.min_p,
            "mean_p": self.mean_p,
            "spread": self.spread,
            "n_witnesses": self.n_witnesses,
        }


def infinity_in_fatou(f: maps.RationalMap, ev, witnesses=None,
                      delta_inf: float = DELTA_INF) -> bool:
    """Witness-based membership test: does the Julia cloud avoid infinity?

    True when every witness keeps chordal distance > delta_inf from the
    point at infinity.  With no witnesses supplied, an internal
    deterministic draw (seed 0) stands in.  This is a heuristic stand-in
    for a Fatou-membership certificate: a cloud that crowds infinity is
    evidence that infinity sits in the Julia set, and the experiment is
    then refused upstream.
    """
    if witnesses is None:
        cfg = SamplerConfig(n_samples=FATOU_CHECK_SAMPLES, burn_in=48, seed=0)
        witnesses = equilibrium.sample_julia(f, cfg).points
    w = np.asarray(witnesses, dtype=np.complex128).ravel()
    if w.size == 0:
        return False
    dist = np.where(np.isfinite(w), maps.chordal_from_affine(w), 0.0)
    return bool(np.min(dist) > delta_inf)


def julia_potential_spread(f: maps.RationalMap, ev, mu: EmpiricalMeasure,
                           delta_inf: float = DELTA_INF,
                           min_witnesses: int = MIN_SPREAD_WITNESSES) -> SpreadStatistic:
    """Max - min of the closed-form potential over the witness cloud.

    A spread collapsing toward zero is the numerical face of a potential
    that is constant on the Julia set.  Requires a cloud of at least
    min_witnesses points, and refuses maps whose witnesses crowd
    infinity (the constancy statement presumes infinity is in a Fatou
    component).
    """
    if len(mu) < min_witnesses:
        raise InsufficientWitnesses(
            f"spread wants >= {min_witnesses} witnesses, got {len(mu)}")
    if not infinity_in_fatou(f, ev, witnesses=mu.points, delta_inf=delta_inf):
        raise InfinityInJulia(
            "witness cloud approaches infinity; no verdict for this map")
    p = ev.potential(mu.points)
    return SpreadStatistic(
        max_p=float(np.max(p)),
        min_p=float(np.min(p)),
        mean_p=float(np.mean(p)),
        spread=float(np.max(p) - np.min(p)),
        n_witnesses=len(mu),
    )


def measure_discrepancy(mu: EmpiricalMeasure, nu: EmpiricalMeasure,
                        probes) -> float:
    """Max difference of the two empirical potentials over probe points.

    Equal measures have equal potentials outside their supports, so a
    large value at exterior probes separates the clouds; a small value
    is the testable face of measure equality.
    """
    probes = np.asarray(probes, dtype=np.complex128).ravel()
    p_mu = equilibrium.empirical_potential(mu.points, mu.weights, probes)
    p_nu = equilibrium.empirical_potential(nu.points, nu.weights, probes)
    return float(np.max(np.abs(p_mu - p_nu)))


# --------------------------------------------------------------------------
# the full pipeline


@dataclass
class VerdictReport:
    """Everything one equivalence run produced, JSON-ready."""

    map_id: str
    d: int | None = None
    algebraic: dict | None = None
    infinity_in_fatou: bool | None = None
    spread: float | None = None
    spread_stats: SpreadStatistic | None = None
    harmonic_discrepancy: float | None = None
    energy: float | None = None
    base_height: float | None = None
    lemniscate: dict | None = None
    consistent: bool | None = None
    verdict: str = "error"
    config_echo: dict | None = None
    seeds: dict | None = None
    stage_failure: dict | None = None
    timings: dict | None = None

    def to_dict(self) -> dict:
        d = {
            "map_id": self.map_id,
            "d": self.d,
            "algebraic": self.algebraic,
            "infinity_in_fatou": self.infinity_in_fatou,
            "spread": self.spread,
            "spread_stats": self.spread_stats.to_dict() if self.spread_stats else None,
            "harmonic_discrepancy": self.harmonic_discrepancy,
            "energy": self.energy,
            "base_height": self.base_height,
            "lemniscate": self.lemniscate,
            "consistent": self.consistent,
            "verdict": self.verdict,
            "config_echo": self.config_echo,
            "seeds": self.seeds,
            "stage_failure": self.stage_failure,
            "timings": self.timings,
        }
        return d


def _exceptional_payload(points) -> dict:
    finite = [p.affine() for p in points if not p.is_infinity]
    return {
        "points": [[z.real, z.imag] for z in finite],
        "includes_infinity": any(p.is_infinity for p in points),
    }


def _seeds_payload(cfg: Config) -> dict:
    return {
        "seed": cfg.seed,
        "streams": {
            "start_point": STREAM_START_POINT,
            "julia_chain_base": JULIA_CHAIN_BASE,
            "walker_base": WALKER_BASE,
        },
    }


def run_verdict(map_or_path, config: Config | None = None) -> VerdictReport:
    """Parse, classify, sample both measures, and return the verdict report.

    Stage order: parse -> classify -> escape -> julia -> energy ->
    infinity -> spread -> harmonic -> discrepancy -> lemniscate ->
    consistency.  The first failing stage stops the run and is recorded
    in stage_failure; the partial report keeps every field computed up
    to that point.  Fully deterministic given the config.
    """
    cfg = config if config is not None else Config()
    tol = cfg.tolerances
    report = VerdictReport(map_id="<unparsed>", config_echo=cfg.to_dict(),
                           seeds=_seeds_payload(cfg))
    timings: dict = {}
    report.timings = timings

    def staged(name, fn):
        t0 = time.perf_counter()
        try:
            out = fn()
        except (RatpotError, OSError) as e:
            report.stage_failure = {
                "stage": name,
                "error": type(e).__name__,
                "message": str(e),
            }
            report.verdict = "error"
            raise _StageStop from e
        finally:
            timings[name] = time.perf_counter() - t0
        return out

    try:
        # -- parse
        if isinstance(map_or_path, maps.RationalMap):
            f = map_or_path
            timings["parse"] = 0.0
        else:
            def _parse():
                from .mapio import parse_map_file
                return parse_map_file(map_or_path)
            f = staged("parse", _parse)
        report.map_id = f.label()
        report.d = f.degree

        # -- classify
        def _classify():
            special = maps.classify_special_form(f)
            return {
                "is_poly": maps.is_polynomial(f),
                "is_square_poly": maps.is_square_polynomial(f),
                "special_form": None if special is None
                else [[special[0].real, special[0].imag],
                      [special[1].real, special[1].imag]],
                "exceptional": _exceptional_payload(maps.exceptional_set(f)),
            }
        report.algebraic = staged("classify", _classify)
        is_square_poly = report.algebraic["is_square_poly"]

        # -- escape-rate machinery
        ev = staged("escape", lambda: escape.evaluator_for(
            f, tol=tol["escape_tol"], depth=cfg.depth))
        report.base_height = float(ev.g01)

        # -- equilibrium witnesses
        def _julia():
            scfg = SamplerConfig(n_samples=cfg.samples, burn_in=cfg.burn_in,
                                 seed=cfg.seed)
            return equilibrium.sample_julia(f, scfg)
        mu = staged("julia", _julia)

        # -- energy
        report.energy = staged(
            "energy", lambda: float(equilibrium.energy(f, mu, ev)))

        # -- hypothesis gate: infinity must sit in a Fatou component
        inf_ok = staged("infinity", lambda: infinity_in_fatou(
            f, ev, witnesses=mu.points, delta_inf=tol["delta_inf"]))
        report.infinity_in_fatou = inf_ok
        if not inf_ok:
            report.verdict = "refused"
            return report

        # -- potential spread over witnesses
        stats = staged("spread", lambda: julia_potential_spread(
            f, ev, mu, delta_inf=tol["delta_inf"]))
        report.spread_stats = stats
        report.spread = stats.spread

        # -- harmonic hits
        def _harmonic():
            bbox = cfg.bbox if cfg.bbox is not None else harmonic.default_bbox(mu)
            nx, ny = cfg.grid
            grid = harmonic.label_grid(f, mu, bbox, nx, ny)
            hs = harmonic.sample_harmonic(f, grid, n_walkers=cfg.walkers,
                                          seed=cfg.seed)
            return hs.hits
        nu = staged("harmonic", _harmonic)

        # -- two-cloud discrepancy at exterior probes
        def _discrepancy():
            cloud = np.concatenate([mu.points, nu.points])
            probes = equilibrium.probe_circle(
                cloud, n_probes=calibration.REFERENCE["probes"],
                factor=calibration.REFERENCE["probe_factor"])
            return measure_discrepancy(mu, nu, probes)
        report.harmonic_discrepancy = staged("discrepancy", _discrepancy)

        # -- lemniscate claims (non-polynomial maps only; a polynomial's
        #    denominator form is constant and traces nothing)
        def _lemniscate():
            if report.algebraic["is_poly"]:
                return {"applicable": False}
            I_hat = report.energy
            c = lemniscates.normalization_constant(f, ev, I_hat)
            L = lemniscates.make_lemniscate(f, ev, I_hat, n=1, c=c)
            bbox = cfg.bbox if cfg.bbox is not None else harmonic.default_bbox(mu)
            nx, ny = cfg.grid
            trace = lemniscates.trace_level_set(L, bbox, nx, ny)
            checks = lemniscates.claim_checks(f, L, mu, trace=trace)
            comp = lemniscates.composition_identity_residual(f, c, seed=cfg.seed)
            return {
                "applicable": True,
                "c": float(c.real) if isinstance(c, complex) else float(c),
                "composition_residual": float(comp),
                "trace_vertices": int(trace.vertices().size),
                **{k: float(v) for k, v in checks.items()},
            }
        report.lemniscate = staged("lemniscate", _lemniscate)

        # -- verdict
        def _consistency():
            tau = tol["tau_spread"]
            small = stats.spread < tau
            consistent = bool(is_square_poly == small)
            if consistent:
                label = "consistent"
            elif not is_square_poly and stats.spread < 2.0 * tau:
                # the measure side can undershoot at finite sampling; only
                # a clear violation earns the hard label
                label = "inconclusive"
            else:
                label = "inconsistent"
            return consistent, label
        consistent, label = staged("consistency", _consistency)
        report.consistent = consistent
        report.verdict = label
        return report

    except _StageStop:
        return report


class _StageStop(Exception):
    """Internal control flow: a stage failed and was recorded."""


# --------------------------------------------------------------------------
# the built-in suite


def suite_row(report: VerdictReport) -> dict:
    """Flatten one report into the fixed suite CSV columns."""
    alg = report.algebraic or {}
    special = alg.get("special_form")
    row = {
        "map_id": report.map_id,
        "d": report.d,
        "is_poly": alg.get("is_poly"),
        "is_square_poly": alg.get("is_square_poly"),
        "special_a_re": special[0][0] if special else None,
        "special_a_im": special[0][1] if special else None,
        "special_b_re": special[1][0] if special else None,
        "special_b_im": special[1][1] if special else None,
        "infinity_in_fatou": report.infinity_in_fatou,
        "energy": report.energy,
        "base_height": report.base_height,
        "spread": report.spread,
        "discrepancy": report.harmonic_discrepancy,
        "consistent": report.consistent,
        "verdict": report.verdict,
    }
    return row


def run_suite(config: Config | None = None):
    """Run the verdict pipeline over the built-in suite.

    Returns (reports, rows); rows feed write_suite_csv directly.  The
    rows carry no timings, so two same-seed runs emit byte-identical
    tables.
    """
    cfg = config if config is not None else Config()
    reports = []
    rows = []
    for _, f in catalog.suite_maps():
        rep = run_verdict(f, cfg)
        reports.append(rep)
        rows.append(suite_row(rep))
    return reports, rows
