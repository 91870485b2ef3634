"""Command-line front end over the library.

Seven subcommands, one per pipeline surface:

  escape-rate      potential field on a grid -> 16-bit PGM (+ sidecar) or CSV
  julia-sample     equilibrium-measure witnesses -> points CSV
  harmonic-sample  harmonic-measure hits -> points CSV + walker stats JSON
  lemniscate       normalized level-set trace -> polyline CSV (+ claim stats)
  classify         algebraic facts about a map (degrees, special forms, E(f))
  verdict          the full equality-vs-dichotomy report for one map
  suite            verdict over the built-in calibration set -> summary CSV

Maps are given as JSON files ({"numerator": [[re,im],...], "denominator":
[...]}); as a convenience, a --map value that names no file but matches a
built-in suite id (z^2, z^2-1, 1/z^2, 1/z^3, 2/(z-1)^3+1, (z^3+0.1)/z) is
resolved from the catalog.

Every run with --out writes the declared artifacts plus a report envelope
(schema "brolin-report/1") carrying the tool version, the effective
config, and stage timings.  For verdict and classify the --out file IS
the envelope; every other subcommand writes it next to the main artifact
as <stem>.report.json.

--threads is accepted and echoed into the envelope for provenance, but
computation is vectorized inside a single process; the flag does not
change any result (determinism is per (seed, stream), never per
scheduler).  Exit codes: 0 success, 2 validation error, 3 numerical
failure, 4 I/O error.
"""

import argparse
import os
import re
import sys
import time

import numpy as np

from . import catalog, equilibrium, escape, harmonic, lemniscates, maps, verdict
from ._version import __version__
from .equilibrium import SamplerConfig
from .errors import IoError, RatpotError, ValidationError
from .mapio import (
    Config,
    emit_raster,
    fmt17,
    load_config,
    load_tolerances,
    parse_map_file,
    report_envelope,
    suite_csv_text,
    write_points_csv,
    write_polylines_csv,
    write_report,
    write_suite_csv,
    _write_json,
)

# defaults for the sampling subcommands; the verdict pipeline has its own
# (stricter) defaults in mapio.Config
DEFAULT_GRID = (512, 512)
DEFAULT_BBOX = (-2.0, -2.0, 2.0, 2.0)
DEFAULT_SAMPLES = 10_000
DEFAULT_WALKERS = 20_000
DEFAULT_BURN_IN = 30  # geometric decay: ~30 steps at d >= 2 reach double precision


# --------------------------------------------------------------------------
# argument plumbing

# argparse treats any leading-dash token as an option unless it looks like
# a plain negative number; widen that test so `--bbox -2,-2,2,2` parses
_NEGATIVE_VALUE = re.compile(r"^-(\d+(\.\d+)?|\.\d+)(,.*)?$")


def _grid_arg(text: str):
    try:
        nx, ny = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be NX,NY (two integers)")
    return (nx, ny)


def _bbox_arg(text: str):
    try:
        x0, y0, x1, y1 = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("bbox must be X0,Y0,X1,Y1 (four reals)")
    return (x0, y0, x1, y1)


def _load_map(ref: str) -> maps.RationalMap:
    """A JSON map file, or failing that a built-in suite id."""
    if not os.path.exists(ref):
        try:
            return catalog.get_map(ref)
        except (KeyError, ValidationError):
            pass
    return parse_map_file(ref)


def _config_from_args(args, **overrides) -> Config:
    base = load_config(args.config) if getattr(args, "config", None) else Config()
    d = base.to_dict()
    if args.seed is not None:
        d["seed"] = args.seed
    if args.threads is not None:
        d["threads"] = args.threads
    if args.out is not None:
        d["out"] = str(args.out)
    if args.tol_file is not None:
        d["tolerances"] = {**d["tolerances"], **load_tolerances(args.tol_file)}
    for key, val in overrides.items():
        if val is not None:
            d[key] = val
    return Config.from_dict(d)


def _require_out(args, subcommand: str) -> str:
    if args.out is None:
        raise ValidationError(f"{subcommand} requires --out")
    return str(args.out)


def _envelope_path(out_path: str) -> str:
    stem, _ = os.path.splitext(str(out_path))
    return stem + ".report.json"


def _emit_envelope(out_path, payload, cfg, timings) -> str:
    path = _envelope_path(out_path)
    write_report(path, report_envelope(payload, cfg, timings))
    return path


# --------------------------------------------------------------------------
# subcommands


def cmd_escape_rate(args) -> int:
    out = _require_out(args, "escape-rate")
    f = _load_map(args.map)
    cfg = _config_from_args(args, grid=args.grid or DEFAULT_GRID,
                            bbox=args.bbox or DEFAULT_BBOX, depth=args.depth)
    timings: dict = {}

    t0 = time.perf_counter()
    ev = escape.evaluator_for(f, tol=cfg.tolerances["escape_tol"], depth=cfg.depth)
    timings["escape"] = time.perf_counter() - t0

    x0, y0, x1, y1 = cfg.bbox
    nx, ny = cfg.grid
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y1, y0, ny)  # row 0 is the top of the picture
    t0 = time.perf_counter()
    field = ev.potential(xs[None, :] + 1j * ys[:, None])
    timings["potential"] = time.perf_counter() - t0
    if not np.all(np.isfinite(field)):
        raise RatpotError("potential field contains non-finite values")

    files = [out]
    if out.lower().endswith(".csv"):
        lines = ["x,y,p"]
        for iy in range(ny):
            for ix in range(nx):
                lines.append(f"{fmt17(xs[ix])},{fmt17(ys[iy])},"
                             f"{fmt17(field[iy, ix])}")
        from .mapio import _write_text
        _write_text(out, "\n".join(lines) + "\n")
    else:
        emit_raster(field, out)
        files.append(out + ".json")

    payload = {
        "kind": "escape-rate",
        "map": f.label(), "d": f.degree,
        "grid": list(cfg.grid), "bbox": list(cfg.bbox),
        "base_height": float(ev.g01),
        "field_min": float(field.min()), "field_max": float(field.max()),
        "files": files,
    }
    files.append(_emit_envelope(out, payload, cfg, timings))
    print(f"{f.label()}: potential on {nx}x{ny} over "
          f"[{x0},{x1}]x[{y0},{y1}] -> {', '.join(files)}")
    return 0


def cmd_julia_sample(args) -> int:
    out = _require_out(args, "julia-sample")
    f = _load_map(args.map)
    cfg = _config_from_args(args, samples=args.samples, burn_in=args.burn_in)
    timings: dict = {}

    t0 = time.perf_counter()
    mu = equilibrium.sample_julia(
        f, SamplerConfig(n_samples=cfg.samples, burn_in=cfg.burn_in,
                         seed=cfg.seed))
    timings["julia"] = time.perf_counter() - t0
    write_points_csv(out, mu.points, mu.weights)

    wx0, wy0, wx1, wy1 = mu.bounds()
    payload = {
        "kind": "julia-sample",
        "map": f.label(), "d": f.degree,
        "n_points": len(mu), "burn_in": cfg.burn_in, "seed": cfg.seed,
        "bounds": [wx0, wy0, wx1, wy1],
        "files": [out],
    }
    env = _emit_envelope(out, payload, cfg, timings)
    print(f"{f.label()}: {len(mu)} witnesses (burn-in {cfg.burn_in}) "
          f"-> {out}, {env}")
    return 0


def cmd_harmonic_sample(args) -> int:
    out = _require_out(args, "harmonic-sample")
    f = _load_map(args.map)
    cfg = _config_from_args(args, walkers=args.walkers, grid=args.grid,
                            bbox=args.bbox, samples=args.witnesses)
    timings: dict = {}

    t0 = time.perf_counter()
    mu = equilibrium.sample_julia(
        f, SamplerConfig(n_samples=cfg.samples, burn_in=DEFAULT_BURN_IN,
                         seed=cfg.seed))
    timings["julia"] = time.perf_counter() - t0

    bbox = cfg.bbox if cfg.bbox is not None else harmonic.default_bbox(mu)
    t0 = time.perf_counter()
    grid = harmonic.label_grid(f, mu, bbox, *cfg.grid)
    timings["label"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    hs = harmonic.sample_harmonic(f, grid, n_walkers=cfg.walkers, seed=cfg.seed)
    timings["walk"] = time.perf_counter() - t0

    write_points_csv(out, hs.hits.points, hs.hits.weights)
    stats = {
        "mean_steps": hs.walker_stats["mean_steps"],
        "abandoned": hs.walker_stats["abandoned"],
        "R_launch": hs.r_launch,
        "delta": hs.delta,
    }
    stats_path = os.path.splitext(out)[0] + ".stats.json"
    _write_json(stats_path, stats)

    payload = {
        "kind": "harmonic-sample",
        "map": f.label(), "d": f.degree,
        "n_hits": len(hs.hits), "walkers": cfg.walkers,
        "grid": list(cfg.grid), "bbox": list(bbox),
        "stats": stats,
        "files": [out, stats_path],
    }
    env = _emit_envelope(out, payload, cfg, timings)
    print(f"{f.label()}: {len(hs.hits)} hits from {cfg.walkers} walkers "
          f"(mean {stats['mean_steps']:.1f} steps, {stats['abandoned']} "
          f"abandoned) -> {out}, {stats_path}, {env}")
    return 0


def cmd_lemniscate(args) -> int:
    out = _require_out(args, "lemniscate")
    f = _load_map(args.map)
    cfg = _config_from_args(args, grid=args.grid, bbox=args.bbox,
                            samples=args.witnesses)
    timings: dict = {}

    t0 = time.perf_counter()
    ev = escape.evaluator_for(f, tol=cfg.tolerances["escape_tol"])
    mu = equilibrium.sample_julia(
        f, SamplerConfig(n_samples=cfg.samples, burn_in=DEFAULT_BURN_IN,
                         seed=cfg.seed))
    energy = float(equilibrium.energy(f, mu, ev))
    timings["measure"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    c = lemniscates.normalization_constant(f, ev, energy)
    L = lemniscates.make_lemniscate(f, ev, energy, n=args.order, c=c)
    bbox = cfg.bbox if cfg.bbox is not None else harmonic.default_bbox(mu)
    trace = lemniscates.trace_level_set(L, bbox, *cfg.grid)
    timings["trace"] = time.perf_counter() - t0
    write_polylines_csv(out, trace.polylines)

    payload = {
        "kind": "lemniscate",
        "map": f.label(), "d": f.degree,
        "order": args.order,
        "c": float(c.real) if isinstance(c, complex) else float(c),
        "energy": energy, "base_height": float(ev.g01),
        "n_polylines": len(trace), "trace_vertices": int(trace.vertices().size),
        "grid": list(cfg.grid), "bbox": list(bbox),
        "files": [out],
    }
    if args.checks:
        t0 = time.perf_counter()
        checks = lemniscates.claim_checks(f, L, mu, trace=trace)
        comp = lemniscates.composition_identity_residual(f, c, seed=cfg.seed)
        timings["checks"] = time.perf_counter() - t0
        payload["claims"] = {k: float(v) for k, v in checks.items()}
        payload["claims"]["composition_residual"] = float(comp)
    env = _emit_envelope(out, payload, cfg, timings)
    print(f"{f.label()}: order-{args.order} level set, {len(trace)} "
          f"polylines / {payload['trace_vertices']} vertices -> {out}, {env}")
    if args.checks:
        for k, v in payload["claims"].items():
            print(f"  {k}: {v:.3e}")
    return 0


def cmd_classify(args) -> int:
    f = _load_map(args.map)
    cfg = _config_from_args(args)
    timings: dict = {}

    t0 = time.perf_counter()
    special = maps.classify_special_form(f)
    payload = {
        "kind": "classify",
        "map": f.label(), "d": f.degree,
        "is_poly": maps.is_polynomial(f),
        "is_square_poly": maps.is_square_polynomial(f),
        "special_form": None if special is None
        else [[special[0].real, special[0].imag],
              [special[1].real, special[1].imag]],
        "exceptional": verdict._exceptional_payload(maps.exceptional_set(f)),
    }
    timings["classify"] = time.perf_counter() - t0

    print(f"{f.label()}: degree {f.degree}")
    print(f"  polynomial:            {payload['is_poly']}")
    print(f"  square is polynomial:  {payload['is_square_poly']}")
    if special is not None:
        a, b = special
        print(f"  special form:          a = {a}, b = {b}")
    exc = payload["exceptional"]
    pts = [complex(re, im) for re, im in exc["points"]]
    if exc["includes_infinity"]:
        pts_text = ", ".join(["inf"] + [str(p) for p in pts])
    else:
        pts_text = ", ".join(str(p) for p in pts) or "(empty)"
    print(f"  exceptional set:       {pts_text}")
    if args.out is not None:
        write_report(args.out, report_envelope(payload, cfg, timings))
        print(f"  -> {args.out}")
    return 0


def cmd_verdict(args) -> int:
    f = _load_map(args.map)
    cfg = _config_from_args(args)
    rep = verdict.run_verdict(f, cfg)
    if args.out is not None:
        write_report(args.out, report_envelope(rep.to_dict(), cfg, rep.timings))

    print(f"{rep.map_id}: verdict = {rep.verdict}")
    if rep.spread is not None:
        print(f"  spread:        {rep.spread:.6e}  "
              f"(tau = {cfg.tolerances['tau_spread']:.3e})")
    if rep.harmonic_discrepancy is not None:
        print(f"  discrepancy:   {rep.harmonic_discrepancy:.6e}")
    if rep.algebraic is not None:
        print(f"  square poly:   {rep.algebraic['is_square_poly']}")
    if args.out is not None:
        print(f"  -> {args.out}")
    if rep.stage_failure is not None:
        msg = rep.stage_failure
        print(f"error in stage {msg['stage']}: {msg['error']}: "
              f"{msg['message']}", file=sys.stderr)
        return _exit_code_for(msg["error"])
    return 0


def cmd_suite(args) -> int:
    cfg = _config_from_args(args)
    reports, rows = verdict.run_suite(cfg)
    if args.out is not None:
        write_suite_csv(args.out, rows)
        timings = {r.map_id: sum(r.timings.values()) for r in reports}
        payload = {"kind": "suite", "rows": rows}
        env = _emit_envelope(args.out, payload, cfg, timings)
        print(f"{len(rows)} maps -> {args.out}, {env}")
    else:
        sys.stdout.write(suite_csv_text(rows))

    failed = [r for r in reports if r.stage_failure is not None]
    for r in failed:
        msg = r.stage_failure
        print(f"{r.map_id}: error in stage {msg['stage']}: "
              f"{msg['message']}", file=sys.stderr)
    if failed:
        return _exit_code_for(failed[0].stage_failure["error"])
    return 0


# --------------------------------------------------------------------------
# parser and entry point


def _exit_code_for(error_name: str) -> int:
    from . import errors as errors_mod
    cls = getattr(errors_mod, error_name, RatpotError)
    if isinstance(cls, type) and issubclass(cls, ValidationError):
        return 2
    if isinstance(cls, type) and issubclass(cls, IoError):
        return 4
    return 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master RNG seed (default 0)")
    common.add_argument("--tol-file", default=None, metavar="FILE",
                        help="JSON overriding named tolerances")
    common.add_argument("--threads", type=int, default=None,
                        help="echoed for provenance; computation is "
                             "vectorized single-process")
    common.add_argument("--out", default=None, metavar="PATH",
                        help="output artifact; also writes a report envelope")

    p = argparse.ArgumentParser(
        prog="ratpot",
        description="Potential-theoretic invariants of rational maps on "
                    "the Riemann sphere.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    added = sub.add_parser
    def add_parser(*a, **kw):
        sp = added(*a, **kw)
        sp._negative_number_matcher = _NEGATIVE_VALUE
        return sp
    sub.add_parser = add_parser

    sp = sub.add_parser("escape-rate", parents=[common],
                        help="potential field on a grid (PGM or CSV)")
    sp.add_argument("--map", required=True, help="map JSON file or suite id")
    sp.add_argument("--grid", type=_grid_arg, default=None, metavar="NX,NY")
    sp.add_argument("--bbox", type=_bbox_arg, default=None,
                    metavar="X0,Y0,X1,Y1")
    sp.add_argument("--depth", type=int, default=None,
                    help="fixed iteration depth (default: tail-bound driven)")
    sp.set_defaults(func=cmd_escape_rate)

    sp = sub.add_parser("julia-sample", parents=[common],
                        help="equilibrium-measure witnesses (CSV)")
    sp.add_argument("--map", required=True, help="map JSON file or suite id")
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    sp.set_defaults(func=cmd_julia_sample)

    sp = sub.add_parser("harmonic-sample", parents=[common],
                        help="harmonic-measure hits (CSV + stats JSON)")
    sp.add_argument("--map", required=True, help="map JSON file or suite id")
    sp.add_argument("--walkers", type=int, default=DEFAULT_WALKERS)
    sp.add_argument("--grid", type=_grid_arg, default=(256, 256),
                    metavar="NX,NY")
    sp.add_argument("--bbox", type=_bbox_arg, default=None,
                    metavar="X0,Y0,X1,Y1",
                    help="labeling window (default: witness hull + margin)")
    sp.add_argument("--witnesses", type=int, default=DEFAULT_SAMPLES,
                    help="Julia witnesses used to label the grid")
    sp.set_defaults(func=cmd_harmonic_sample)

    sp = sub.add_parser("lemniscate", parents=[common],
                        help="normalized level-set trace (polyline CSV)")
    sp.add_argument("--map", required=True, help="map JSON file or suite id")
    sp.add_argument("--order", type=int, default=1,
                    help="iterate whose denominator is traced (default 1)")
    sp.add_argument("--grid", type=_grid_arg, default=(256, 256),
                    metavar="NX,NY")
    sp.add_argument("--bbox", type=_bbox_arg, default=None,
                    metavar="X0,Y0,X1,Y1")
    sp.add_argument("--witnesses", type=int, default=DEFAULT_SAMPLES,
                    help="Julia witnesses for the energy estimate")
    sp.add_argument("--checks", action="store_true",
                    help="append the four claim statistics to the report")
    sp.set_defaults(func=cmd_lemniscate)

    sp = sub.add_parser("classify", parents=[common],
                        help="algebraic facts: degrees, special forms, E(f)")
    sp.add_argument("--map", required=True, help="map JSON file or suite id")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verdict", parents=[common],
                        help="full equality-vs-dichotomy report for one map")
    sp.add_argument("--map", required=True, help="map JSON file or suite id")
    sp.add_argument("--config", default=None, metavar="FILE",
                    help="JSON config (seed, samples, walkers, grid, "
                         "tolerances, ...)")
    sp.set_defaults(func=cmd_verdict)

    sp = sub.add_parser("suite", parents=[common],
                        help="verdict over the built-in calibration set (CSV)")
    sp.add_argument("--config", default=None, metavar="FILE")
    sp.set_defaults(func=cmd_suite)

    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (IoError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except RatpotError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
