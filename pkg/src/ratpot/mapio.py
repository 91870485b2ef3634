"""File formats, configuration, and the report envelope.

Everything that crosses a process boundary lives here: map files and
run configuration come in as JSON (complex numbers are always [re, im]
pairs, never strings), point clouds and suite summaries go out as CSV,
scalar fields go out as 16-bit binary PGM rasters with a JSON sidecar
recording the affine rescale.  All emission is deterministic: floats
are printed with %.17g, rasters are big-endian, and nothing writes a
timestamp into a CSV, which is what makes same-seed runs byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .errors import IoError, ParseError, ValidationError
from .maps import Poly, RationalMap
from .rng import rng_stream  # re-exported: the I/O layer owns the RNG policy

SCHEMA_VERSION = "brolin-report/1"

# every named tolerance knob, with its package-wide default
DEFAULT_TOLERANCES = {
    "tau_lead": 1e-12,
    "tau_res": 1e-12,
    "tau_gcd": 1e-9,
    "tau_form": 1e-8,
    "chordal_match": 1e-6,
    "root_tol": 1e-12,
    "cluster_radius": 1e-6,
    "escape_tol": 1e-12,
    "delta_inf": 0.05,
    "trace_tol": 1e-3,
    "normalization_tol": 1e-6,
    "tau_spread": None,  # filled from calibration at Config build time
    "discrepancy_band": None,
}


def fmt17(x) -> str:
    """Shortest-faithful decimal for CSV cells (%.17g)."""
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# configuration


@dataclass
class Config:
    """Run configuration echoed verbatim into every report."""

    seed: int = 0
    samples: int = 10_000
    walkers: int = 20_000
    depth: int | None = None
    burn_in: int = 48
    grid: tuple = (256, 256)
    bbox: tuple | None = None
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    threads: int | None = None

    def __post_init__(self):
        from . import calibration

        base = dict(DEFAULT_TOLERANCES)
        base["tau_spread"] = calibration.TAU_SPREAD
        base["discrepancy_band"] = calibration.DISCREPANCY_BAND
        base.update(self.tolerances or {})
        self.tolerances = base
        for name, value in self.tolerances.items():
            try:
                ok = value is not None and np.isfinite(value) and value > 0
            except TypeError:
                ok = False
            if not ok:
                raise ValidationError(f"tolerance {name} must be positive, got {value}")
            self.tolerances[name] = float(value)
        self.samples = int(self.samples)
        self.walkers = int(self.walkers)
        self.burn_in = int(self.burn_in)
        if self.samples < 1 or self.walkers < 1:
            raise ValidationError("samples and walkers must be >= 1")
        if self.burn_in < 10:
            raise ValidationError("burn_in must be >= 10")
        if len(self.grid) != 2:
            raise ValidationError("grid must be a [nx, ny] pair")
        nx, ny = (int(v) for v in self.grid)
        if nx < 8 or ny < 8:
            raise ValidationError("grid must be at least 8x8")
        self.grid = (nx, ny)
        if self.bbox is not None:
            if len(self.bbox) != 4:
                raise ValidationError("bbox must be [x0, y0, x1, y1]")
            x0, y0, x1, y1 = (float(v) for v in self.bbox)
            if not (x1 > x0 and y1 > y0):
                raise ValidationError("bounding box is degenerate")
            self.bbox = (x0, y0, x1, y1)
        if self.depth is not None:
            self.depth = int(self.depth)
            if self.depth < 1:
                raise ValidationError("depth must be >= 1")
        self.seed = int(self.seed) & 0xFFFFFFFFFFFFFFFF

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "walkers": self.walkers,
            "depth": self.depth,
            "burn_in": self.burn_in,
            "grid": list(self.grid),
            "bbox": list(self.bbox) if self.bbox is not None else None,
            "tolerances": dict(self.tolerances),
            "out": self.out,
            "threads": self.threads,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        if not isinstance(d, dict):
            raise ParseError("config must be a JSON object")
        known = {
            "seed", "samples", "walkers", "depth", "burn_in",
            "grid", "bbox", "tolerances", "out", "threads",
        }
        unknown = set(d) - known
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(d)
        if "grid" in kw and kw["grid"] is not None:
            kw["grid"] = tuple(kw["grid"])
        if "bbox" in kw and kw["bbox"] is not None:
            kw["bbox"] = tuple(kw["bbox"])
        return cls(**kw)


def load_config(path) -> Config:
    return Config.from_dict(_read_json(path))


def load_tolerances(path) -> dict:
    """Tolerance overrides from a JSON file (merged over defaults later)."""
    d = _read_json(path)
    if not isinstance(d, dict):
        raise ParseError("tolerance file must be a JSON object")
    bad = set(d) - set(DEFAULT_TOLERANCES)
    if bad:
        raise ParseError(f"unknown tolerance names: {sorted(bad)}")
    return d


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as e:
        raise IoError(str(e)) from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e}") from e


# --------------------------------------------------------------------------
# map files


def _pairs_to_coeffs(pairs, what: str) -> np.ndarray:
    if not isinstance(pairs, list) or len(pairs) == 0:
        raise ParseError(f"{what} must be a non-empty list of [re, im] pairs")
    out = np.empty(len(pairs), dtype=np.complex128)
    for i, p in enumerate(pairs):
        if not (isinstance(p, list) and len(p) == 2):
            raise ParseError(f"{what}[{i}] is not an [re, im] pair")
        try:
            out[i] = complex(float(p[0]), float(p[1]))
        except (TypeError, ValueError) as e:
            raise ParseError(f"{what}[{i}]: {e}") from e
    return out


def map_from_dict(d: dict) -> RationalMap:
    if not isinstance(d, dict):
        raise ParseError("map file must be a JSON object")
    for key in ("numerator", "denominator"):
        if key not in d:
            raise ParseError(f"map file is missing {key!r}")
    num = _pairs_to_coeffs(d["numerator"], "numerator")
    den = _pairs_to_coeffs(d["denominator"], "denominator")
    name = d.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name must be a string")
    return RationalMap(num, den, name=name)


def parse_map_file(path) -> RationalMap:
    """Validated RationalMap from a JSON map file."""
    return map_from_dict(_read_json(path))


def _coeffs_to_pairs(coeffs) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(coeffs)]


def serialize_map(f: RationalMap) -> dict:
    d = {
        "numerator": _coeffs_to_pairs(f.numerator.coeffs),
        "denominator": _coeffs_to_pairs(f.denominator.coeffs),
    }
    if f.name is not None:
        d["name"] = f.name
    return d


def write_map_file(path, f: RationalMap) -> None:
    _write_json(path, serialize_map(f))


# --------------------------------------------------------------------------
# rasters


def emit_raster(values, path, sidecar_path=None) -> None:
    """16-bit binary PGM of a real 2-d field, plus a {min, max} sidecar.

    The affine rescale maps [min, max] onto [0, 65535]; a constant field
    comes out all zero.  Rows are written in array order (the CLI puts
    the top of the picture in row 0).  Output bytes are platform
    independent: big-endian samples, %.17g sidecar floats.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2 or v.size == 0:
        raise ValidationError("raster values must be a non-empty 2-d array")
    if not np.all(np.isfinite(v)):
        raise ValidationError("raster values must be finite")
    vmin = float(v.min())
    vmax = float(v.max())
    if vmax > vmin:
        scaled = np.round((v - vmin) / (vmax - vmin) * 65535.0)
    else:
        scaled = np.zeros_like(v)
    pix = scaled.astype(">u2")
    ny, nx = v.shape
    header = f"P5\n{nx} {ny}\n65535\n".encode("ascii")
    sidecar = {"min": vmin, "max": vmax}
    if sidecar_path is None:
        sidecar_path = str(path) + ".json"
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(pix.tobytes())
        _write_json(sidecar_path, sidecar)
    except OSError as e:
        raise IoError(str(e)) from e


def read_pgm(path):
    """(values uint16 array, maxval) of a binary P5 file; for round-trips."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise IoError(str(e)) from e
    if not data.startswith(b"P5"):
        raise ParseError("not a binary PGM file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    nx, ny, maxval = fields
    dtype = ">u2" if maxval > 255 else np.uint8
    arr = np.frombuffer(data, dtype=dtype, count=nx * ny, offset=pos)
    return arr.reshape(ny, nx).astype(np.uint16), maxval


# --------------------------------------------------------------------------
# CSV emission


def write_points_csv(path, points, weights) -> None:
    pts = np.asarray(points, dtype=np.complex128).ravel()
    w = np.asarray(weights, dtype=np.float64).ravel()
    lines = ["re,im,weight"]
    for p, wi in zip(pts, w):
        lines.append(f"{fmt17(p.real)},{fmt17(p.imag)},{fmt17(wi)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_polylines_csv(path, polylines) -> None:
    lines = ["polyline,re,im"]
    for k, poly in enumerate(polylines):
        for v in np.asarray(poly, dtype=np.complex128):
            lines.append(f"{k},{fmt17(v.real)},{fmt17(v.imag)}")
    _write_text(path, "\n".join(lines) + "\n")


SUITE_CSV_COLUMNS = [
    "map_id", "d", "is_poly", "is_square_poly",
    "special_a_re", "special_a_im", "special_b_re", "special_b_im",
    "infinity_in_fatou", "energy", "base_height",
    "spread", "discrepancy", "consistent", "verdict",
]


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt17(v)
    return str(v)


def suite_csv_text(rows: list) -> str:
    """Suite summary table as CSV text; rows are dicts keyed by SUITE_CSV_COLUMNS."""
    lines = [",".join(SUITE_CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(col)) for col in SUITE_CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_suite_csv(path, rows: list) -> None:
    _write_text(path, suite_csv_text(rows))


# --------------------------------------------------------------------------
# report envelope


def report_envelope(payload, config: Config | None, timings: dict | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": config.to_dict() if config is not None else None,
        "timings": timings or {},
        "payload": payload,
    }


def write_report(path, envelope: dict) -> None:
    _write_json(path, envelope)


# --------------------------------------------------------------------------
# shared writers


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        # before the int branch: Python bool is an int subclass
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    return obj


def _write_json(path, obj) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_jsonify(obj), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as e:
        raise IoError(str(e)) from e


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise IoError(str(e)) from e
