"""Configuration, file formats, the keyed RNG, and the command-line shell."""

import json

import numpy as np
import pytest

from ratpot import calibration, cli, rng
from ratpot.errors import IoError, ParseError, ValidationError
from ratpot.mapio import (Config, emit_raster, map_from_dict, read_pgm,
                          report_envelope, serialize_map, write_points_csv,
                          write_polylines_csv)
from ratpot.maps import RationalMap


# --------------------------------------------------------------------------
# configuration


def test_config_defaults_pull_frozen_thresholds():
    cfg = Config()
    assert cfg.tolerances["tau_spread"] == calibration.TAU_SPREAD
    assert cfg.tolerances["discrepancy_band"] == calibration.DISCREPANCY_BAND


def test_config_round_trip():
    cfg = Config(seed=7, samples=12_345, grid=(64, 48),
                 bbox=(-1.0, -2.0, 3.0, 4.0), depth=17)
    back = Config.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert back.to_dict() == cfg.to_dict()


def test_config_seed_is_masked_to_64_bits():
    assert Config(seed=-1).seed == 2**64 - 1
    assert Config(seed=2**64 + 5).seed == 5


@pytest.mark.parametrize("kw", [
    dict(grid=(4, 4)),
    dict(grid=(256,)),
    dict(bbox=(2.0, 0.0, -2.0, 1.0)),
    dict(bbox=(0.0, 0.0, 1.0)),
    dict(samples=0),
    dict(burn_in=3),
    dict(depth=0),
    dict(tolerances={"tau_spread": -1.0}),
    dict(tolerances={"tau_spread": float("nan")}),
])
def test_config_rejects_bad_values(kw):
    with pytest.raises(ValidationError):
        Config(**kw)


def test_config_rejects_unknown_keys():
    with pytest.raises(ParseError):
        Config.from_dict({"samples": 10, "junk": 1})


# --------------------------------------------------------------------------
# map files


def test_map_serialization_round_trip():
    f = RationalMap([1 + 2j, 0, 0.5], [3, 1], name="demo")
    g = map_from_dict(json.loads(json.dumps(serialize_map(f))))
    assert np.allclose(g.numerator.coeffs, f.numerator.coeffs)
    assert np.allclose(g.denominator.coeffs, f.denominator.coeffs)
    assert g.name == "demo"


@pytest.mark.parametrize("doc", [
    [],
    {"numerator": [[1, 0]]},
    {"numerator": [[1, 0], [0, 0], [1, 0]], "denominator": "zzz"},
    {"numerator": [[1, 0], [0, 0], [1, 0]], "denominator": [[1]]},
])
def test_map_files_are_validated(doc):
    with pytest.raises(ParseError):
        map_from_dict(doc)


# --------------------------------------------------------------------------
# rasters and CSV


def test_raster_pixels_match_oracle(tmp_path, oracle):
    path = tmp_path / "ramp.pgm"
    emit_raster(np.array([[0.0, 1.0], [2.0, 3.0]]), path)
    arr, maxval = read_pgm(path)
    assert maxval == 65535
    assert arr.flatten().tolist() == oracle["raster_2x2_pixels"]
    sidecar = json.loads((tmp_path / "ramp.pgm.json").read_text())
    assert sidecar["min"] == 0.0 and sidecar["max"] == 3.0


def test_raster_constant_field_is_black(tmp_path):
    path = tmp_path / "flat.pgm"
    emit_raster(np.full((8, 8), 2.5), path)
    arr, _ = read_pgm(path)
    assert not arr.any()


def test_raster_rejects_non_finite(tmp_path):
    with pytest.raises(ValidationError):
        emit_raster(np.array([[0.0, np.inf]]), tmp_path / "bad.pgm")


def test_raster_round_trip_shape(tmp_path):
    field = np.arange(35.0).reshape(5, 7)
    path = tmp_path / "r.pgm"
    emit_raster(field, path)
    arr, _ = read_pgm(path)
    assert arr.shape == (5, 7)
    assert arr[0, 0] == 0 and arr[-1, -1] == 65535


def test_points_csv_format(tmp_path):
    path = tmp_path / "pts.csv"
    write_points_csv(path, [1 + 2j, -0.5j], [0.5, 0.5])
    lines = path.read_text().splitlines()
    assert lines[0] == "re,im,weight"
    re, im, w = (float(v) for v in lines[1].split(","))
    assert (re, im, w) == (1.0, 2.0, 0.5)
    assert len(lines) == 3


def test_polylines_csv_format(tmp_path):
    path = tmp_path / "curve.csv"
    write_polylines_csv(path, [[0j, 1j], [2.0 + 0j]])
    lines = path.read_text().splitlines()
    assert lines[0] == "polyline,re,im"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["0", "0", "1"]


def test_report_envelope_schema():
    env = report_envelope({"kind": "demo"}, Config(seed=3))
    assert env["schema_version"] == "brolin-report/1"
    assert env["config"]["seed"] == 3
    assert env["payload"] == {"kind": "demo"}
    assert "tool_version" in env and "timings" in env


# --------------------------------------------------------------------------
# keyed counter RNG


def test_rng_matches_golden_vectors(rng_golden):
    for entry in rng_golden["streams"]:
        seed, sid = entry["seed"], entry["stream_id"]
        assert f'{rng.stream_key(seed, sid):016x}' == entry["key_hex"]
        s = rng.rng_stream(seed, sid)
        got = [s.uniform() for _ in range(len(entry["doubles"]))]
        assert got == entry["doubles"]


def test_rng_streams_are_independent():
    a = rng.rng_stream(42, 0).uniform(64)
    b = rng.rng_stream(42, 1).uniform(64)
    assert not np.any(a == b)


def test_rng_vector_draws_match_scalar_draws(rng_golden):
    doubles = rng_golden["streams"][0]["doubles"]
    block = rng.rng_stream(42, 0).uniform(len(doubles))
    assert block.tolist() == doubles


def test_rng_normals_are_deterministic_and_sane():
    z = rng.rng_stream(5, 9).standard_normal(4_000)
    z2 = rng.rng_stream(5, 9).standard_normal(4_000)
    assert np.array_equal(z, z2)
    assert abs(z.mean()) < 0.05 and abs(z.std() - 1.0) < 0.05


# --------------------------------------------------------------------------
# command-line shell (in-process)


def test_cli_classify_writes_envelope(tmp_path, capsys):
    out = tmp_path / "c.json"
    code = cli.main(["classify", "--map", "2/(z-1)^3+1", "--out", str(out)])
    assert code == 0
    assert "degree 3" in capsys.readouterr().out
    env = json.loads(out.read_text())
    assert env["schema_version"] == "brolin-report/1"
    assert env["payload"]["is_square_poly"] is True


def test_cli_escape_rate_raster(tmp_path):
    out = tmp_path / "field.pgm"
    code = cli.main(["escape-rate", "--map", "z^2", "--grid", "32,32",
                     "--bbox", "-2,-2,2,2", "--out", str(out)])
    assert code == 0
    arr, _ = read_pgm(out)
    assert arr.shape == (32, 32)
    assert (tmp_path / "field.pgm.json").exists()
    assert (tmp_path / "field.report.json").exists()


def test_cli_julia_sample_csv(tmp_path):
    out = tmp_path / "julia.csv"
    code = cli.main(["julia-sample", "--map", "1/z^2", "--samples", "500",
                     "--seed", "4", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "re,im,weight"
    assert len(lines) == 501
    pts = np.array([complex(*map(float, ln.split(",")[:2])) for ln in lines[1:]])
    assert np.max(np.abs(np.abs(pts) - 1.0)) < 1e-5


def test_cli_suite_is_byte_identical(tmp_path):
    cfg = tmp_path / "fast.json"
    cfg.write_text(json.dumps(
        {"samples": 10_000, "walkers": 2_000, "grid": [128, 128]}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["suite", "--config", str(cfg), "--out", str(a)]) == 0
    assert cli.main(["suite", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert len(rows) == 7  # header + six catalog maps


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["escape-rate", "--map", "z^2"]) == 2          # no --out
    assert cli.main(["classify", "--map", "zzz^9"]) == 4           # no such map or file
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["classify", "--map", str(bad)]) == 2          # mangled map file
    linear = tmp_path / "deg1.json"
    linear.write_text(json.dumps(
        {"numerator": [[1, 0], [1, 0]], "denominator": [[1, 0]]}))
    assert cli.main(["classify", "--map", str(linear)]) == 2       # degree < 2
    capsys.readouterr()


def test_cli_rejects_malformed_grid():
    with pytest.raises(SystemExit) as err:
        cli.main(["escape-rate", "--map", "z^2", "--grid", "32xx", "--out", "x.pgm"])
    assert err.value.code == 2
