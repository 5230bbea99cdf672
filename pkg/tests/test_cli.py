from __future__ import annotations

import json

import pytest

from critset.cli import EXIT_FAILED, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_REFUSED, main
from critset.gapset import cantor_gapset, make_gapset


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def _read(path):
    return json.loads(path.read_text())


def test_classify_cantor(tmp_path):
    src = _write(tmp_path / "a.json", cantor_gapset(1 / 3, 16).to_json())
    out = tmp_path / "r.json"
    assert main(["classify", "--input", src, "--output", str(out), "--t", "1.5", "1.7"]) == EXIT_OK
    report = _read(out)
    assert report["degree_estimate"] == pytest.approx(1.585, abs=0.02)
    assert report["is_zero_k"] == {"1.5": True, "1.7": False}


def test_classify_full_interval(tmp_path):
    src = _write(tmp_path / "a.json", make_gapset(0, 1).to_json())
    out = tmp_path / "r.json"
    assert main(["classify", "--input", src, "--output", str(out)]) == EXIT_OK
    report = _read(out)
    assert report["measure"] == 1.0 and not any(report["is_zero_k"].values())


def test_classify_finitely_many_gaps(tmp_path):
    src = _write(tmp_path / "a.json", make_gapset(0, 1, [[0.2, 0.5]]).to_json())
    out = tmp_path / "r.json"
    assert main(["classify", "--input", src, "--output", str(out)]) == EXIT_OK
    assert _read(out)["degree_estimate"] == "infinity"


def test_classify_inconclusive(tmp_path):
    src = _write(tmp_path / "a.json", make_gapset(0, 1, [[0.2, 0.3]], tail_bound=0.9).to_json())
    assert main(["classify", "--input", src, "--output", str(tmp_path / "r.json")]) == EXIT_INCONCLUSIVE


def test_classify_malformed(tmp_path):
    src = _write(tmp_path / "a.json", {"hull": [0, 1], "gaps": [[0.2, 0.4], [0.3, 0.5]]})
    assert main(["classify", "--input", src]) == EXIT_INPUT
    bad = tmp_path / "b.json"
    bad.write_text("{not json")
    assert main(["classify", "--input", str(bad)]) == EXIT_INPUT


def test_same_input_and_output_rejected(tmp_path):
    src = _write(tmp_path / "a.json", make_gapset(0, 1).to_json())
    assert main(["classify", "--input", src, "--output", src]) == EXIT_INPUT


def test_curve_modulus(tmp_path):
    out = tmp_path / "c.json"
    assert main(["curve", "--mode", "modulus", "--n", "2", "--budget", "20000", "--output", str(out)]) == EXIT_OK
    report = _read(out)
    assert report["K_empirical"] <= 32 and report["violations"] == 0


def test_curve_encode_decode(tmp_path):
    out = tmp_path / "c.json"
    assert main(["curve", "--mode", "encode", "--n", "2", "--level", "4", "--index", "0", "--output", str(out)]) == 0
    cube = _read(out)["cube"]
    assert cube == {"level": 2, "corner": [0, 0]}
    assert main(["curve", "--mode", "encode", "--n", "2", "--level", "4", "--index", "5", "--output", str(out)]) == 0
    corner = _read(out)["cube"]["corner"]
    assert main(["curve", "--mode", "decode", "--n", "2", "--level", "2", "--corner", *map(str, corner),
                 "--output", str(out)]) == 0
    assert _read(out)["interval"] == {"level": 4, "index": 5}


def test_curve_roundtrip(tmp_path):
    out = tmp_path / "c.json"
    assert main(["curve", "--mode", "roundtrip", "--n", "2", "--level", "4", "--output", str(out)]) == EXIT_OK
    # level-4 intervals map to level-2 cubes: 16 of them
    assert _read(out)["mismatches"] == 0 and _read(out)["intervals"] == 16


def test_curve_level_overflow():
    assert main(["curve", "--mode", "encode", "--n", "2", "--level", "70"]) == EXIT_INPUT


def test_curve_point(tmp_path):
    out = tmp_path / "c.json"
    assert main(["curve", "--mode", "point", "--n", "2", "--t", "1.0", "--output", str(out)]) == EXIT_OK
    assert _read(out)["point"] == pytest.approx([1.0, 0.0])


@pytest.fixture
def config(tmp_path):
    return _write(tmp_path / "cfg.json", {"n": 1, "s": 1.4, "depth": 6, "seed": 0, "sample_budget": 600,
                                          "target": {"cantor": {"ratio": 1 / 3}}})


def test_verify_passes_and_is_deterministic(tmp_path, config):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--input", config, "--output", str(a)]) == EXIT_OK
    assert main(["verify", "--input", config, "--output", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert _read(a)["pass"] is True


def test_verify_full_interval_refused(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {"n": 1, "s": 1.4, "depth": 3, "target": make_gapset(0, 1).to_json()})
    assert main(["verify", "--input", cfg, "--output", str(tmp_path / "r.json")]) == EXIT_REFUSED


def test_verify_depth_zero_structural(tmp_path, config):
    out = tmp_path / "r.json"
    assert main(["verify", "--input", config, "--depth", "0", "--output", str(out)]) == EXIT_OK
    names = {e["name"] for e in _read(out)["entries"]}
    assert "mapping" in names and not any(n.startswith("holder") for n in names)


def test_verify_failure_exit_code(tmp_path):
    # explicit gaps stop above the evaluation cap, so the diameter chain breaks
    cfg = _write(tmp_path / "cfg.json", {"n": 1, "s": 1.4, "depth": 4, "sample_budget": 0,
                                         "target": {"cantor": {"ratio": 1 / 3, "depth": 3}}})
    out = tmp_path / "r.json"
    assert main(["verify", "--input", cfg, "--output", str(out)]) == EXIT_FAILED
    assert "diameter_chain" in _read(out)["failed"]


def test_verify_missing_s(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {"n": 1, "depth": 2})
    assert main(["verify", "--input", cfg]) == EXIT_INPUT


def test_sample_csv(tmp_path, config):
    out = tmp_path / "g.csv"
    assert main(["sample", "--input", config, "--depth", "2", "--grid", "5", "--output", str(out)]) == EXIT_OK
    data = out.read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert lines[0] == "x1,f,grad_norm" and len(lines) == 6
    assert [float(v) for v in lines[1].split(",")] == [-0.5, 0.0, 0.0]


def test_verify_grid_output(tmp_path, config):
    grid = tmp_path / "g.csv"
    out = tmp_path / "r.json"
    assert main(["verify", "--input", config, "--depth", "1", "--budget", "0", "--grid", "3",
                 "--output", str(out), "--grid-output", str(grid)]) == EXIT_OK
    assert len(grid.read_text().splitlines()) == 4


def test_build_dump(tmp_path, config):
    out = tmp_path / "b.json"
    assert main(["build", "--input", config, "--depth", "2", "--output", str(out)]) == EXIT_OK
    dump = _read(out)
    assert dump["constants"]["P"] == 1 and dump["tree"]["nodes"][0]["address"] == []
