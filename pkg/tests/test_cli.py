from __future__ import annotations

import json

import pytest

from barge_alns.cli import main


@pytest.fixture
def tiny_file(tmp_path):
    path = tmp_path / "inst.json"
    assert main(["generate", "--tiny", "fe", "--seed", "1", "-o", str(path)]) == 0
    return path


def test_generate_preset(tmp_path):
    path = tmp_path / "row1.json"
    assert main(["generate", "--row", "1", "--topology", "inland", "--seed", "2", "-o", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert len(doc["orders_f"]) == 13


def test_solve_same_seed_same_bytes(tmp_path, tiny_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    stats, weights = tmp_path / "it.csv", tmp_path / "w.csv"
    args = ["solve", str(tiny_file), "--seed", "3", "--iter-max", "40"]
    assert main(args + ["-o", str(a), "--stats", str(stats), "--weights", str(weights)]) == 0
    assert main(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert stats.read_text().startswith("iter,")
    doc = json.loads(a.read_text())
    assert doc["loss"]["total"] <= doc["initial_loss"]


def test_validate_and_report(tmp_path, tiny_file):
    sol = tmp_path / "s.json"
    main(["solve", str(tiny_file), "--iter-max", "20", "-o", str(sol)])
    out = tmp_path / "v.json"
    assert main(["validate", str(tiny_file), str(sol), "--check-schedule", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["feasible"] is True
    svg, gj = tmp_path / "m.svg", tmp_path / "m.geojson"
    assert main(["report", str(sol), str(tiny_file), "--svg", str(svg), "--geojson", str(gj)]) == 0
    assert svg.read_text().startswith("<svg")
    assert json.loads(gj.read_text())["type"] == "FeatureCollection"


def test_validate_violation(tmp_path, tiny_file):
    sol = tmp_path / "s.json"
    main(["solve", str(tiny_file), "--iter-max", "20", "-o", str(sol)])
    doc = json.loads(sol.read_text())
    routes = doc["solution"]["routes"]
    busy = next(i for i, r in enumerate(routes) if r)
    routes[busy] = routes[busy][::-1]
    doc.pop("schedule")
    sol.write_text(json.dumps(doc))
    assert main(["validate", str(tiny_file), str(sol), "-o", str(tmp_path / "v.json")]) == 2


def test_oracle_and_mip(tmp_path, tiny_file):
    out = tmp_path / "o.json"
    assert main(["oracle", str(tiny_file), "-o", str(out)]) == 0
    lp = tmp_path / "m.lp"
    assert main(["export-mip", str(tiny_file), "-o", str(lp)]) == 0
    assert lp.read_text().startswith("\\ ")
    assert main(["export-mip", str(tiny_file), "--max-variables", "5", "-o", str(lp)]) == 1


def test_benchmark(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["benchmark", "--rows", "1", "--repeats", "2", "--max-iterations", "5", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 2 + 3


def test_errors(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["validate", str(bad), str(bad)]) == 1
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["nope"])


def test_penalties_flag(tmp_path, tiny_file):
    out = tmp_path / "s.json"
    assert main(["solve", str(tiny_file), "--iter-max", "5", "--penalties", "1,1,1", "-o", str(out)]) in (0, 2)
    assert main(["solve", str(tiny_file), "--penalties", "1,2", "-o", str(out)]) == 1
