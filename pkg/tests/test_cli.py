import csv
import json

import pytest
import yaml

from pooltile.cli import SWEEP_HEADER, main

LARGE_JZ = "IXY IYX XYI XIY YXI YIX ZXY YZX YXZ XZY ZYX XYZ".split()


def write_config(tmp_path, data, name="c.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_harvest_small_tile(tmp_path, capsys):
    cfg = write_config(tmp_path, {"lattice": {"kind": "chain", "shape": [3], "j_z": 0.5}, "trials": 3})
    assert main(["harvest", "--config", cfg, "--out", str(tmp_path / "h"), "--seed", "4"]) == 0
    tiles = (tmp_path / "h" / "tiles.txt").read_text().splitlines()
    assert tiles[0] == "# shape: 3"
    summary = json.loads((tmp_path / "h" / "harvest.json").read_text())
    assert summary["resolved_config"]["seed"] == 4
    assert summary["resolved_config"]["adapt"]["epsilon"] == 0.01
    assert summary["steps_per_trial"] == [3, 3, 3]
    assert len(list((tmp_path / "h" / "records").glob("trial_*.json"))) == 3


def test_harvest_single_trial_equals_run(tmp_path):
    cfg = write_config(tmp_path, {"lattice": {"kind": "chain", "shape": [3], "j_z": 1.5}})
    assert main(["harvest", "--config", cfg, "--out", str(tmp_path), "--trials", "1"]) == 0
    rec = json.loads((tmp_path / "records" / "trial_000.json").read_text())["record"]
    tiles = (tmp_path / "tiles.txt").read_text().splitlines()[1:]
    assert tiles == [s["selected"] for s in rec["steps"]]


def test_solve_with_tile_file(tmp_path):
    (tmp_path / "tiles.txt").write_text("# shape: 3\n" + "\n".join(LARGE_JZ) + "\n")
    cfg = write_config(tmp_path, {"lattice": {"shape": [6], "j_z": 1.0},
                                  "pool": {"source": "tiles", "path": "tiles.txt"}})
    out = tmp_path / "s"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    data = json.loads((out / "record.json").read_text())
    assert data["record"]["relative_error"] < 6e-4
    assert data["resolved_config"]["adapt"]["optimizer"]["gtol"] == 1e-8
    header = (out / "trace.csv").read_text().splitlines()[0]
    assert header == "step,energy,max_abs_gradient,selected_operator"


def test_solve_is_reproducible(tmp_path):
    cfg = write_config(tmp_path, {"lattice": {"shape": [4], "j_z": 0.5},
                                  "pool": {"source": "explicit",
                                           "operators": ["XYII", "IXYI", "IIXY", "ZXYI", "IZXY"]}})
    for d in ("a", "b"):
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / d), "--seed", "3"]) == 0
    recs = [json.loads((tmp_path / d / "record.json").read_text()) for d in ("a", "b")]
    for r in recs:
        r["record"].pop("wall_time")
    assert recs[0] == recs[1]


def test_sweep_header_and_rows(tmp_path):
    cfg = write_config(tmp_path, {"geometries": [4, [2, 2]], "j_z": [1.0], "pool": {"trials": 10}})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "sweep.csv")))
    assert [r["geometry"] for r in rows] == ["4", "2x2"]
    assert all(float(r["relative_error"]) < 6e-4 for r in rows)


def test_sweep_empty_geometry_list(tmp_path):
    assert main(["sweep", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "sweep.csv").read_text() == ",".join(SWEEP_HEADER) + "\n"


def test_sweep_records_cell_failure(tmp_path, monkeypatch):
    import pooltile.cli as cli
    from pooltile.lattice import EigensolverError

    real = cli.exact_ground_energy

    def flaky(h, *a, **k):
        if h.n_qubits == 4:
            raise EigensolverError("no convergence", -1.0, 1.0)
        return real(h, *a, **k)

    monkeypatch.setattr(cli, "exact_ground_energy", flaky)
    cfg = write_config(tmp_path, {"geometries": [3, 4, 5], "pool": {"trials": 5}})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2
    rows = list(csv.DictReader(open(tmp_path / "sweep.csv")))
    assert [r["error"] == "" for r in rows] == [True, False, True]
    assert "EigensolverError" in rows[1]["error"]


def test_sweep_config_error_aborts(tmp_path):
    cfg = write_config(tmp_path, {"geometries": [3, 4], "pool": {"source": "explicit", "operators": LARGE_JZ}})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_certify(tmp_path):
    cfg = write_config(tmp_path, {"tiles": {"labels": LARGE_JZ}, "targets": [3, 4]})
    assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 0
    reports = json.loads((tmp_path / "certify.json").read_text())["reports"]
    assert [r["complete"] for r in reports] == [True, True]
    assert [r["sector_size"] for r in reports] == [12, 56]


def test_certify_single_operator(tmp_path):
    cfg = write_config(tmp_path, {"tiles": {"labels": ["XYI"]}, "targets": [3]})
    assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "certify.json").read_text())["reports"][0]
    assert rep["complete"] is False and len(rep["missing"]) == 11


def test_exact(tmp_path):
    cfg = write_config(tmp_path, {"lattice": {"kind": "grid", "shape": [2, 2], "j_z": 1.0}})
    assert main(["exact", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "exact.json").read_text())["exact_energy"] == pytest.approx(-8.0)


@pytest.mark.parametrize("argv", [["solve", "--bogus"], ["nothing"], []])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


@pytest.mark.parametrize("data", [{"nope": 1}, {"lattice": {"kind": "ring", "shape": [4]}},
                                  {"lattice": {"shape": [2, 2]}}, {"pool": {"source": "magic"}},
                                  {"adapt": {"epsilon": -1}}, {"lattice": 5}])
def test_config_errors(tmp_path, data):
    cfg = write_config(tmp_path, data)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_missing_config_file(tmp_path):
    assert main(["exact", "--config", str(tmp_path / "absent.yaml"), "--out", str(tmp_path)]) == 1


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    import pooltile.cli as cli
    from pooltile.lattice import EigensolverError

    def fail(*a, **k):
        raise EigensolverError("no convergence", -1.0, 1.0)

    monkeypatch.setattr(cli, "exact_ground_energy", fail)
    assert main(["exact", "--out", str(tmp_path)]) == 2
