import json

import numpy as np
import pytest

from sgmap.cli import main
from sgmap.model import ObservationSet, SimScenario
from sgmap.simulation import parse_table3_csv


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(SimScenario(3, 8, (0, 4, 8), tau=3.0, replications=20, seed=5).to_dict()))
    return str(path)


def test_estimate(tmp_path, capsys):
    data = tmp_path / "y.csv"
    data.write_text(ObservationSet([[9.0, 0.1, 0.2], [0.1, 0.0, 0.3]], 1.0).to_csv())
    assert main(["estimate", "--data", str(data), "--config", '{"preset": "binomial", "gamma": 4.0}']) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["m0_hat"] == 1 and out["selected"] == [0]
    np.testing.assert_array_equal(out["estimate"], [[9.0, 0, 0], [0, 0, 0]])


def test_tune_writes_surface(tmp_path, scenario_file):
    out = tmp_path / "tune.json"
    main(["tune", "--scenario", scenario_file, "--grid", "l1=0:2:1,l2=0:1:1", "--out", str(out)])
    res = json.loads(out.read_text())
    assert res["mode"] == "full" and res["grid_points"] == 6
    surface = (tmp_path / "tune.grid.csv").read_text().splitlines()
    assert len(surface) == 7


def test_simulate_csv_and_json(scenario_file, capsys):
    main(["simulate", "--scenario", scenario_file, "--estimator", "map-binomial", "--reps", "10"])
    reports = parse_table3_csv(capsys.readouterr().out)
    assert len(reports) == 1 and reports[0].replications == 10
    main(["simulate", "--scenario", scenario_file, "--estimator", '{"kind": "zero"}', "--format", "json"])
    assert json.loads(capsys.readouterr().out)["estimator"] == "zero"


def test_simulate_threads_identical(scenario_file, capsys):
    main(["simulate", "--scenario", scenario_file, "--estimator", "map-geometric", "--threads", "1"])
    one = capsys.readouterr().out
    main(["simulate", "--scenario", scenario_file, "--estimator", "map-geometric", "--threads", "3"])
    assert capsys.readouterr().out == one


def test_table3(tmp_path):
    out = tmp_path / "t3.csv"
    main(["table3", "--reps", "100", "--grid", "l1=0:20:4,l2=0:2:1", "--out", str(out)])
    reports = parse_table3_csv(out.read_text())
    assert len(reports) == 12
    assert {r.gamma for r in reports} == {1.0, 9.0, 25.0}


def test_table2(capsys):
    main(["table2", "--reps", "20", "--grid", "l1=0:12:6,l2=0:1:1", "--format", "json"])
    rows = json.loads(capsys.readouterr().out)
    assert [r["gamma"] for r in rows] == [1.0, 9.0, 25.0]


def test_rate_sweep(capsys):
    main(["rate-sweep", "--n", "16,32", "--m", "8", "--reps", "5"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("m,n,m0,eta") and len(lines) == 1 + 2 * 2  # m0 in {1, 4}


def test_bad_arguments():
    with pytest.raises(SystemExit):
        main(["simulate"])
    with pytest.raises(SystemExit):
        main(["table3", "--threads", "0"])
