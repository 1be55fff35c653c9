import json
import math

import pytest

from rcqme import io
from rcqme.cli import SUBCOMMANDS, dispatch, main
from rcqme.config import ConfigError, parse_config


def test_model_only_defaults():
    cfg = parse_config({"model": {}})
    assert cfg.model.delta == 0.1 and cfg.model.omega_L == cfg.model.omega_R == 10.0
    assert cfg.baths.gamma == pytest.approx(0.0071 / math.pi)
    assert (cfg.baths.T_h, cfg.baths.T_c, cfg.baths.cutoff) == (1.0, 0.5, 1000.0)
    assert cfg.solver.M == 4


def test_ladder_defaults():
    cfg = parse_config({"model": {"variant": "ladder"}})
    assert cfg.solver.M == 5
    assert cfg.model_spec().eps == (0.0, 0.5, 1.0)


@pytest.mark.parametrize(
    "raw, path",
    [
        ({"solver": {"M": 1}}, "solver.M"),
        ({"model": {"theta": 2.0}}, "model.theta"),
        ({"model": {"colour": 1}}, "model.colour"),
        ({"bogus": {}}, "bogus"),
        ({"baths": {"T_h": -1}}, "baths.T_h"),
    ],
)
def test_rejections_name_field(raw, path):
    with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
        parse_config(raw)


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config(p)


def test_grid_from_range():
    cfg = parse_config({"experiment": {"axis": "lambda", "start": 1e-3, "stop": 1e-2, "num": 8}})
    assert len(cfg.experiment.grid) == 8
    assert cfg.experiment.grid[-1] == pytest.approx(1e-2)


def test_csv_round_trip_bitwise(tmp_path):
    recs = [{"axis": 0.1, "j_L": 1 / 3, "j_R": -2.5e-300, "residual": 7e-22, "M": 4}]
    path = io.write_csv(recs, tmp_path / "a.csv")
    back = io.read_csv(path)
    assert back[0]["j_L"] == 1 / 3 and back[0]["j_R"] == -2.5e-300


def test_empty_csv_header_only(tmp_path):
    path = io.write_csv([], tmp_path / "e.csv", ["axis", "j_L"])
    assert path.read_bytes() == b"axis,j_L\r\n"
    with pytest.raises(ValueError):
        io.write_csv([], tmp_path / "f.csv")


def test_nan_conventions(tmp_path):
    recs = [{"axis": 1.0, "j_L": float("nan")}]
    assert "nan" in io.emit(recs, "csv", tmp_path / "n.csv").read_text()
    assert json.loads(io.emit(recs, "json", tmp_path / "n.json").read_text())[0]["j_L"] is None
    with pytest.raises(ValueError):
        io.emit(recs, "xml", tmp_path / "n.xml")


def test_ladder_baseline_default(tmp_path):
    (f,) = dispatch({}, "ladder-baseline", tmp_path)
    data = json.loads(f.read_text())
    assert abs(data["current"]) <= 1e-14
    assert data["config"]["model"]["variant"] == "ladder"


def test_run_equal_temperatures(tmp_path):
    (f,) = dispatch({"baths": {"T_h": 0.5, "T_c": 0.5}, "solver": {"M": 3}}, "run", tmp_path)
    data = json.loads(f.read_text())
    assert abs(data["currents"]["L"]) < 1e-13 and abs(data["currents"]["R"]) < 1e-13
    assert data["config"]["solver"]["M"] == 3


def test_sweep_end_to_end(tmp_path):
    raw = {
        "model": {"theta": math.pi / 2},
        "experiment": {"axis": "lambda", "start": 1e-3, "stop": 1e-2, "num": 8, "window": [1e-3, 1e-2]},
    }
    csv_path, json_path = dispatch(raw, "sweep", tmp_path)
    rows = io.read_csv(csv_path)
    assert len(rows) == 8 and list(rows[0]) == ["axis", "j_L", "j_R", "residual", "M"]
    side = json.loads(json_path.read_text())
    assert side["fit"]["slope"] == pytest.approx(2.0, abs=0.05)
    assert side["config"]["experiment"]["axis"] == "lambda"


def test_sweep_idempotent(tmp_path):
    raw = {"solver": {"M": 2}, "experiment": {"axis": "theta", "grid": [0.0, 0.5, 1.0, 1.5]}}
    a = [p.read_text() for p in dispatch(raw, "sweep", tmp_path / "a")]
    b = [p.read_text() for p in dispatch(raw, "sweep", tmp_path / "a")]
    assert a == b


def test_omega_sweep_has_peak(tmp_path):
    raw = {"model": {"theta": 0.0, "delta": 0.0}, "solver": {"M": 3},
           "experiment": {"axis": "omega", "grid": [0.5, 1.0, 2.0, 5.0, 10.0]}}
    _, js = dispatch(raw, "sweep", tmp_path)
    assert "peak" in json.loads(js.read_text())


def test_spectrum_and_coupling_map(tmp_path):
    raw = {"solver": {"M": 2}, "model": {"lambda_L": 0.01, "lambda_R": 0.01}}
    files = dispatch(raw, "spectrum", tmp_path)
    assert len(io.read_csv(files[0])) == 8
    files = dispatch(raw, "coupling-map", tmp_path)
    assert {f.name for f in files} == {"coupling_map_L.csv", "coupling_map_R.csv", "coupling_map.json"}
    assert len(io.read_csv(files[0])) == 64


def test_polaron(tmp_path):
    raw = {"model": {"lambda_L": 0.01, "lambda_R": 0.01}, "solver": {"M": 3}}
    (f,) = dispatch(raw, "polaron", tmp_path)
    data = json.loads(f.read_text())
    assert data["gap_relative_deviation"] < 1e-3
    with pytest.raises(ConfigError):
        dispatch({"model": {"variant": "ladder"}}, "polaron", tmp_path)


def test_converge(tmp_path):
    raw = {"solver": {"M": 2}, "experiment": {"axis": "delta", "grid": [0.1, 0.2], "M_grid": [2, 3]}}
    csv_path, js = dispatch(raw, "converge", tmp_path)
    assert len(io.read_csv(csv_path)) == 4
    assert json.loads(js.read_text())["M_grid"] == [2, 3]


def test_main_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"solver": {"M": 1}}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "solver.M" in capsys.readouterr().err
    cfg.write_text("{}")
    assert main(["--subcommand", "ladder-baseline", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert main([]) == 2
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_main_runtime_failure(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": {"lambda_L": 0.0, "lambda_R": 0.0}, "solver": {"M": 2}}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_unknown_subcommand_dispatch(tmp_path):
    with pytest.raises(ConfigError):
        dispatch({}, "plot", tmp_path)
    assert "plot" not in SUBCOMMANDS
