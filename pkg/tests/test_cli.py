import csv
import io
import json
import math
import subprocess
import sys

import pytest

from starnoma.cli import main
from starnoma.cli.config import config_from_dict, config_to_dict, load_config
from starnoma.cli.main import COLUMNS, SweepRequest, parse_snr_range, sweep_rows
from starnoma.errors import ConfigError
from starnoma.scenario import ScenarioKind, default_config

CEILING = math.log2(1 + 7 / 3)


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def exit_code(args):
    # argparse reports usage errors through SystemExit
    try:
        return main(args)
    except SystemExit as exc:
        return exc.code


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_analytic_sweep_shape(capsys):
    assert main(["sweep", "--snr-db", "60:160:5"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 42
    assert list(rows[0]) == list(COLUMNS)
    assert [r["snr_db"] for r in rows[:4]] == ["60", "60", "65", "65"]
    far = [float(r["rate_bpcu"]) for r in rows if r["user"] == "far"]
    assert max(far) < CEILING
    assert all(r["k"] == "3" and r["theta"] == "14.0" and r["M"] == "200" and r["seed"] == "" for r in rows)


def test_analytic_and_oracle_agree(capsys):
    assert main(["sweep", "--snr-db", "80:140:20", "--methods", "oracle,analytic"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert [r["method"] for r in rows[:2]] == ["analytic", "oracle"]
    for a, o in zip(rows[::2], rows[1::2]):
        assert (a["snr_db"], a["user"]) == (o["snr_db"], o["user"])
        assert abs(float(a["rate_bpcu"]) - float(o["rate_bpcu"])) <= 1e-3


def test_sweep_is_byte_identical(tmp_path):
    args = ["sweep", "--snr-db", "90:130:20", "--methods", "analytic,mc-gamma,mc-physical",
            "--mc-samples", "20000", "--seed", "17"]
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--output", str(out_a), "--workers", "1"]) == 0
    assert main(args + ["--output", str(out_b), "--workers", "4"]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    rows = read_csv(out_a.read_text())
    mc = [r for r in rows if r["method"].startswith("mc")]
    assert all(r["seed"] == "17" and r["n_samples"] == "20000" and r["std_err"] for r in mc)


def test_json_mirrors_csv(capsys):
    assert main(["sweep", "--snr-db", "100", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["columns"] == list(COLUMNS)
    assert [r["user"] for r in doc["rows"]] == ["near", "far"]
    assert main(["sweep", "--snr-db", "100"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert float(rows[0]["rate_bpcu"]) == doc["rows"][0]["rate_bpcu"]


@pytest.mark.parametrize("args", [
    ["sweep", "--methods", ""],
    ["sweep", "--methods", "analytic,psychic"],
    ["sweep", "--methods", "mc-gamma", "--mc-samples", "9999"],
    ["sweep", "--snr-db", "160:60:5"],
    ["sweep", "--snr-db", "60:160:0"],
    ["sweep", "--snr-db", "abc"],
    ["sweep", "--quadrature-M", "0"],
    ["sweep", "--format", "xml"],
    ["sweep", "--config", "/nonexistent/cfg.json"],
    ["fit", "--n-elements", "0"],
    ["frobnicate"],
])
def test_invalid_requests_exit_1(args, capsys):
    assert exit_code(args) == 1
    assert capsys.readouterr().err


def test_sic_infeasible_exit_2(tmp_path, capsys):
    path = write_config(tmp_path, {"noma": {"gamma_th_sic": 3.0}})
    assert main(["sweep", "--config", path]) == 2
    assert main(["validate", "--config", path]) == 2
    assert "SIC" in capsys.readouterr().err


def test_numerical_failure_exit_3(monkeypatch, capsys):
    from starnoma import analytic
    from starnoma.errors import IntegrationError

    def boom(*_args, **_kw):
        raise IntegrationError("did not converge")
    monkeypatch.setattr(analytic, "oracle_rate_near", boom)
    assert main(["sweep", "--snr-db", "100", "--methods", "oracle"]) == 3
    assert "did not converge" in capsys.readouterr().err


def test_conventional_config_limits_methods(tmp_path, capsys):
    path = write_config(tmp_path, {"scenario_kind": "CONVENTIONAL_RIS",
                                   "geometry": {"ris_position": [-200, 0, 50]}})
    assert main(["sweep", "--config", path, "--methods", "analytic"]) == 1
    assert "scenario_kind" in capsys.readouterr().err
    assert main(["sweep", "--config", path, "--snr-db", "120", "--methods", "mc-physical",
                 "--mc-samples", "10000"]) == 0


def test_fit_command(capsys):
    assert main(["fit", "--m", "2", "--omega", "1", "--n-elements", "30"]) == 0
    out = capsys.readouterr().out
    assert "theta=13.9712" in out and "k_raw=56.918" in out
    assert "warning: k differs" in out
    assert main(["fit", "--n-elements", "50"]) == 0
    assert "theta=23.2854" in capsys.readouterr().out
    assert main(["fit", "--n-elements", "40"]) == 0
    assert "warning" not in capsys.readouterr().out


def test_slopes_command(capsys):
    assert main(["slopes"]) == 0
    near_line, far_line = capsys.readouterr().out.splitlines()
    assert 0.95 <= float(near_line.split(":")[1]) <= 1.05
    assert float(far_line.split(":")[1].split()[0]) <= 0.02
    assert "1.73697" in far_line
    assert main(["slopes", "--synthetic"]) == 0
    assert "1.000000" in capsys.readouterr().out.splitlines()[0]


def test_validate_round_trip(tmp_path, capsys):
    assert main(["validate"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["resolved"]["xi"] == 0.75
    resolved = doc.pop("resolved")
    assert resolved["k_int"] == 3
    assert config_from_dict(doc) == default_config()


def test_config_defaults_and_round_trip():
    assert config_from_dict({}) == default_config()
    cfg = config_from_dict({"elements": 50})
    assert cfg.gamma_fit().theta == 23.4
    assert config_from_dict({"elements": 50, "gamma_override": None}).gamma_fit().theta == pytest.approx(23.2854, rel=1e-5)
    cfg = config_from_dict({"power": {"pt_dbm": 20, "bandwidth_hz": 1e6, "noise_figure_db": 5}})
    assert cfg.power.noise_dbm == pytest.approx(-105)
    assert config_from_dict(config_to_dict(cfg)) == cfg
    assert config_from_dict({"scenario_kind": "CONVENTIONAL_RIS"}).scenario_kind is ScenarioKind.CONVENTIONAL_RIS


@pytest.mark.parametrize("doc, field", [
    ({"geometry": {"R3": 1}}, "geometry.R3"),
    ({"colour": 1}, "colour"),
    ({"noma": {"a_near": "0.3"}}, "noma.a_near"),
    ({"geometry": {"bs_position": [1, 2]}}, "geometry.bs_position"),
    ({"power": {"noise_dbm": -90, "bandwidth_hz": 1e7, "noise_figure_db": 10}}, "power.noise_dbm"),
    ({"power": {"bandwidth_hz": 1e7}}, "power.bandwidth_hz"),
    ({"gamma_override": {"k": 3}}, "gamma_override"),
    ({"elements": 0}, "elements"),
    ({"elements": 2.5}, "elements"),
    ({"fading": {"m": 0.1}}, "fading.m"),
    ({"noma": {"beta_rfl": 0.9}}, "noma.beta_rfr"),
])
def test_config_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError) as err:
        config_from_dict(doc)
    assert err.value.field == field
    assert str(err.value).startswith(field)


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_snr_range_parsing():
    assert parse_snr_range("60:160:5") == (60, 160, 5)
    assert parse_snr_range("100") == (100, 100, 1)
    assert SweepRequest(snr_db_start=60, snr_db_stop=160, snr_db_step=5).snr_grid()[-1] == 160
    assert len(SweepRequest(snr_db_start=60, snr_db_stop=160, snr_db_step=5).snr_grid()) == 21
    assert SweepRequest(snr_db_start=0, snr_db_stop=1, snr_db_step=0.1).snr_grid()[-1] == 1.0


def test_rows_echo_resolved_config(tmp_path):
    path = write_config(tmp_path, {"elements": 40})
    rows = sweep_rows(SweepRequest(config_path=path, snr_db_start=100, snr_db_stop=100,
                                   methods=("analytic",)))
    assert rows[0]["k"] == 76 and rows[0]["theta"] == pytest.approx(18.63, rel=1e-3)


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "starnoma", "sweep", "--snr-db", "100"],
                         capture_output=True, text=True, check=True).stdout
    assert out.startswith(",".join(COLUMNS))
