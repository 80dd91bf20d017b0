import json
import subprocess
import sys

import numpy as np
import pytest

from nslg.cli import main


def test_table_exit_status_reflects_comparison(capsys):
    code = main(["table1"])
    out = capsys.readouterr().out
    assert "19/24 cells within 1.5%" in out
    assert code == 1


def test_run_preset_csv_to_stdout(capsys):
    assert main(["run", "--preset", "sem", "--span", "1", "--samples-per-period", "64"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "z_m,ct_m,sigma_m,rho_m,rho_st_m,rho_L_m,gouy_rad"
    assert len(lines) == 1 + 65


def test_run_config_json_file(tmp_path, capsys):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"name": "mine", "E_parallel": 3e4, "H": 0.5, "d": 0.2, "l": 1}))
    out = tmp_path / "r.json"
    assert main(["run", "--config", str(config), "--span", "2", "--out", str(out), "--format", "json"]) == 0
    data = json.loads(out.read_text())
    assert data["name"] == "mine" and data["config"]["span_periods"] == 2.0
    assert len(data["trace"]["ct"]) == 2 * 256 + 1


def test_run_flags_two_field_preset(capsys):
    assert main(["run", "--preset", "schattschneider", "--format", "json"]) == 0
    assert "flag:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["run", "--preset", "sem", "--samples-per-period", "8"],
    ["run", "--config", "/nonexistent/config.json"],
    ["run", "--preset", "sem", "--out", "/nonexistent/dir/x.csv"],
    ["validate", "--preset", "sem", "--sigma-z", "-1"],
])
def test_domain_and_io_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["run"], ["run", "--preset", "nope"], ["psi", "--preset", "sem", "--ct", "0", "--grid", "x"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_validate(capsys):
    assert main(["validate", "--preset", "sem", "--sigma-z", "1e-9"]) == 0
    assert "verdict        valid" in capsys.readouterr().out
    assert main(["validate", "--preset", "sem", "--sigma-z", "1e-3"]) == 1


def test_fringe(tmp_path, capsys):
    z = np.linspace(0.0, 0.3, 601)
    hz = 0.25 * (1 + np.tanh((z - 0.05) / 4e-3)) * (1 - np.tanh((z - 0.23) / 4e-3))
    path = tmp_path / "profile.csv"
    np.savetxt(path, np.c_[z, hz], delimiter=",", header="z_m,Hz_T", comments="")
    assert main(["fringe", "--profile", str(path), "--rho", "2e-6", "--vphi", "1e-3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["d_eff"] == pytest.approx(0.176, rel=1e-3)
    assert data["dE_minus_ev"] == pytest.approx(-0.212, rel=1e-2)
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1,2\n1,2,3\n2,3,4\n")
    assert main(["fringe", "--profile", str(bad), "--rho", "2e-6", "--vphi", "0"]) == 2


def test_psi(tmp_path, capsys):
    out = tmp_path / "psi.json"
    assert main(["psi", "--preset", "landau", "--ct", "0.01", "--grid", "256,16", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert np.asarray(data["density"]).shape == (256, 16)
    assert data["norm"] == pytest.approx(1.0, abs=1e-8)
    assert data["residual"] < 1e-5
    assert main(["psi", "--preset", "sem", "--ct", "0.0", "--grid", "256,4"]) == 2


def test_module_entry_point():
    result = subprocess.run([sys.executable, "-m", "nslg", "validate", "--preset", "tem", "--sigma-z", "1e-9"],
                            capture_output=True, text=True, check=False)
    assert result.returncode == 0
    assert "tau_d" in result.stdout
