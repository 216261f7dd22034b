import json
import subprocess
import sys

import pytest

COMMANDS = ["check-schur", "rota", "fourier", "secondquant"]


def run_cli(*argv, env_extra=None):
    import os
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "dilation_lab", *argv],
                          capture_output=True, text=True, env=env)


@pytest.mark.parametrize("command", COMMANDS)
def test_shipped_fixtures_pass(command):
    result = run_cli(command)
    assert result.returncode == 0, result.stderr
    report = json.loads(result.stdout)
    assert report["pass"] is True
    assert report["seed"] == 7041
    assert report["checks"]
    for check in report["checks"]:
        assert set(check) == {"name", "residual", "tol", "pass"}
        assert check["pass"] is True
        assert check["residual"] <= check["tol"]
    assert "checks passed" in result.stderr


def test_stdout_is_reproducible():
    first = run_cli("check-schur", "--seed", "11")
    second = run_cli("check-schur", "--seed", "11")
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


def test_explicit_input_file(tmp_path):
    payload = {"symbol": [[1.0, [0.25, 0.0]], [[0.25, -0.0], 1.0]],
               "weights": [0.6, 0.4]}
    path = tmp_path / "symbol.json"
    path.write_text(json.dumps(payload))
    result = run_cli("check-schur", str(path))
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["pass"] is True


def test_failing_symbol_exits_one(tmp_path):
    payload = {"symbol": [[1.0, 1.5], [1.5, 1.0]], "weights": [0.5, 0.5]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    result = run_cli("check-schur", str(path))
    assert result.returncode == 1
    report = json.loads(result.stdout)
    assert report["pass"] is False
    failed = {c["name"] for c in report["checks"] if not c["pass"]}
    assert "symbol_psd" in failed or any("psd" in name for name in failed)


def test_unreachable_tolerance_exits_one():
    result = run_cli("rota", "--tol", "1e-17")
    assert result.returncode == 1
    assert json.loads(result.stdout)["pass"] is False


def test_usage_errors_exit_two(tmp_path):
    assert run_cli("rota", "--steps", "9").returncode == 2
    assert run_cli("check-schur", str(tmp_path / "missing.json")).returncode == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert run_cli("check-schur", str(garbled)).returncode == 2
    ragged = tmp_path / "ragged.json"
    ragged.write_text(json.dumps({"symbol": [[1.0, 0.5]], "weights": [1.0]}))
    assert run_cli("check-schur", str(ragged)).returncode == 2
    assert run_cli("check-schur", "--tol", "-1").returncode == 2


def test_dimension_cap_env_exits_two():
    result = run_cli("rota", "--depth", "3",
                     env_extra={"DILATION_LAB_DIM_CAP": "64"})
    assert result.returncode == 2
    assert "cap" in result.stderr


def test_large_window_skips_oversized_fock_checks():
    result = run_cli("secondquant", "--window", "4")
    assert result.returncode == 0, result.stderr
    names = [c["name"] for c in json.loads(result.stdout)["checks"]]
    assert not any(name.startswith("rota_secondquant") for name in names)
    assert any(name.startswith("ppnp") for name in names)
