import json
import shlex
from pathlib import Path

import pytest

from perchopt.cli import main, read_config_file


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run_cli(capsys, "list")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split()[:4] == ["name", "dims", "bounds", "f_min"]
    assert any(line.startswith("F8") and "-418.9829 x dims" in line for line in lines)
    assert len(lines) == 17


def test_oracle(capsys):
    code, out, _ = run_cli(capsys, "oracle", "gear-train")
    assert code == 0
    assert "2.7009" in out.splitlines()[0]
    assert "49 19 16 43" in out


def test_growing_radius_is_rejected(capsys):
    code, out, err = run_cli(capsys, "bench", "F1", "--res", "600", "--l-scale", "500")
    assert code != 0 and out == ""
    assert "eta >= 1" in err and len(err.strip().splitlines()) == 1


def test_unknown_problem(capsys):
    code, _, err = run_cli(capsys, "bench", "F42", "--seed", "1")
    assert code != 0 and "unknown objective" in err


def test_bench_is_reproducible_with_seed(capsys):
    args = ("bench", "F1", "--dims", "3", "--runs", "3", "--iterations", "30", "--seed", "5")
    a = run_cli(capsys, *args)
    b = run_cli(capsys, *args)
    assert a[0] == 0 and a[1] == b[1]


def test_missing_seed_is_printed(capsys):
    code, _, err = run_cli(capsys, "bench", "F4", "--dims", "2", "--runs", "1", "--iterations", "5")
    assert code == 0
    assert err.startswith("seed: ")


def test_output_directory_uses_naming_scheme(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "bench", "g1", "--dims", "2", "--runs", "2", "--iterations", "10",
                         "--seed", "3", "--elite", "2", "--output", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names[0] == "g1_mod-avg2_3.csv"
    assert "g1_mod-avg2_3_trace_0.csv" in names


def test_json_output(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "bench", "F9", "--dims", "2", "--runs", "2", "--iterations", "10",
                         "--seed", "1", "--format", "json", "--output", str(out))
    assert code == 0
    assert len(json.loads(out.read_text())["runs"]) == 2


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# quick run\nparticles = 4\niterations = 7\nruns = 2\ndims = 2\nseed = 11\n")
    out = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "bench", "F1", "--config", str(cfg), "--iterations", "9",
                         "--format", "json", "--output", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["metadata"]["config"]["particles"] == 4
    assert doc["metadata"]["config"]["iterations"] == 9
    assert doc["metadata"]["base_seed"] == 11


def test_config_file_errors(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run_cli(capsys, "bench", "F1", "--config", str(cfg))
    assert code != 0 and "unknown key" in err
    code, _, err = run_cli(capsys, "bench", "F1", "--config", str(tmp_path / "nope.cfg"))
    assert code != 0 and "cannot read" in err
    cfg.write_text("just words\n")
    with pytest.raises(Exception, match="key=value"):
        read_config_file(cfg)


def test_constrained_truss(capsys):
    code, out, _ = run_cli(capsys, "constrained", "three-bar-truss", "--runs", "2", "--seed", "2",
                           "--iterations", "150", "--truss-l", "2")
    assert code == 0
    assert "feasible runs 2/2" in out


def test_sweep_eta(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = run_cli(capsys, "sweep-eta", "F1", "--dims", "2", "--l-scale", "100", "--runs", "2",
                              "--iterations", "60", "--seed", "0", "--ranges", "0.9:0.9,0.9:0.7,0.5:0.9",
                              "--output", str(out))
    assert code == 0
    assert "skipped" in stdout
    rows = out.read_text().splitlines()
    assert rows[1] == "t,constant 0.9,0.9->0.7"
    assert len(rows) == 2 + 61


def test_converge_study(capsys):
    code, out, _ = run_cli(capsys, "converge-study", "F1", "--dims", "2", "--trials", "5",
                           "--t-values", "0,20", "--delta", "300", "--seed", "1")
    assert code == 0
    assert "success rate 1.000" in out


def test_surface(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "surface", "F1", "--resolution", "2")
    assert code == 0
    assert out.splitlines() == ["x0,x1,f", "-100.0,-100.0,20000.0", "-100.0,100.0,20000.0",
                                "100.0,-100.0,20000.0", "100.0,100.0,20000.0"]
    code, _, err = run_cli(capsys, "surface", "F1", "--resolution", "1")
    assert code != 0 and "resolution" in err


def test_jobs_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("PERCHOPT_JOBS", "bad")
    code, _, err = run_cli(capsys, "bench", "F1", "--dims", "2", "--runs", "1", "--iterations", "3", "--seed", "1")
    assert code != 0 and "PERCHOPT_JOBS" in err


def test_no_command_is_usage_error(capsys):
    code, _, err = run_cli(capsys)
    assert code == 2 and "usage" in err


def _readme_commands():
    readme = Path(__file__).resolve().parent.parent / "README.md"
    if not readme.exists():
        return []
    lines = readme.read_text().splitlines()
    return [shlex.split(line)[1:] for line in lines if line.startswith("perchopt ")]


@pytest.mark.parametrize("argv", _readme_commands(), ids=lambda a: " ".join(a[:2]))
def test_readme_examples_run(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = run_cli(capsys, *argv)
    assert code == 0, err
