import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fresnel_wigner.cli import main, parse_state
from fresnel_wigner.errors import InvalidInputError
from fresnel_wigner.io import parse_signal_csv, read_result_csv


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def signal(tmp_path, capsys):
    path = tmp_path / "sig.csv"
    code, _, _ = run(capsys, "simulate", "--state", "fock:1", "--dim", 6, "--samples", 801, "-o", path)
    assert code == 0
    return path


def test_parse_state():
    assert parse_state("fock:2", 5).entries[2, 2] == 1
    assert parse_state("thermal:0.5", 5).dim == 5
    assert parse_state("coherent:0.5+0.5j", 20).dim == 20
    for bad in ("fock:x", "squeezed:1", "thermal:-1"):
        with pytest.raises(InvalidInputError):
            parse_state(bad, 5)


def test_simulate_writes_signal(signal):
    sf = parse_signal_csv(signal)
    assert len(sf.signals[0]) == 801
    assert sf.signals[0].taus[-1] == pytest.approx(4 * math.pi)
    assert "units" in dict(sf.meta[0])


def test_simulate_binomial_records_shots(tmp_path, capsys):
    path = tmp_path / "b.csv"
    code, _, _ = run(capsys, "simulate", "--noise", "binomial", "--noise-param", 100, "--samples", 20, "-o", path)
    assert code == 0
    assert dict(parse_signal_csv(path).meta[0])["shots"] == "100"


def test_simulate_to_stdout(capsys):
    code, out, _ = run(capsys, "simulate", "--samples", 5, "--tau-m", 1)
    assert code == 0 and out.splitlines()[3] == "tau,p_g,sigma"


def test_reconstruct_fresnel(signal, tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "reconstruct", "fresnel", "--signal", signal, "--trace-out", trace, "--resolution", 50)
    assert code == 0
    res = json.loads(out)[0]
    assert abs(res["w_re"] + 2) < 0.05
    assert "endpoint_re" in res
    header, data = read_result_csv(trace)
    assert header == ["tau_m", "re_w", "im_w"] and data.shape == (50, 3)


def test_reconstruct_discrete(tmp_path, capsys):
    kpath = tmp_path / "k.csv"
    run(capsys, "kernel", "optimize-times", "--m", 12, "--cutoff", 40, "--budget", 200, "--weights-decay", 0.7, "-o", kpath)
    taus = [line.split(",")[0] for line in kpath.read_text().splitlines()[4:]]
    from fresnel_wigner.dynamics import simulate_signal
    from fresnel_wigner.fock import FockDensityMatrix
    from fresnel_wigner.io import write_signal_csv

    sig = simulate_signal(FockDensityMatrix.fock(1, 4), 0, np.array([float(t) for t in taus]))
    spath = tmp_path / "s.csv"
    write_signal_csv(sig, spath)
    code, out, _ = run(capsys, "reconstruct", "discrete", "--signal", spath, "--cutoff", 40, "--weights-decay", 0.7)
    assert code == 0
    res = json.loads(out)[0]
    assert abs(res["w_re"] + 2) < 0.2
    assert res["condition"] >= 1


def test_reconstruct_general_simulated(capsys):
    code, out, _ = run(
        capsys, "reconstruct", "general", "--state", "fock:0", "--dim", 4, "--spectrum", "harmonic", "--T-cl", 2, "--t-max", 4
    )
    assert code == 0
    assert abs(json.loads(out)[0]["w_re"] - 2) < 0.1


def test_reconstruct_general_trace_needs_omega_max(tmp_path, capsys):
    from fresnel_wigner.dynamics import AutocorrelationTrace
    from fresnel_wigner.io import write_trace_csv

    path = tmp_path / "t.csv"
    write_trace_csv(AutocorrelationTrace(0, np.linspace(0, 1, 5), np.ones(5)), path)
    code, _, err = run(capsys, "reconstruct", "general", "--trace", path, "--spectrum", "harmonic")
    assert code == 2 and "omega-max" in err
    code, out, _ = run(capsys, "reconstruct", "general", "--trace", path, "--spectrum", "harmonic", "--omega-max", 20)
    assert code == 0 and len(json.loads(out)) == 1


def test_kernel_solve(tmp_path, capsys):
    path = tmp_path / "k.csv"
    code, _, _ = run(capsys, "kernel", "solve", "--taus", "0.5,1.5,2.5", "--cutoff", 10, "-o", path)
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "# cutoff=10" and lines[3] == "tau,f,abs_f" and len(lines) == 7
    code, _, err = run(capsys, "kernel", "solve", "--taus", "1,1", "--cutoff", 10)
    assert code == 2


def test_kernel_solve_from_signal_json(signal, capsys):
    code, out, _ = run(capsys, "kernel", "solve", "--signal", signal, "--cutoff", 900, "--format", "json")
    assert code == 0 and json.loads(out)["cutoff"] == 900


def test_scan_cutoff(tmp_path, capsys):
    spath = tmp_path / "s.csv"
    run(capsys, "simulate", "--samples", 10, "--tau-m", 5, "-o", spath)
    out = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "cutoff", "--signal", spath, "--cutoffs", "10:30:5", "-o", out)
    assert code == 0
    header, data = read_result_csv(out)
    assert header == ["n_cutoff", "w", "dw", "condition"]
    assert data[:, 0].tolist() == [10, 15, 20, 25, 30]
    code, _, _ = run(capsys, "scan", "cutoff", "--signal", spath, "--cutoffs", "a:b")
    assert code == 2


def test_grid_command(tmp_path, capsys):
    out = tmp_path / "map.csv"
    code, _, _ = run(capsys, "grid", "--n-re", 5, "--samples", 401, "--state", "fock:0", "--dim", 4, "-o", out)
    assert code == 0
    header, data = read_result_csv(out)
    assert data.shape == (5, 5)
    np.testing.assert_allclose(data[:, 0], np.linspace(-2, 2, 5))


def test_grid_from_signals(signal, tmp_path, capsys):
    out = tmp_path / "map.csv"
    code, _, _ = run(capsys, "grid", "--signal", signal, "--re-min", -1, "--re-max", 1, "--n-re", 3, "-o", out)
    assert code == 0
    _, data = read_result_csv(out)
    assert np.isnan(data[0, 2]) and np.isnan(data[2, 2])
    assert abs(data[1, 2] + 2) < 0.05


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_re = 3\nre_min = -1\nre_max = 1\nsamples = 401\nstate = fock:0\ndim = 4\n")
    out = tmp_path / "a.csv"
    run(capsys, "grid", "--config", cfg, "-o", out)
    _, data = read_result_csv(out)
    assert data.shape[0] == 3 and data[0, 0] == -1
    run(capsys, "grid", "--config", cfg, "--n-re", 2, "-o", out)
    _, data = read_result_csv(out)
    assert data.shape[0] == 2


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no_such_key = 1\n")
    code, _, err = run(capsys, "grid", "--config", cfg)
    assert code == 2 and "line 1" in err


def test_check_identity(capsys):
    code, out, _ = run(capsys, "check", "identity", "--n-max", 4)
    res = json.loads(out)
    assert code == 0 and res["passed"] and len(res["rows"]) == 5
    code, out, _ = run(capsys, "check", "identity", "--n-max", 2, "--tau-max", 3, "--tol", 1e-6)
    assert code == 1 and not json.loads(out)["passed"]


def test_internal_error_exit_code(monkeypatch, capsys):
    import fresnel_wigner.cli as cli

    def boom(*_):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "fresnel_identity", boom)
    code, _, err = run(capsys, "check", "identity", "--n-max", 1)
    assert code == 1 and "kaput" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fresnel_wigner", "check", "identity", "--n-max", "1", "--tau-max", "100"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"]
