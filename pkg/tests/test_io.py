import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fresnel_wigner.discrete import cutoff_scan, solve_kernel
from fresnel_wigner.dynamics import AutocorrelationTrace, NoiseModel, RabiSignal, simulate_signal
from fresnel_wigner.errors import InvalidInputError, ParseError, ValidationError
from fresnel_wigner.fock import FockDensityMatrix
from fresnel_wigner.fresnel import FresnelSettings, convergence_trace
from fresnel_wigner.grid import GridSpec, MethodSettings, grid_reconstruct
from fresnel_wigner.io import (
    emit_outputs,
    fmt,
    parse_config,
    parse_signal_csv,
    parse_trace_csv,
    read_result_csv,
    worker_count,
    write_signal_csv,
    write_trace_csv,
)

MINIMAL = """# alpha_re=0.5
# alpha_im=-0.25
tau,p_g,sigma
0.0,0.0,0.01
1.0,0.7,0.02
2.0,0.4,0.02
"""


def test_minimal_file():
    sf = parse_signal_csv(io.StringIO(MINIMAL))
    assert len(sf) == 1
    sig = sf.signals[0]
    assert len(sig) == 3
    assert sig.alpha == 0.5 - 0.25j
    np.testing.assert_array_equal(sig.probs, [0.0, 0.7, 0.4])


def test_sigma_column_optional():
    sig = parse_signal_csv(io.StringIO("tau,p_g\n0,0\n1,0.5\n")).signals[0]
    assert sig.alpha == 0
    np.testing.assert_array_equal(sig.sigmas, [0, 0])


@pytest.mark.parametrize(
    "body, line",
    [
        ("tau,p_g,sigma\n0,0,0\n1,0.1,0\n2,0.2,0\n3,1.2,0\n", 5),
        ("tau,p_g,sigma\n0,0,0\n2,0.1,0\n1,0.2,0\n", 4),
        ("tau,p_g,sigma\n0,0,0\n-1,0.1,0\n", 3),
        ("tau,p_g,sigma\n0,0,-0.1\n", 2),
        ("tau,p_g,sigma\n0,abc,0\n", 2),
        ("tau,p_g,sigma\n0,0\n", 2),
        ("tau,sigma\n0,0\n", 1),
        ("tau,p_g,extra\n0,0,0\n", 1),
    ],
)
def test_parse_errors_cite_line(body, line):
    with pytest.raises(ParseError) as exc:
        parse_signal_csv(io.StringIO(body))
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")
    assert isinstance(exc.value, ValidationError)


def test_empty_file_rejected():
    with pytest.raises(ParseError):
        parse_signal_csv(io.StringIO("# just a comment\n"))


def test_round_trip_byte_for_byte(tmp_path):
    sig = simulate_signal(FockDensityMatrix.fock(1, 6), 0.3 - 0.1j, np.linspace(0, 7, 41), NoiseModel("binomial", 400, seed=2))
    path = tmp_path / "sig.csv"
    write_signal_csv(sig, path, {"units": "dimensionless", "shots": 400})
    text = path.read_bytes()
    again = tmp_path / "again.csv"
    parsed = parse_signal_csv(path)
    write_signal_csv(parsed, again)
    assert again.read_bytes() == text
    back = parsed.signals[0]
    np.testing.assert_array_equal(back.taus, sig.taus)
    np.testing.assert_array_equal(back.probs, sig.probs)
    np.testing.assert_array_equal(back.sigmas, sig.sigmas)
    assert back.alpha == sig.alpha
    assert dict(parsed.meta[0])["shots"] == "400"


@settings(max_examples=30)
@given(
    st.lists(st.floats(0, 1, allow_subnormal=False), min_size=1, max_size=20),
    st.floats(-3, 3),
    st.floats(-3, 3),
)
def test_round_trip_property(probs, re, im):
    taus = np.cumsum(np.linspace(0.1, 1, len(probs)))
    sig = RabiSignal(complex(re, im), taus, probs, None)
    buf = io.StringIO()
    write_signal_csv(sig, buf)
    back = parse_signal_csv(io.StringIO(buf.getvalue())).signals[0]
    np.testing.assert_array_equal(back.probs, sig.probs)
    np.testing.assert_array_equal(back.taus, sig.taus)
    assert back.alpha == sig.alpha


def test_multi_block_file():
    rho = FockDensityMatrix.fock(0, 4)
    sigs = [simulate_signal(rho, a, np.linspace(0, 3, 5)) for a in (0.0, 0.5, -0.5j)]
    buf = io.StringIO()
    write_signal_csv(sigs, buf)
    parsed = parse_signal_csv(io.StringIO(buf.getvalue()))
    assert [s.alpha for s in parsed] == [0.0, 0.5, -0.5j]


def test_trace_round_trip():
    t = np.linspace(0, 2, 9)
    tr = AutocorrelationTrace(0.2j, t, np.exp(-1j * t) * 0.9)
    buf = io.StringIO()
    write_trace_csv(tr, buf)
    back = parse_trace_csv(io.StringIO(buf.getvalue()))[0]
    np.testing.assert_array_equal(back.values, tr.values)
    assert back.alpha == tr.alpha


def test_fmt_nine_digits():
    assert fmt(math.pi) == "3.14159265"
    assert fmt(-2.0) == "-2"
    assert fmt(1.23456789012e-7) == "1.23456789e-07"


def test_map_csv_rows(tmp_path):
    grid = GridSpec(-1, 1, -0.5, 0.5, 3, 2)
    m = grid_reconstruct(FockDensityMatrix.fock(0, 4), grid, MethodSettings(samples=401), threads=1)
    path = tmp_path / "map.csv"
    emit_outputs(m, path)
    header, data = read_result_csv(path)
    assert header == ["alpha_re", "alpha_im", "w_re", "w_im", "dw"]
    assert data.shape == (6, 5)
    np.testing.assert_allclose(data[:, 2], m.values.ravel().real, rtol=1e-8, atol=1e-12)


def test_trace_and_scan_columns(tmp_path):
    sig = simulate_signal(FockDensityMatrix.fock(1, 4), 0, np.linspace(0, 4 * math.pi, 401))
    emit_outputs(convergence_trace(sig, FresnelSettings(), 20), tmp_path / "t.csv")
    header, data = read_result_csv(tmp_path / "t.csv")
    assert header == ["tau_m", "re_w", "im_w"] and data.shape == (20, 3)

    taus = np.linspace(0.5, 5, 10)
    scan = cutoff_scan(simulate_signal(FockDensityMatrix.fock(1, 4), 0, taus), taus, [10, 20])
    emit_outputs(scan, tmp_path / "s.csv")
    header, data = read_result_csv(tmp_path / "s.csv")
    assert header == ["n_cutoff", "w", "dw", "condition"]
    assert data[:, 0].tolist() == [10, 20]
    assert (tmp_path / "s.csv").read_text().splitlines()[1].startswith("10,")


def test_json_output(tmp_path):
    scan = cutoff_scan(simulate_signal(FockDensityMatrix.fock(1, 4), 0, [0.5, 1, 2]), [0.5, 1, 2], [3, 4])
    emit_outputs(scan, tmp_path / "s.json", format="json")
    data = json.loads((tmp_path / "s.json").read_text())
    assert [d["n_cutoff"] for d in data] == [3, 4]
    emit_outputs(solve_kernel([0.5, 1, 2], 5), tmp_path / "k.json", format="json")
    assert json.loads((tmp_path / "k.json").read_text())["cutoff"] == 5


def test_emit_errors(tmp_path):
    with pytest.raises(InvalidInputError):
        emit_outputs(object(), tmp_path / "x.csv")
    with pytest.raises(OSError):
        emit_outputs(solve_kernel([1.0], 2), tmp_path / "missing" / "dir" / "k.csv")


def test_parse_config():
    cfg = parse_config(
        io.StringIO("# comment\ndim = 30\ntau_m = 12.5  # trailing\nspectrum.kind = harmonic\nseed=4\n")
    )
    assert cfg == {"dim": 30, "tau_m": 12.5, "spectrum.kind": "harmonic", "seed": 4}
    with pytest.raises(ParseError) as exc:
        parse_config(io.StringIO("dim = 3\nbogus = 1\n"))
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_config(io.StringIO("dim = three\n"))
    with pytest.raises(ParseError):
        parse_config(io.StringIO("dim\n"))


def test_worker_count(monkeypatch):
    monkeypatch.setenv("FRESNEL_WIGNER_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("FRESNEL_WIGNER_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("FRESNEL_WIGNER_THREADS", "x")
    with pytest.raises(ValidationError):
        worker_count()
