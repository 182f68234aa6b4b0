import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import parity_sum
from fresnel_wigner.dynamics import AutocorrelationTrace, simulate_autocorrelation
from fresnel_wigner.errors import AlignmentError, CoverageError, InvalidInputError
from fresnel_wigner.fock import FockDensityMatrix, NumberStatistics, displaced_number_statistics, wigner_alternating_sum
from fresnel_wigner.spectra import (
    SpectrumModel,
    general_reconstruct,
    kernel_time_domain,
    spectrum_from_config,
    stationary_omega_max,
    wigner_at_half_period,
)


def test_models_and_half_periods():
    h = SpectrumModel.harmonic(4.0)
    assert h.half_period == 2.0
    np.testing.assert_allclose(h.omega([0, 1, 2]), [0, math.pi / 2, math.pi])
    b = SpectrumModel.box(6.0)
    assert b.half_period == 3.0
    assert b.omega(3) == pytest.approx(2 * math.pi * 9 / 6)
    s = SpectrumModel.sqrt(1.5)
    assert s.omega(3) == pytest.approx(6.0)
    with pytest.raises(InvalidInputError):
        s.half_period
    with pytest.raises(InvalidInputError):
        SpectrumModel.harmonic(-1.0)
    with pytest.raises(InvalidInputError):
        SpectrumModel.custom([1.0, 0.5, 2.0])
    with pytest.raises(InvalidInputError):
        h.omega(h.levels)


@pytest.mark.parametrize(
    "spec", [SpectrumModel.harmonic(2.0), SpectrumModel.box(3.0), SpectrumModel.sqrt(1.0), SpectrumModel.custom([0.0, 1.0, 1.7, 2.9])]
)
def test_n_of_omega_hits_levels(spec):
    knots = spec.omega(np.arange(spec.levels))
    np.testing.assert_array_equal(spec.n_of_omega(knots), np.arange(spec.levels))
    parity = (-1.0) ** np.arange(spec.levels)
    np.testing.assert_allclose(np.cos(spec.kernel_phase(knots)), parity, atol=1e-9)
    np.testing.assert_array_equal(spec.n_of_omega(-knots), spec.n_of_omega(knots))


@pytest.mark.parametrize("spec", [SpectrumModel.harmonic(4.0), SpectrumModel.box(4.0)])
def test_kernel_concentrates_at_half_period(spec):
    t = np.linspace(0, 4.0, 801)
    k = kernel_time_domain(spec, t, omega_max=60.0, window=5.0)
    peak = t[np.argmax(np.abs(k.values))]
    assert peak == pytest.approx(spec.half_period, abs=0.02)
    # narrower in time as the band grows
    wide = kernel_time_domain(spec, t, omega_max=120.0, window=5.0)
    near = np.abs(t - spec.half_period) < 0.2
    frac = lambda v: np.sum(np.abs(v[near]) ** 2) / np.sum(np.abs(v) ** 2)
    assert frac(wide.values) >= frac(k.values) - 1e-9


def test_kernel_symmetry():
    spec = SpectrumModel.sqrt(1.0)
    t = np.linspace(0, 12, 200)
    pos = kernel_time_domain(spec, t, 25.0, 4.0).values
    neg = kernel_time_domain(spec, -t, 25.0, 4.0).values
    np.testing.assert_allclose(neg, np.conj(pos), atol=1e-10)


def test_kernel_coverage_checks():
    spec = SpectrumModel.harmonic(2 * math.pi)
    with pytest.raises(InvalidInputError):
        kernel_time_domain(spec, [0.0, 1.0], 10.0, 0.0)
    with pytest.raises(InvalidInputError):
        kernel_time_domain(spec, [0.0, 1.0], 10.0, 12.0)
    with pytest.raises(CoverageError):
        kernel_time_domain(spec, [0.0, 1.0], 10.0, 4.0, top_level=8)


def test_zero_trace():
    t = np.linspace(0, 5, 101)
    spec = SpectrumModel.harmonic(4.0)
    k = kernel_time_domain(spec, t, 30.0, 4.0)
    assert general_reconstruct(AutocorrelationTrace(0, t, np.zeros(101)), k).value == 0


def test_grid_mismatch_and_start():
    spec = SpectrumModel.harmonic(4.0)
    t = np.linspace(0, 5, 11)
    k = kernel_time_domain(spec, t, 30.0, 4.0)
    with pytest.raises(AlignmentError):
        general_reconstruct(AutocorrelationTrace(0, t * 1.01, np.zeros(11)), k)
    t2 = np.linspace(0.5, 5, 11)
    with pytest.raises(CoverageError):
        general_reconstruct(AutocorrelationTrace(0, t2, np.zeros(11)), kernel_time_domain(spec, t2, 30.0, 4.0))


def _general(rho, alpha, spec, t_max, samples=4001, window=4.0):
    t = np.linspace(0, t_max, samples)
    top = min(displaced_number_statistics(rho, -alpha).top_level(), spec.levels - 1)
    w_max = stationary_omega_max(spec, t_max, top, window)
    k = kernel_time_domain(spec, t, w_max, window, top)
    return general_reconstruct(simulate_autocorrelation(rho, -alpha, spec, t), k)


def test_harmonic_general_fock1():
    est = _general(FockDensityMatrix.fock(1, 6), 0, SpectrumModel.harmonic(2.0), 4.0)
    assert abs(est.real + 2) < 0.1


def test_sqrt_general_vacuum():
    est = _general(FockDensityMatrix.fock(0, 6), 0, SpectrumModel.sqrt(1.0), 6 * math.pi)
    assert abs(est.real - 2) < 0.1


def test_half_period_examples():
    one = displaced_number_statistics(FockDensityMatrix.fock(1, 4), 0)
    vac = displaced_number_statistics(FockDensityMatrix.fock(0, 4), 0)
    assert wigner_at_half_period(SpectrumModel.harmonic(3.0), one).real == pytest.approx(-2, abs=1e-12)
    assert wigner_at_half_period(SpectrumModel.box(3.0), vac).real == pytest.approx(2, abs=1e-12)
    partial = NumberStatistics([0.9])
    assert wigner_at_half_period(SpectrumModel.box(1.0), partial).real == pytest.approx(1.8, abs=1e-12)
    with pytest.raises(InvalidInputError):
        wigner_at_half_period(SpectrumModel.sqrt(1.0), vac)


@settings(max_examples=60)
@given(
    st.lists(st.floats(0, 1), min_size=1, max_size=40).filter(lambda p: sum(p) > 0),
    st.sampled_from(["harmonic", "box"]),
    st.floats(0.5, 20),
)
def test_parity_identity(raw, kind, period):
    p = np.array(raw) / sum(raw)
    stats = NumberStatistics(p)
    spec = SpectrumModel.harmonic(period) if kind == "harmonic" else SpectrumModel.box(period)
    got = wigner_at_half_period(spec, stats).real
    assert abs(got - wigner_alternating_sum(stats).real) < 1e-12
    assert abs(got - parity_sum(p)) < 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("n", [0, 1])
def test_sqrt_matches_fresnel(n):
    from fresnel_wigner.fresnel import FresnelSettings, truncated_reconstruct
    from fresnel_wigner.dynamics import simulate_signal

    rho = FockDensityMatrix.fock(n, 8)
    cfg = FresnelSettings(tau_m=6 * math.pi, tail_start=2 * math.pi)
    for alpha in (0, 0.6, -1.0j, 1.0 + 0.5j, -1.5):
        fres = truncated_reconstruct(simulate_signal(rho, -alpha, np.linspace(0, 6 * math.pi, 2001)), cfg)
        gen = _general(rho, alpha, SpectrumModel.sqrt(1.0), 10 * math.pi)
        assert abs(gen.real - fres.real) < 0.1


def test_spectrum_from_config():
    assert spectrum_from_config({"spectrum.kind": "harmonic", "spectrum.T_cl": 3.0}).half_period == 1.5
    assert spectrum_from_config({"spectrum.kind": "box", "spectrum.T_r": 8}).half_period == 4
    assert spectrum_from_config({"spectrum.kind": "sqrt", "spectrum.Omega": 2.0, "spectrum.levels": 30}).levels == 30
    c = spectrum_from_config({"spectrum.kind": "custom", "spectrum.table": "1:1.5, 0:0.0, 2:4.0"})
    np.testing.assert_array_equal(c.omega([0, 1, 2]), [0.0, 1.5, 4.0])
    for bad in (
        {},
        {"spectrum.kind": "hydrogen"},
        {"spectrum.kind": "custom"},
        {"spectrum.kind": "custom", "spectrum.table": "0:0, 2:1"},
        {"spectrum.kind": "custom", "spectrum.table": "0-0"},
    ):
        with pytest.raises(InvalidInputError):
            spectrum_from_config(bad)
