"""Synthetic measurement signals: Jaynes-Cummings Rabi oscillations and
wave-packet autocorrelation functions.

The atom is taken to start in the excited state, so ``P_g(0) = 0``. Times are
the dimensionless interaction time ``tau`` (vacuum Rabi frequency absorbed).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import CoverageError, InvalidInputError
from .fock import FockDensityMatrix, NumberStatistics, _readonly, as_alpha, displaced_number_statistics

NOISE_KINDS = ("none", "gaussian", "binomial")


@dataclass(frozen=True)
class RabiSignal:
    """Sampled ground-state probabilities for one applied displacement.

    ``alpha`` is the displacement applied to the state before the atom
    interacts; the Wigner value these data encode sits at ``-alpha``.
    """

    alpha: complex
    taus: np.ndarray
    probs: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        taus = np.asarray(self.taus, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        sigmas = np.zeros_like(taus) if self.sigmas is None else np.asarray(self.sigmas, dtype=float)
        if taus.ndim != 1 or taus.size == 0:
            raise InvalidInputError("signal needs at least one sample")
        if probs.shape != taus.shape or sigmas.shape != taus.shape:
            raise InvalidInputError("taus, probs and sigmas must have equal length")
        if not (np.all(np.isfinite(taus)) and np.all(np.isfinite(probs)) and np.all(np.isfinite(sigmas))):
            raise InvalidInputError("signal contains non-finite values")
        if taus[0] < 0 or np.any(np.diff(taus) <= 0):
            raise InvalidInputError("taus must be nonnegative and strictly increasing")
        if probs.min() < 0 or probs.max() > 1:
            raise InvalidInputError("probabilities must lie in [0, 1]")
        if sigmas.min() < 0:
            raise InvalidInputError("sigmas must be nonnegative")
        object.__setattr__(self, "taus", _readonly(taus))
        object.__setattr__(self, "probs", _readonly(probs))
        object.__setattr__(self, "sigmas", _readonly(sigmas))

    def __len__(self):
        return self.taus.size

    @property
    def point(self) -> complex:
        """Phase-space point whose Wigner value the signal encodes."""
        return -self.alpha

    def samples(self):
        return list(zip(self.taus.tolist(), self.probs.tolist(), self.sigmas.tolist()))

    def with_probs(self, probs) -> "RabiSignal":
        return replace(self, probs=probs)


@dataclass(frozen=True)
class AutocorrelationTrace:
    alpha: complex
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        t = np.asarray(self.times, dtype=float)
        c = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or c.shape != t.shape or t.size == 0:
            raise InvalidInputError("trace times and values must be equal-length vectors")
        if np.any(np.abs(c) > 1 + 1e-9):
            raise InvalidInputError("autocorrelation modulus exceeds 1")
        object.__setattr__(self, "times", _readonly(t))
        object.__setattr__(self, "values", _readonly(c))


@dataclass(frozen=True)
class NoiseModel:
    """Measurement noise applied to simulated probabilities.

    ``parameter`` is the standard deviation for ``gaussian`` and the number of
    shots per point for ``binomial``. The model is immutable: each simulation
    draws from a fresh generator seeded by ``seed``; use :meth:`spawn` to get
    independent streams for many simulations.
    """

    kind: str = "none"
    parameter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise InvalidInputError(f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.kind != "none" and not self.parameter > 0:
            raise InvalidInputError("noise parameter must be positive")
        if self.kind == "binomial" and int(self.parameter) != self.parameter:
            raise InvalidInputError("binomial shot count must be an integer")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def spawn(self, key: int) -> "NoiseModel":
        seed = int(np.random.SeedSequence([self.seed, key]).generate_state(1)[0])
        return replace(self, seed=seed)


def rabi_from_stats(stats: NumberStatistics, taus) -> np.ndarray:
    """``P_g(tau) = 1/2 - 1/2 sum_n P_n cos(2 sqrt(n+1) tau)``, clamped to [0, 1]."""
    taus = np.asarray(taus, dtype=float)
    freqs = 2.0 * np.sqrt(np.arange(stats.dim) + 1.0)
    flat = taus.reshape(-1)
    pg = 0.5 - 0.5 * (np.cos(np.outer(flat, freqs)) @ stats.probs)
    return np.clip(pg, 0.0, 1.0).reshape(taus.shape)


def rabi_probability(rho: FockDensityMatrix, alpha, tau):
    """Ground-state probability after interaction time ``tau`` for ``rho`` displaced by ``alpha``."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise InvalidInputError("interaction time must be nonnegative")
    p = rabi_from_stats(displaced_number_statistics(rho, alpha), tau_arr)
    return float(p) if p.ndim == 0 else p


def simulate_signal(rho: FockDensityMatrix, alpha, taus, noise: NoiseModel | None = None) -> RabiSignal:
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise InvalidInputError("time grid is empty")
    if taus[0] < 0 or np.any(np.diff(taus) <= 0):
        raise InvalidInputError("time grid must be nonnegative and strictly increasing")
    noise = noise or NoiseModel()
    clean = rabi_from_stats(displaced_number_statistics(rho, alpha), taus)
    if noise.kind == "none":
        return RabiSignal(alpha, taus, clean, np.zeros_like(clean))
    rng = noise.rng()
    if noise.kind == "gaussian":
        noisy = np.clip(clean + rng.normal(0.0, noise.parameter, clean.shape), 0.0, 1.0)
        return RabiSignal(alpha, taus, noisy, np.full_like(clean, noise.parameter))
    shots = int(noise.parameter)
    noisy = rng.binomial(shots, clean) / shots
    # error bars from the model probability: the estimate's own p(1-p) vanishes at 0 and 1
    return RabiSignal(alpha, taus, noisy, np.sqrt(clean * (1 - clean) / shots))


def autocorrelation(spectrum, stats: NumberStatistics, t):
    """``C(t) = sum_n P_n exp(-i omega_n t)`` for a spectrum ``omega_n``."""
    t_arr = np.asarray(t, dtype=float)
    probs = stats.probs
    levels = getattr(spectrum, "levels", probs.size)
    if probs.size > levels:
        if probs[levels:].sum() > 1e-12:
            raise CoverageError(f"state occupies levels beyond the spectrum's {levels}")
        probs = probs[:levels]
    omega = spectrum.omega(np.arange(probs.size))
    c = np.exp(-1j * np.outer(t_arr.reshape(-1), omega)) @ probs
    return complex(c[0]) if t_arr.ndim == 0 else c.reshape(t_arr.shape)


def simulate_autocorrelation(rho: FockDensityMatrix, alpha, spectrum, times) -> AutocorrelationTrace:
    stats = displaced_number_statistics(rho, alpha)
    return AutocorrelationTrace(alpha, times, autocorrelation(spectrum, stats, times))
