"""Continuous reconstruction: Fresnel-weighted time integral of Rabi data.

    W(alpha; tau_m) = 4 * int_0^tau_m w(tau) [P_g(tau; -alpha) - 1/2] dtau,
    w(tau) = 2 / (pi sqrt(i)) * exp(i tau^2 / pi),  sqrt(i) = exp(i pi / 4).

The integral is evaluated with 8-point Gauss-Legendre panels on a node set
that contains every sample time and a lattice on which the weight's phase
advances by at most ``max_phase_step``. Partial integrals for any upper limit
reuse the same panels, so they are additive and prefix-consistent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .dynamics import RabiSignal
from .errors import CoverageError, InvalidInputError
from .fock import WignerEstimate

SQRT_I = complex(np.exp(1j * np.pi / 4))
PREFACTOR = 2.0 / (np.pi * SQRT_I)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_MIN_SAMPLES = 4


@dataclass(frozen=True)
class FresnelSettings:
    """Integration settings.

    The headline estimate averages ``W(alpha; L)`` over upper limits ``L`` in
    ``[tail_start, tau_m]``; when ``tail_start`` is None the window is the
    final ``tail_fraction`` of ``[0, tau_m]``.
    """

    tau_m: float = 4 * math.pi
    max_phase_step: float = math.pi / 8
    interpolation: str = "linear"
    tail_fraction: float = 0.25
    tail_start: float | None = None

    def __post_init__(self):
        if not self.tau_m > 0:
            raise InvalidInputError("tau_m must be positive")
        if not 0 < self.max_phase_step <= math.pi / 4:
            raise InvalidInputError("max_phase_step must lie in (0, pi/4]")
        if self.interpolation not in ("linear", "cubic"):
            raise InvalidInputError("interpolation must be 'linear' or 'cubic'")
        if not 0 < self.tail_fraction <= 1:
            raise InvalidInputError("tail_fraction must lie in (0, 1]")
        if self.tail_start is not None and not 0 <= self.tail_start < self.tau_m:
            raise InvalidInputError("tail_start must lie in [0, tau_m)")

    @property
    def tail_window(self) -> tuple[float, float]:
        start = self.tau_m * (1 - self.tail_fraction) if self.tail_start is None else self.tail_start
        return start, self.tau_m


@dataclass(frozen=True)
class ConvergenceTrace:
    limits: np.ndarray
    values: np.ndarray

    @property
    def points(self):
        return list(zip(self.limits.tolist(), self.values.tolist()))


@dataclass(frozen=True)
class IdentityCheck:
    n: int
    endpoint: complex
    tail_average: complex

    @property
    def target(self) -> int:
        return (-1) ** self.n


def fresnel_weight(tau):
    """``2/(pi sqrt(i)) exp(i tau^2/pi)``; modulus is always ``2/pi``."""
    tau = np.asarray(tau, dtype=float)
    w = PREFACTOR * np.exp(1j * tau**2 / np.pi)
    return complex(w) if w.ndim == 0 else w


def _gauss_panels(func, a, b):
    """Integral of ``func`` over each panel ``[a_k, b_k]``."""
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
    return (func(x) @ _GL_W) * half


class _PanelIntegral:
    """Cumulative integrals of ``g`` and ``tau * g`` on a fixed node set."""

    def __init__(self, func, nodes):
        self.func = func
        self.nodes = nodes
        self.cum = np.concatenate([[0.0], np.cumsum(_gauss_panels(func, nodes[:-1], nodes[1:]))])
        self.cum_t = np.concatenate(
            [[0.0], np.cumsum(_gauss_panels(lambda x: x * func(x), nodes[:-1], nodes[1:]))]
        )

    def _partial(self, cum, func, upper):
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        idx = np.clip(np.searchsorted(self.nodes, upper, side="right") - 1, 0, self.nodes.size - 1)
        out = cum[idx].astype(complex)
        inner = upper > self.nodes[idx]
        if np.any(inner):
            out[inner] += _gauss_panels(func, self.nodes[idx[inner]], upper[inner])
        return out

    def partial(self, upper):
        return self._partial(self.cum, self.func, upper)

    def tail_average(self, start, stop):
        """Mean of the partial integral over upper limits in ``[start, stop]``.

        Integration by parts: int_s^T I(L) dL = T I(T) - s I(s) - int_s^T tau g(tau) dtau.
        """
        if stop <= start:
            return complex(self.partial(stop)[0])
        i_s, i_t = self.partial([start, stop])
        m_s, m_t = self._partial(self.cum_t, lambda x: x * self.func(x), [start, stop])
        return complex((stop * i_t - start * i_s - (m_t - m_s)) / (stop - start))


def _phase_nodes(tau_max, step, linear_rate=0.0):
    """Nodes on which ``tau^2/pi + linear_rate*tau`` advances by ``step``."""
    total = tau_max**2 / np.pi + linear_rate * tau_max
    k = np.arange(int(np.floor(total / step)) + 1)
    b = np.pi * linear_rate / 2
    return -b + np.sqrt(b * b + np.pi * step * k)


def _interpolant(signal: RabiSignal, kind: str):
    if kind == "cubic":
        spline = CubicSpline(signal.taus, signal.probs)
        return lambda x: spline(x) - 0.5
    return lambda x: np.interp(x, signal.taus, signal.probs) - 0.5


def _integrator(signal: RabiSignal, settings: FresnelSettings) -> _PanelIntegral:
    if len(signal) < _MIN_SAMPLES:
        raise InvalidInputError(f"need at least {_MIN_SAMPLES} samples, got {len(signal)}")
    tau_m = settings.tau_m
    if signal.taus[0] > 1e-9 * max(1.0, tau_m) or signal.taus[-1] < tau_m * (1 - 1e-12):
        raise CoverageError(
            f"signal spans [{signal.taus[0]:g}, {signal.taus[-1]:g}], needs [0, {tau_m:g}]"
        )
    lattice = _phase_nodes(tau_m, settings.max_phase_step)
    samples = signal.taus[signal.taus < tau_m]
    nodes = np.unique(np.concatenate([lattice[lattice < tau_m], samples, [0.0, tau_m]]))
    p = _interpolant(signal, settings.interpolation)
    return _PanelIntegral(lambda x: 4.0 * fresnel_weight(x) * p(x), nodes)


def truncated_reconstruct(signal: RabiSignal, settings: FresnelSettings | None = None) -> WignerEstimate:
    """Wigner value at ``signal.point`` from one Rabi curve.

    ``value`` is the tail average, ``endpoint`` the raw ``W(alpha; tau_m)``.
    """
    settings = settings or FresnelSettings()
    integ = _integrator(signal, settings)
    endpoint = complex(integ.partial(settings.tau_m)[0])
    return WignerEstimate(integ.tail_average(*settings.tail_window), 0.0, endpoint)


def convergence_trace(
    signal: RabiSignal, settings: FresnelSettings | None = None, resolution: int = 200
) -> ConvergenceTrace:
    """Partial integrals at upper limits ``tau_m * k / resolution``, ``k = 1..resolution``."""
    settings = settings or FresnelSettings()
    if int(resolution) != resolution or resolution < 1:
        raise InvalidInputError("resolution must be a positive integer")
    integ = _integrator(signal, settings)
    limits = settings.tau_m * (np.arange(1, resolution + 1) / resolution)
    return ConvergenceTrace(limits, integ.partial(limits))


def fresnel_identity(
    n: int, tau_max: float, max_phase_step: float = math.pi / 8, tail_fraction: float = 0.25
) -> IdentityCheck:
    """Partial Fresnel transform of ``cos(2 sqrt(n) tau)``; the limit is ``(-1)^n``."""
    if n < 0 or int(n) != n:
        raise InvalidInputError("n must be a nonnegative integer")
    if not tau_max > 0:
        raise InvalidInputError("tau_max must be positive")
    freq = 2.0 * math.sqrt(n)
    nodes = _phase_nodes(tau_max, max_phase_step, freq)
    nodes = np.unique(np.concatenate([nodes[nodes < tau_max], [tau_max]]))
    integ = _PanelIntegral(lambda x: fresnel_weight(x) * np.cos(freq * x), nodes)
    endpoint = complex(integ.partial(tau_max)[0])
    return IdentityCheck(int(n), endpoint, integ.tail_average(tau_max * (1 - tail_fraction), tau_max))
