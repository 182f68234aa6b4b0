"""Wigner reconstruction for an arbitrary non-degenerate discrete spectrum.

For a spectrum ``omega_n`` and any continuous ``n(omega)`` with
``n(omega_n) = n``, the kernel

    f(t) = 1/(2 pi) int d omega  exp(i omega t) cos(pi n(omega))

turns the autocorrelation ``C(t; -alpha) = sum_n P_n exp(-i omega_n t)`` into
the parity sum: ``W(alpha) = 4 Re int_0^inf f(t) C(t; -alpha) dt``.

The frequency integral is regularized by a raised-cosine taper of width
``window`` just below ``omega_max`` and taken over ``[-omega_max, omega_max]``
with ``n(omega)`` extended evenly, which makes ``f`` real and even.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import AutocorrelationTrace, autocorrelation
from .errors import AlignmentError, CoverageError, InvalidInputError
from .fock import NumberStatistics, WignerEstimate, _readonly

KINDS = ("harmonic", "box", "sqrt", "custom")
DEFAULT_LEVELS = 128


@dataclass(frozen=True)
class SpectrumModel:
    """Eigenfrequencies ``omega_n`` plus the interpolation ``n(omega)``.

    ``n_of_omega`` is piecewise linear through ``(omega_n, n)``, extended
    linearly past both ends and mirrored to negative frequencies. The kernel
    uses :meth:`kernel_phase`, which for the analytic kinds is a closed form
    with ``cos(phase(omega_n)) = (-1)^n``:

    * harmonic, ``omega_n = 2 pi n / T_cl``: ``omega T_cl / 2``
    * box, ``omega_n = 2 pi n^2 / T_r``: ``omega T_r / 2`` (the parity of n^2 is that of n)
    * sqrt, ``omega_n = 2 Omega sqrt(n+1)``: ``pi ((omega / 2 Omega)^2 - 1)``
    * custom: ``pi * n_of_omega(omega)``
    """

    kind: str
    params: dict = field(default_factory=dict)
    table: np.ndarray | None = None
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"spectrum kind must be one of {KINDS}, got {self.kind!r}")
        required = {"harmonic": "T_cl", "box": "T_r", "sqrt": "Omega"}.get(self.kind)
        if required is not None:
            value = self.params.get(required)
            if value is None or not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{self.kind} spectrum needs a positive {required}")
        if self.kind == "custom":
            if self.table is None:
                raise InvalidInputError("custom spectrum needs a frequency table")
            table = np.asarray(self.table, dtype=float).reshape(-1)
            if table.size < 2 or not np.all(np.isfinite(table)) or table[0] < 0:
                raise InvalidInputError("custom table needs >= 2 finite nonnegative frequencies")
            object.__setattr__(self, "table", _readonly(table))
            object.__setattr__(self, "levels", table.size)
        self._check()

    @classmethod
    def harmonic(cls, T_cl: float, levels: int = DEFAULT_LEVELS) -> "SpectrumModel":
        return cls("harmonic", {"T_cl": float(T_cl)}, levels=levels)

    @classmethod
    def box(cls, T_r: float, levels: int = DEFAULT_LEVELS) -> "SpectrumModel":
        return cls("box", {"T_r": float(T_r)}, levels=levels)

    @classmethod
    def sqrt(cls, Omega: float = 1.0, levels: int = DEFAULT_LEVELS) -> "SpectrumModel":
        return cls("sqrt", {"Omega": float(Omega)}, levels=levels)

    @classmethod
    def custom(cls, omegas) -> "SpectrumModel":
        return cls("custom", table=np.asarray(omegas, dtype=float))

    @property
    def half_period(self) -> float:
        """Time at which free evolution applies the parity operator (harmonic and box only)."""
        if self.kind == "harmonic":
            return self.params["T_cl"] / 2
        if self.kind == "box":
            return self.params["T_r"] / 2
        raise InvalidInputError(f"{self.kind} spectrum has no parity half-period")

    def omega(self, n):
        n = np.asarray(n)
        if np.any(n < 0) or np.any(n >= self.levels):
            raise InvalidInputError(f"level outside the spectrum's range 0..{self.levels - 1}")
        n = n.astype(float)
        if self.kind == "harmonic":
            return 2 * np.pi * n / self.params["T_cl"]
        if self.kind == "box":
            return 2 * np.pi * n**2 / self.params["T_r"]
        if self.kind == "sqrt":
            return 2 * self.params["Omega"] * np.sqrt(n + 1)
        return self.table[n.astype(int)]

    def _knots(self):
        n = np.arange(self.levels)
        return self.omega(n), n.astype(float)

    def n_of_omega(self, w):
        knots, n = self._knots()
        w = np.abs(np.asarray(w, dtype=float))
        out = np.interp(w, knots, n)
        lo_slope = 1.0 / (knots[1] - knots[0])
        hi_slope = 1.0 / (knots[-1] - knots[-2])
        out = np.where(w < knots[0], (w - knots[0]) * lo_slope, out)
        return np.where(w > knots[-1], n[-1] + (w - knots[-1]) * hi_slope, out)

    def kernel_phase(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "harmonic":
            return w * self.params["T_cl"] / 2
        if self.kind == "box":
            return w * self.params["T_r"] / 2
        if self.kind == "sqrt":
            return np.pi * ((w / (2 * self.params["Omega"])) ** 2 - 1)
        return np.pi * self.n_of_omega(w)

    def _check(self):
        knots, n = self._knots()
        if np.any(np.diff(knots) <= 0):
            raise InvalidInputError("eigenfrequencies must be strictly increasing in n")
        if not np.array_equal(self.n_of_omega(knots), n):
            raise InvalidInputError("n(omega) does not reproduce the level index at the eigenfrequencies")
        parity = np.where(np.arange(self.levels) % 2 == 0, 1.0, -1.0)
        if np.max(np.abs(np.cos(self.kernel_phase(knots)) - parity)) > 1e-9:
            raise InvalidInputError("kernel phase does not produce (-1)^n at the eigenfrequencies")


@dataclass(frozen=True)
class KernelSamples:
    times: np.ndarray
    values: np.ndarray


def _taper(w, omega_max, window):
    out = np.ones_like(w)
    edge = w > omega_max - window
    out[edge] = 0.5 * (1 + np.cos(np.pi * (w[edge] - (omega_max - window)) / window))
    return out


def _check_coverage(spectrum: SpectrumModel, omega_max, window, top_level):
    if not window > 0:
        raise InvalidInputError("window must be positive")
    if not window < omega_max:
        raise InvalidInputError("window must be narrower than omega_max")
    if top_level is not None:
        w_top = float(spectrum.omega(top_level))
        if omega_max - window < w_top:
            raise CoverageError(
                f"taper starts at {omega_max - window:g}, below the top occupied frequency {w_top:g}"
            )


def kernel_time_domain(
    spectrum: SpectrumModel, t_grid, omega_max: float, window: float, top_level: int | None = None
) -> KernelSamples:
    """Tapered kernel ``f(t)`` on ``t_grid``.

    With ``top_level`` given, the taper must begin above that level's
    frequency, otherwise the kernel would distort occupied equations.
    """
    _check_coverage(spectrum, omega_max, window, top_level)
    t = np.asarray(t_grid, dtype=float)
    t_abs = float(np.max(np.abs(t))) if t.size else 0.0
    probe = np.linspace(0.0, omega_max, 4097)
    rate = float(np.max(np.abs(np.diff(spectrum.kernel_phase(probe))) / np.diff(probe)))
    # at most pi/8 of combined phase per frequency step
    step = (np.pi / 8) / (rate + t_abs + 1e-12)
    n_w = int(math.ceil(omega_max / step)) + 1
    w = np.linspace(0.0, omega_max, n_w)
    g = _taper(w, omega_max, window) * np.cos(spectrum.kernel_phase(w))
    quad = np.full(n_w, w[1] - w[0])
    quad[[0, -1]] *= 0.5
    gq = g * quad / np.pi
    flat = t.reshape(-1)
    out = np.empty(flat.size)
    chunk = max(1, 2_000_000 // n_w)
    for i in range(0, flat.size, chunk):
        out[i : i + chunk] = np.cos(np.outer(flat[i : i + chunk], w)) @ gq
    return KernelSamples(_readonly(t), _readonly(out.reshape(t.shape).astype(complex)))


def stationary_omega_max(spectrum: SpectrumModel, t_max: float, top_level: int, window: float) -> float:
    """A cutoff high enough for ``kernel_time_domain`` up to ``t_max``.

    Covers the top occupied frequency and the frequency at which the kernel
    phase is stationary against ``exp(i omega t_max)``, plus the taper.
    """
    w_top = float(spectrum.omega(top_level))
    hi = max(4 * w_top, 10.0)
    probe = np.linspace(0.0, hi, 20001)
    rate = np.abs(np.gradient(spectrum.kernel_phase(probe), probe))
    while rate[-1] < t_max and spectrum.kind in ("sqrt", "custom") and hi < 1e6:
        hi *= 2
        probe = np.linspace(0.0, hi, 20001)
        rate = np.abs(np.gradient(spectrum.kernel_phase(probe), probe))
    past = np.nonzero(rate >= t_max)[0]
    w_stat = float(probe[past[0]]) if past.size and spectrum.kind in ("sqrt", "custom") else 0.0
    return max(w_top, w_stat) + 2 * window


def general_reconstruct(trace: AutocorrelationTrace, kernel: KernelSamples) -> WignerEstimate:
    """``4 Re int_0^t_max f(t) C(t) dt`` (trapezoid) at phase-space point ``-trace.alpha``."""
    if not np.array_equal(trace.times, kernel.times):
        raise AlignmentError("trace and kernel are sampled on different time grids")
    t = trace.times
    if t.size < 2 or t[0] != 0 or np.any(np.diff(t) <= 0):
        raise CoverageError("trace must start at t=0 on a strictly increasing grid")
    value = 4.0 * np.trapezoid(kernel.values * trace.values, t).real
    return WignerEstimate(complex(value, 0.0))


def wigner_at_half_period(spectrum: SpectrumModel, stats: NumberStatistics) -> WignerEstimate:
    """``2 Re C(t*)`` with ``t*`` half the classical period (harmonic) or revival time (box)."""
    if spectrum.kind not in ("harmonic", "box"):
        raise InvalidInputError("half-period parity needs a harmonic or box spectrum")
    c = autocorrelation(spectrum, stats, spectrum.half_period)
    return WignerEstimate(complex(2.0 * c.real, 0.0))


def spectrum_from_config(cfg: dict) -> SpectrumModel:
    """Build a spectrum from flat ``spectrum.*`` keys.

    ``spectrum.table`` lists ``n:omega`` pairs separated by commas; the pairs
    must cover ``n = 0..K-1`` exactly once.
    """
    kind = cfg.get("spectrum.kind")
    if kind is None:
        raise InvalidInputError("config lacks spectrum.kind")
    levels = int(cfg.get("spectrum.levels", DEFAULT_LEVELS))
    if kind == "harmonic":
        return SpectrumModel.harmonic(float(cfg.get("spectrum.T_cl", 2 * math.pi)), levels)
    if kind == "box":
        return SpectrumModel.box(float(cfg.get("spectrum.T_r", 2 * math.pi)), levels)
    if kind == "sqrt":
        return SpectrumModel.sqrt(float(cfg.get("spectrum.Omega", 1.0)), levels)
    if kind == "custom":
        raw = cfg.get("spectrum.table")
        if not raw:
            raise InvalidInputError("custom spectrum needs spectrum.table")
        pairs = {}
        for item in str(raw).split(","):
            try:
                n, w = item.split(":")
                pairs[int(n)] = float(w)
            except ValueError as exc:
                raise InvalidInputError(f"bad spectrum.table entry {item.strip()!r}") from exc
        if sorted(pairs) != list(range(len(pairs))):
            raise InvalidInputError("spectrum.table must cover n = 0..K-1")
        return SpectrumModel.custom([pairs[n] for n in range(len(pairs))])
    raise InvalidInputError(f"unknown spectrum kind {kind!r}")
