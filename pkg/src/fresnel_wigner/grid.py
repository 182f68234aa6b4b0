"""Phase-space maps: one reconstruction per grid point, in parallel.

Each grid point ``alpha`` is reconstructed from data taken with the state
displaced by ``-alpha``. In simulation mode the data are synthesized here;
in measured mode they are looked up among the supplied signals by
displacement, and missing points become gaps (NaN) rather than failures.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .discrete import discrete_wigner, optimize_times, solve_kernel
from .dynamics import AutocorrelationTrace, NoiseModel, RabiSignal, simulate_autocorrelation, simulate_signal
from .errors import InvalidInputError
from .fock import FockDensityMatrix, WignerEstimate, displaced_number_statistics
from .fresnel import FresnelSettings, truncated_reconstruct
from .io import worker_count
from .spectra import SpectrumModel, general_reconstruct, kernel_time_domain, stationary_omega_max

METHODS = ("fresnel", "discrete", "general")
_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    re_min: float = 0.0
    re_max: float = 0.0
    im_min: float = 0.0
    im_max: float = 0.0
    n_re: int = 1
    n_im: int = 1

    def __post_init__(self):
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise InvalidInputError("grid bounds must be ordered (min <= max)")
        if int(self.n_re) != self.n_re or int(self.n_im) != self.n_im or self.n_re < 1 or self.n_im < 1:
            raise InvalidInputError("grid counts must be integers >= 1")

    def axis_re(self):
        return np.linspace(self.re_min, self.re_max, self.n_re) if self.n_re > 1 else np.array([self.re_min])

    def axis_im(self):
        return np.linspace(self.im_min, self.im_max, self.n_im) if self.n_im > 1 else np.array([self.im_min])

    def points(self) -> np.ndarray:
        """Complex grid of shape ``(n_re, n_im)``; real part varies along axis 0."""
        re, im = np.meshgrid(self.axis_re(), self.axis_im(), indexing="ij")
        return re + 1j * im


@dataclass(frozen=True)
class MethodSettings:
    """Everything a grid run needs beyond the state and the grid.

    Unset optional fields are derived: discrete times are optimized when
    ``taus`` is None, the general-method cutoff comes from
    :func:`stationary_omega_max` when ``omega_max`` is None.
    """

    method: str = "fresnel"
    fresnel: FresnelSettings = field(default_factory=FresnelSettings)
    samples: int = 2001
    noise: NoiseModel = field(default_factory=NoiseModel)
    # discrete
    cutoff: int = 60
    decay: float | None = None
    taus: tuple | None = None
    m_times: int = 20
    discrete_tau_max: float = 6 * math.pi
    budget: int = 2000
    seed: int = 0
    # general
    spectrum: SpectrumModel | None = None
    t_max: float = 6 * math.pi
    omega_max: float | None = None
    window: float = 4.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.samples < 4:
            raise InvalidInputError("need at least 4 samples per signal")


@dataclass(frozen=True)
class WignerMap:
    grid: GridSpec
    points: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    gaps: np.ndarray

    @property
    def shape(self):
        return self.values.shape


def _run(func, items, threads):
    n = threads if threads is not None else worker_count()
    if n <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))  # map preserves input order


def _simulate_point(rho, alpha, index, settings: MethodSettings, taus, kernel):
    noise = settings.noise.spawn(index)
    if settings.method == "fresnel":
        return truncated_reconstruct(simulate_signal(rho, -alpha, taus, noise), settings.fresnel)
    if settings.method == "discrete":
        return discrete_wigner(simulate_signal(rho, -alpha, taus, noise), kernel)
    trace = simulate_autocorrelation(rho, -alpha, settings.spectrum, taus)
    return general_reconstruct(trace, kernel)


def _measured_point(record, settings: MethodSettings):
    if record is None:
        return None
    if settings.method == "fresnel":
        return truncated_reconstruct(record, settings.fresnel)
    if settings.method == "discrete":
        kernel = solve_kernel(record.taus, settings.cutoff, decay=settings.decay)
        return discrete_wigner(record, kernel)
    kernel = kernel_time_domain(settings.spectrum, record.times, settings.omega_max, settings.window)
    return general_reconstruct(record, kernel)


def discrete_times(settings: MethodSettings) -> np.ndarray:
    if settings.taus is not None:
        return np.asarray(settings.taus, dtype=float)
    return optimize_times(
        settings.m_times, (0.0, settings.discrete_tau_max), settings.cutoff, settings.budget, settings.seed, settings.decay
    )


def _match(records, alpha):
    for rec in records:
        if abs(-rec.alpha - alpha) <= _MATCH_TOL * max(1.0, abs(alpha)):
            return rec
    return None


def grid_reconstruct(source, grid: GridSpec, settings: MethodSettings | None = None, threads=None) -> WignerMap:
    """Wigner map over ``grid``.

    ``source`` is a :class:`FockDensityMatrix` (simulation) or an iterable of
    :class:`RabiSignal` / :class:`AutocorrelationTrace` records (measured).
    """
    settings = settings or MethodSettings()
    points = grid.points()
    flat = points.ravel()

    if isinstance(source, FockDensityMatrix):
        rho = source
        kernel = None
        if settings.method == "fresnel":
            times = np.linspace(0.0, settings.fresnel.tau_m, settings.samples)
        elif settings.method == "discrete":
            times = discrete_times(settings)
            kernel = solve_kernel(times, settings.cutoff, decay=settings.decay)
        else:
            if settings.spectrum is None:
                raise InvalidInputError("the general method needs a spectrum")
            times = np.linspace(0.0, settings.t_max, settings.samples)
            top = max(displaced_number_statistics(rho, -a).top_level() for a in flat)
            top = min(top, settings.spectrum.levels - 1)
            omega_max = settings.omega_max or stationary_omega_max(settings.spectrum, settings.t_max, top, settings.window)
            kernel = kernel_time_domain(settings.spectrum, times, omega_max, settings.window, top)
        results = _run(
            lambda item: _simulate_point(rho, item[1], item[0], settings, times, kernel),
            list(enumerate(flat)),
            threads,
        )
    else:
        records = list(source)
        wanted = AutocorrelationTrace if settings.method == "general" else RabiSignal
        if not all(isinstance(r, wanted) for r in records):
            raise InvalidInputError(f"{settings.method} method needs {wanted.__name__} records")
        if settings.method == "general" and (settings.spectrum is None or settings.omega_max is None):
            raise InvalidInputError("measured general reconstruction needs spectrum and omega_max")
        results = _run(lambda a: _measured_point(_match(records, a), settings), list(flat), threads)

    values = np.array([r.value if r is not None else complex(np.nan, np.nan) for r in results])
    errors = np.array([r.error if r is not None else np.nan for r in results])
    gaps = np.array([r is None for r in results])
    shape = points.shape
    return WignerMap(grid, points, values.reshape(shape), errors.reshape(shape), gaps.reshape(shape))


def single_point(source, alpha: complex, settings: MethodSettings | None = None) -> WignerEstimate:
    """Convenience: the 1x1 grid at ``alpha``."""
    g = GridSpec(alpha.real, alpha.real, alpha.imag, alpha.imag, 1, 1)
    m = grid_reconstruct(source, g, settings, threads=1)
    return WignerEstimate(complex(m.values[0, 0]), float(m.errors[0, 0]))
