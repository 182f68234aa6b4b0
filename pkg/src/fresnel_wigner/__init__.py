"""Wigner-function reconstruction from Rabi oscillations and autocorrelation data."""

from .discrete import (
    DiscreteKernel,
    cutoff_scan,
    design_matrix,
    discrete_wigner,
    optimize_times,
    propagate_error,
    solve_kernel,
)
from .dynamics import (
    AutocorrelationTrace,
    NoiseModel,
    RabiSignal,
    autocorrelation,
    rabi_probability,
    simulate_autocorrelation,
    simulate_signal,
)
from .errors import AlignmentError, CoverageError, InvalidInputError, ParseError, ValidationError
from .fock import (
    FockDensityMatrix,
    NumberStatistics,
    WignerEstimate,
    analytic_wigner_fock,
    displaced_number_statistics,
    displacement_matrix,
    wigner_alternating_sum,
)
from .fresnel import FresnelSettings, convergence_trace, fresnel_identity, fresnel_weight, truncated_reconstruct
from .grid import GridSpec, MethodSettings, WignerMap, grid_reconstruct
from .io import emit_outputs, parse_signal_csv, write_signal_csv
from .spectra import SpectrumModel, general_reconstruct, kernel_time_domain, wigner_at_half_period

__version__ = "0.1.0"
