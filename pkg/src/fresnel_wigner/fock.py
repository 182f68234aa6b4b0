"""Truncated Fock-space states, displacements and the parity-sum Wigner value.

Conventions: the Wigner function is normalized so that physical states obey
``|W(alpha)| <= 2`` (twice the displaced parity expectation value).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedReferenceError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
PROB_TOL = 1e-10
TRUNCATION_WARN = 0.999


def as_alpha(alpha) -> complex:
    """Coerce a displacement amplitude to ``complex``, rejecting NaN/Inf."""
    try:
        value = complex(alpha)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"displacement must be a complex number, got {alpha!r}") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InvalidInputError(f"displacement must be finite, got {value!r}")
    return value


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockDensityMatrix:
    """Density matrix in the number basis, levels ``0 .. dim-1``.

    Validated on construction: Hermitian, unit trace, positive semidefinite.
    """

    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise InvalidInputError(f"density matrix must be square and non-empty, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvalidInputError("density matrix has non-finite entries")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidInputError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise InvalidInputError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise InvalidInputError("density matrix is not positive semidefinite")
        object.__setattr__(self, "entries", _readonly(rho))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def fock(cls, n: int, dim: int | None = None) -> "FockDensityMatrix":
        """Number state ``|n><n|``."""
        if n < 0:
            raise InvalidInputError("Fock level must be nonnegative")
        dim = n + 1 if dim is None else dim
        if dim <= n:
            raise InvalidInputError(f"dim={dim} cannot hold level {n}")
        rho = np.zeros((dim, dim), dtype=complex)
        rho[n, n] = 1.0
        return cls(rho)

    @classmethod
    def from_ket(cls, psi) -> "FockDensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        norm = np.linalg.norm(psi)
        if psi.ndim != 1 or norm == 0:
            raise InvalidInputError("ket must be a nonzero vector")
        psi = psi / norm
        rho = np.outer(psi, psi.conj())
        # exact hermiticity regardless of rounding in the outer product
        return cls(0.5 * (rho + rho.conj().T))

    @classmethod
    def coherent(cls, beta, dim: int) -> "FockDensityMatrix":
        beta = as_alpha(beta)
        return cls.from_ket(displacement_matrix(beta, dim)[:, 0])

    @classmethod
    def thermal(cls, nbar: float, dim: int) -> "FockDensityMatrix":
        if nbar < 0:
            raise InvalidInputError("mean occupation must be nonnegative")
        n = np.arange(dim)
        p = (nbar / (1 + nbar)) ** n if nbar > 0 else (n == 0).astype(float)
        return cls(np.diag(p / p.sum()).astype(complex))


@dataclass(frozen=True)
class NumberStatistics:
    """Occupation probabilities ``P_n`` of a (displaced) state.

    ``truncation_warning`` is set when the captured weight falls below 0.999,
    i.e. a noticeable part of the state lives above the working dimension.
    """

    probs: np.ndarray
    truncation_warning: bool = field(default=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InvalidInputError("statistics must be a non-empty vector")
        if not np.all(np.isfinite(p)):
            raise InvalidInputError("statistics contain non-finite values")
        if p.min() < -PROB_TOL or p.max() > 1 + PROB_TOL:
            raise InvalidInputError("occupation probabilities must lie in [0, 1]")
        p = np.clip(p, 0.0, None)
        if p.sum() > 1 + PROB_TOL:
            raise InvalidInputError(f"captured weight {p.sum()!r} exceeds 1")
        object.__setattr__(self, "probs", _readonly(p))
        if p.sum() < TRUNCATION_WARN:
            object.__setattr__(self, "truncation_warning", True)

    @property
    def dim(self) -> int:
        return self.probs.size

    @property
    def captured_weight(self) -> float:
        return float(self.probs.sum())

    def top_level(self, threshold: float = 1e-12) -> int:
        """Highest level whose occupation exceeds ``threshold``."""
        occupied = np.nonzero(self.probs > threshold)[0]
        return int(occupied[-1]) if occupied.size else 0


@dataclass(frozen=True)
class WignerEstimate:
    """A reconstructed Wigner value.

    ``value`` keeps the imaginary part a reconstruction may produce (a
    data-quality diagnostic); ``error`` is a one-sigma statistical error bar.
    ``endpoint`` is the raw value at the integration limit for methods that
    report a tail-averaged ``value``.
    """

    value: complex
    error: float = 0.0
    endpoint: complex | None = None

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


def displacement_matrix(alpha, dim: int) -> np.ndarray:
    """Matrix elements ``<m|D(alpha)|n>`` for ``0 <= m, n < dim``.

    Every returned element equals the corresponding element of the infinite
    operator (no truncation error), built from the recurrence

        sqrt(n) D[m, n] = sqrt(m) D[m-1, n-1] - conj(alpha) D[m, n-1]

    which follows from ``D a^dag D^dag = a^dag - conj(alpha)`` and is the
    recursive form of the associated-Laguerre closed form.
    """
    alpha = as_alpha(alpha)
    if int(dim) != dim or dim < 1:
        raise InvalidInputError(f"dim must be a positive integer, got {dim!r}")
    dim = int(dim)
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    sq = np.sqrt(np.arange(dim))
    D = np.zeros((dim, dim), dtype=complex)
    D[0, 0] = np.exp(-0.5 * abs(alpha) ** 2)
    for m in range(1, dim):
        D[m, 0] = alpha / sq[m] * D[m - 1, 0]
    ac = alpha.conjugate()
    for n in range(1, dim):
        D[0, n] = -ac / sq[n] * D[0, n - 1]
        D[1:, n] = (sq[1:] * D[:-1, n - 1] - ac * D[1:, n - 1]) / sq[n]
    return D


def working_dim(dim: int, alpha: complex) -> int:
    """Padded dimension used when displacing a ``dim``-level state by ``alpha``."""
    return max(dim + math.ceil(8 * abs(alpha) ** 2 + 10), 2 * dim)


def displaced_number_statistics(rho: FockDensityMatrix, alpha) -> NumberStatistics:
    """Diagonal of ``D(alpha) rho D(alpha)^dag`` over the padded working space.

    The state occupies the first ``rho.dim`` columns, so only those columns of
    the displacement are needed; each returned ``P_n`` is exact and the only
    loss is weight pushed beyond the working dimension.
    """
    alpha = as_alpha(alpha)
    dw = working_dim(rho.dim, alpha)
    D = displacement_matrix(alpha, dw)[:, : rho.dim]
    p = np.einsum("nk,kl,nl->n", D, rho.entries, D.conj()).real
    return NumberStatistics(p)


def wigner_alternating_sum(stats: NumberStatistics) -> WignerEstimate:
    """``2 * sum_n (-1)^n P_n``; feed statistics displaced by ``-alpha`` to get ``W(alpha)``."""
    signs = np.where(np.arange(stats.dim) % 2 == 0, 1.0, -1.0)
    return WignerEstimate(complex(2.0 * math.fsum(signs * stats.probs), 0.0))


def wigner_from_state(rho: FockDensityMatrix, alpha) -> WignerEstimate:
    return wigner_alternating_sum(displaced_number_statistics(rho, -as_alpha(alpha)))


def analytic_wigner_fock(n: int, alpha) -> float:
    """Closed-form Wigner function of ``|0>`` or ``|1>``."""
    r2 = abs(as_alpha(alpha)) ** 2
    if n == 0:
        return 2.0 * math.exp(-2 * r2)
    if n == 1:
        return -2.0 * (1 - 4 * r2) * math.exp(-2 * r2)
    raise UnsupportedReferenceError(f"no closed-form reference for |{n}>, only |0> and |1>")
