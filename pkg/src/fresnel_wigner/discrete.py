"""Discrete reconstruction from a handful of interaction times.

Kernel coefficients ``f_j`` are fitted in the least-squares sense to the
truncated system

    sum_j cos(2 sqrt(n+1) tau_j) f_j = (-1)^(n+1),    n = 0 .. N-1,

after which ``W = 4 sum_j f_j (p_j - 1/2)`` and ``dW = 4 sqrt(sum_j f_j^2 dp_j^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import RabiSignal
from .errors import AlignmentError, InvalidInputError
from .fock import WignerEstimate, _readonly

DEGENERATE_CONDITION = 1e12
_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class DiscreteKernel:
    taus: np.ndarray
    coeffs: np.ndarray
    cutoff: int
    residual_norm: float
    condition_estimate: float
    degenerate: bool = False

    @property
    def size(self) -> int:
        return self.taus.size

    @property
    def abs_coeffs(self) -> np.ndarray:
        """``|f_j|``: where these are large, measurement error is amplified most."""
        return np.abs(self.coeffs)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class ScanPoint:
    cutoff: int
    estimate: WignerEstimate
    kernel: DiscreteKernel


def _check_taus(taus) -> np.ndarray:
    taus = np.asarray(taus, dtype=float).reshape(-1)
    if taus.size < 1:
        raise InvalidInputError("need at least one interaction time")
    if not np.all(np.isfinite(taus)) or np.any(taus < 0):
        raise InvalidInputError("interaction times must be finite and nonnegative")
    if np.unique(taus).size != taus.size:
        raise InvalidInputError("interaction times must be distinct")
    return taus


def design_matrix(taus, cutoff: int) -> np.ndarray:
    """``A[n, j] = cos(2 sqrt(n+1) tau_j)`` for ``n < cutoff``."""
    taus = _check_taus(taus)
    if int(cutoff) != cutoff or cutoff < taus.size:
        raise InvalidInputError(f"cutoff N={cutoff} must be an integer >= M={taus.size}")
    return np.cos(np.outer(2.0 * np.sqrt(np.arange(int(cutoff)) + 1.0), taus))


def geometric_weights(cutoff: int, decay: float) -> np.ndarray:
    """Equation weights ``decay**n``; emphasizes the low levels physical states occupy."""
    if not 0 < decay <= 1:
        raise InvalidInputError("weight decay must lie in (0, 1]")
    return decay ** np.arange(cutoff, dtype=float)


def parity_targets(cutoff: int) -> np.ndarray:
    return np.where(np.arange(cutoff) % 2 == 0, -1.0, 1.0)


def solve_kernel(taus, cutoff: int, weights=None, decay: float | None = None) -> DiscreteKernel:
    """Weighted least-squares kernel coefficients.

    Minimizes ``sum_n w_n (A f - b)_n^2`` by pivoted QR on the row-scaled
    system. ``weights`` takes precedence over ``decay``; with neither the
    weights are uniform. If the scaled system's condition number exceeds
    1e12 the minimum-norm SVD solution is returned and ``degenerate`` is set.
    ``residual_norm`` is the weighted residual (unweighted for uniform weights).
    """
    taus = _check_taus(taus)
    A = design_matrix(taus, cutoff)
    cutoff = int(cutoff)
    if weights is None:
        weights = np.ones(cutoff) if decay is None else geometric_weights(cutoff, decay)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (cutoff,) or np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise InvalidInputError("weights must be positive, one per equation")
    # solve in sorted-time order so the result does not depend on input order
    order = np.argsort(taus)
    s = np.sqrt(weights)
    As = A[:, order] * s[:, None]
    bs = parity_targets(cutoff) * s
    sv = np.linalg.svd(As, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    degenerate = cond > DEGENERATE_CONDITION
    if degenerate:
        f_sorted = np.linalg.lstsq(As, bs, rcond=1.0 / DEGENERATE_CONDITION)[0]
    else:
        Q, R, piv = scipy.linalg.qr(As, mode="economic", pivoting=True)
        z = scipy.linalg.solve_triangular(R, Q.T @ bs)
        f_sorted = np.empty_like(z)
        f_sorted[piv] = z
    residual = float(np.linalg.norm(As @ f_sorted - bs))
    coeffs = np.empty_like(f_sorted)
    coeffs[order] = f_sorted
    return DiscreteKernel(_readonly(taus), _readonly(coeffs), cutoff, residual, max(cond, 1.0), degenerate)


def propagate_error(kernel: DiscreteKernel | np.ndarray, sigmas) -> float:
    """``4 sqrt(sum_j f_j^2 sigma_j^2)``."""
    coeffs = kernel.coeffs if isinstance(kernel, DiscreteKernel) else np.asarray(kernel, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.shape != coeffs.shape:
        raise InvalidInputError("one sigma per kernel coefficient is required")
    if np.any(sigmas < 0):
        raise InvalidInputError("sigmas must be nonnegative")
    return 4.0 * math.sqrt(math.fsum((coeffs * sigmas) ** 2))


def discrete_wigner(signal: RabiSignal, kernel: DiscreteKernel) -> WignerEstimate:
    """``4 sum_j f_j (p_j - 1/2)`` at ``signal.point``, with propagated error."""
    if not np.array_equal(signal.taus, kernel.taus):
        raise AlignmentError("signal sample times differ from the kernel's times")
    value = 4.0 * math.fsum(kernel.coeffs * (signal.probs - 0.5))
    return WignerEstimate(complex(value, 0.0), propagate_error(kernel, signal.sigmas))


def cutoff_scan(signal: RabiSignal, taus, cutoffs, weights=None, decay: float | None = None) -> list[ScanPoint]:
    """One estimate per cutoff ``N``.

    ``weights``, if given, is a callable ``cutoff -> weight vector``.
    """
    out = []
    for n_cut in cutoffs:
        w = weights(n_cut) if callable(weights) else None
        kernel = solve_kernel(taus, n_cut, weights=w, decay=decay)
        out.append(ScanPoint(int(n_cut), discrete_wigner(signal, kernel), kernel))
    return out


def _objective(taus, cutoff, decay):
    return solve_kernel(taus, cutoff, decay=decay).norm


def optimize_times(
    M: int,
    tau_range: tuple[float, float],
    cutoff: int,
    iterations: int = 2000,
    seed: int = 0,
    decay: float | None = None,
) -> np.ndarray:
    """Search for ``M`` interaction times in ``(lo, hi]`` with small ``||f||_2``.

    A quarter of the evaluation budget goes to uniform random restarts; the
    rest refines the best grid by cyclic golden-section line searches, each
    time bracketed between its neighbours. The best grid ever evaluated is
    returned (sorted).
    """
    lo, hi = map(float, tau_range)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0 or hi <= lo:
        raise InvalidInputError(f"infeasible time range ({lo}, {hi}]")
    if M < 2 or cutoff < M:
        raise InvalidInputError("need M >= 2 and cutoff >= M")
    if iterations < 1:
        raise InvalidInputError("budget must be at least one evaluation")
    rng = np.random.default_rng(seed)
    budget = int(iterations)
    used = 0
    best_taus, best_val = None, math.inf

    def evaluate(taus):
        nonlocal used, best_taus, best_val
        used += 1
        val = _objective(taus, cutoff, decay)
        if val < best_val:
            best_taus, best_val = np.sort(taus), val
        return val

    def random_grid():
        while True:
            taus = hi - rng.uniform(0.0, hi - lo, M)  # lands in (lo, hi]
            if np.unique(taus).size == M:
                return np.sort(taus)

    for _ in range(max(1, budget // 4)):
        evaluate(random_grid())
        if used >= budget:
            return best_taus

    while used < budget:
        improved = False
        for j in range(M):
            if used >= budget:
                break
            taus = best_taus.copy()
            a = taus[j - 1] if j > 0 else lo
            b = taus[j + 1] if j < M - 1 else hi
            if b - a <= 1e-9 * hi:
                continue
            # keep strictly inside the bracket so times stay distinct
            a, b = a + 1e-9 * (b - a), b - 1e-9 * (b - a)
            start = best_val

            def f(x):
                trial = taus.copy()
                trial[j] = x
                return evaluate(trial)

            x1, x2 = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
            f1 = f(x1)
            f2 = f(x2) if used < budget else math.inf
            for _ in range(10):
                if used >= budget:
                    break
                if f1 < f2:
                    b, x2, f2 = x2, x1, f1
                    x1 = b - _GOLDEN * (b - a)
                    f1 = f(x1)
                else:
                    a, x1, f1 = x1, x2, f2
                    x2 = a + _GOLDEN * (b - a)
                    f2 = f(x2)
            improved |= best_val < start
        if not improved and used < budget:
            # stuck in a local minimum: perturb the incumbent
            trial = np.clip(best_taus + rng.normal(0, 0.05 * (hi - lo) / M, M), lo + 1e-9 * hi, hi)
            evaluate(np.sort(trial) if np.unique(trial).size == M else random_grid())
    return best_taus

