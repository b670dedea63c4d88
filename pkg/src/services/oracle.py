"""
Brute-force eigensolver for the radial Bessel problem on (0, rho0) with a
Dirichlet wall.

Works on the Liouville form u = sqrt(rho) R:
    -u'' + ((nu^2 - 1/4) / rho^2) u = eta^2 u,   u(0) = u(rho0) = 0
discretised on rho_i = i h, h = rho0 / (points + 1). The matrix is symmetric
tridiagonal with off-diagonal -1/h^2, so eigenvalues come from Sturm-sequence
bisection. Nothing in this module touches services.specfun.
"""
import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.linalg import eigh_tridiagonal

import config
from errors import ConvergenceOrderError, DomainError, ResolutionError

logger = logging.getLogger(__name__)

try:
    from numba import njit
except Exception as e:  # numba/llvmlite can fail to load on exotic platforms
    logger.warning("Numba disabled, Sturm counts run in pure Python: %s: %s", type(e).__name__, e)

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda func: func


@njit(nogil=True)
def _sturm_count(scaled_potential, mu):
    """Eigenvalues of tridiag(-1, 2 + w, -1) strictly below mu.

    Runs the Sturm recurrence q_i = 2 + w_i - mu - 1/q_{i-1} in the variable
    s_i = q_i - 1, i.e. s_i = s_{i-1} / (1 + s_{i-1}) + (w_i - mu), so the small
    shift mu is never added to the O(1) diagonal. q_i < 0 exactly when 1 + s_i < 0.
    """
    count = 0
    s = 1.0 + (scaled_potential[0] - mu)
    if 1.0 + s < 0.0:
        count += 1
    for i in range(1, scaled_potential.shape[0]):
        pivot = 1.0 + s
        if pivot == 0.0:
            pivot = 1e-300
        s = s / pivot + (scaled_potential[i] - mu)
        if 1.0 + s < 0.0:
            count += 1
    return count


@dataclass
class DiscreteOperator:
    grid_step: float
    diag: np.ndarray
    offdiag: np.ndarray
    nu: float
    rho0: float
    # h^2 V_i, the diagonal minus 2 in units of 1/h^2
    scaled_potential: np.ndarray

    @property
    def dimension(self) -> int:
        return self.diag.size

    @property
    def grid(self) -> np.ndarray:
        return self.grid_step * np.arange(1, self.dimension + 1)


@dataclass
class RichardsonEstimate:
    value: float
    order: float
    eigenvalues: List[float]
    points: List[int]


def axis_potential(nu: float, h: float, points: int) -> np.ndarray:
    """Node potential exact on the regular axis solution rho^(|nu| + 1/2).

    Equals (nu^2 - 1/4) / rho_i^2 + O(h^2 / rho^4); using it keeps the
    eigenvalue error O(h^2) for |nu| < 1 as well.
    """
    p = abs(nu) + 0.5
    if p == 1.0:
        return np.zeros(points)
    i = np.arange(1, points + 1, dtype=float)
    # (1 + u)^p - 1 via expm1/log1p keeps the second difference accurate for large i
    with np.errstate(divide="ignore"):
        # log1p(-1) = -inf at i = 1, where (1 - 1)^p - 1 = -1 exactly
        bracket = np.expm1(p * np.log1p(1.0 / i)) + np.expm1(p * np.log1p(-1.0 / i))
    return bracket / (h * h)


def discretize(nu: float, rho0: float, points: int) -> DiscreteOperator:
    if points < config.MIN_ORACLE_POINTS:
        raise ResolutionError(f"oracle needs at least {config.MIN_ORACLE_POINTS} points, got {points}")
    if not rho0 > 0:
        raise DomainError(f"wall radius must be positive, got {rho0!r}")
    h = rho0 / (points + 1)
    scaled = axis_potential(nu, 1.0, points)
    diag = (2.0 + scaled) / (h * h)
    offdiag = np.full(points - 1, -1.0 / (h * h))
    return DiscreteOperator(
        grid_step=h, diag=diag, offdiag=offdiag, nu=float(nu), rho0=float(rho0), scaled_potential=scaled,
    )


def _eigenvalue(op: DiscreteOperator, k: int, rtol: float) -> float:
    # bisection on mu = h^2 lambda; Gershgorin bounds of tridiag(-1, 2 + w, -1)
    w = op.scaled_potential
    lo = float(np.min(w))
    hi = float(np.max(w)) + 4.0
    while hi - lo > rtol * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _sturm_count(w, mid) > k:
            hi = mid
        else:
            lo = mid
    h = op.grid_step
    return 0.5 * (lo + hi) / (h * h)


def lowest_eigenvalues(op: DiscreteOperator, count: int, rtol: float = 1e-14) -> np.ndarray:
    """The ``count`` smallest eigenvalues, increasing, by Sturm bisection."""
    if count < 1 or count > op.dimension // 4:
        raise DomainError(f"count must lie in [1, {op.dimension // 4}], got {count}")
    return np.array([_eigenvalue(op, k, rtol) for k in range(count)])


def mode_node_count(op: DiscreteOperator, index: int) -> int:
    """Interior sign changes of the index-th eigenvector (index >= 1)."""
    if index < 1:
        raise DomainError(f"mode index must be >= 1, got {index}")
    _, vectors = eigh_tridiagonal(op.diag, op.offdiag, select="i", select_range=(index - 1, index - 1))
    v = vectors[:, 0]
    v = v[np.abs(v) > 1e-12 * np.max(np.abs(v))]
    return int(np.count_nonzero(np.diff(np.sign(v))))


def _refined(points: int) -> int:
    # halves h = rho0 / (points + 1)
    return 2 * (points + 1) - 1


def richardson(nu: float, rho0: float, index: int, points: int = config.ORACLE_POINTS) -> RichardsonEstimate:
    """h^2-Richardson extrapolant of the index-th eigenvalue plus the observed order."""
    if index < 1:
        raise DomainError(f"eigenvalue index must be >= 1, got {index}")
    resolutions = [points, _refined(points), _refined(_refined(points))]
    values = []
    for n in resolutions:
        op = discretize(nu, rho0, n)
        values.append(lowest_eigenvalues(op, index)[-1])
    coarse, mid, fine = values
    denominator = mid - fine
    if denominator == 0.0 or (coarse - mid) / denominator <= 0.0:
        order = math.nan
    else:
        order = math.log2((coarse - mid) / denominator)
    value = (4.0 * mid - coarse) / 3.0
    logger.debug("oracle nu=%s rho0=%s index=%d -> %.17g (order %.4f)", nu, rho0, index, value, order)
    return RichardsonEstimate(value=value, order=order, eigenvalues=values, points=resolutions)


def observed_order(nu: float, rho0: float, index: int, points: int = config.ORACLE_POINTS) -> float:
    return richardson(nu, rho0, index, points).order


def eigenvalue_extrapolated(nu: float, rho0: float, index: int, points: int = config.ORACLE_POINTS) -> float:
    """Extrapolated eta^2 of the index-th mode; rejects an implausible convergence order."""
    estimate = richardson(nu, rho0, index, points)
    low, high = config.ORDER_HARD_BAND
    if not low <= estimate.order <= high:
        raise ConvergenceOrderError(estimate.order, low, high)
    return estimate.value
