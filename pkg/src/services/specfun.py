"""
Bessel functions of the first kind for real order nu >= 0 and real x >= 0.

Three evaluation regimes:
  * ascending power series for x <= SERIES_MAX_X or x^2 <= 8 (nu + 1), where
    no term exceeds about 10 in magnitude,
  * Hankel large-argument expansion for x >= max(HANKEL_MIN_X, nu^2),
  * Miller backward recurrence normalised by the Neumann series
        (x/2)^a = sum_k (a + 2k) Gamma(a + k) / k! J_{a+2k}(x)
    everywhere in between.
No scipy.special here: the spectrum pipeline has to stay independent of the
references the tests compare against.
"""
import logging
import math
from typing import Iterable, List

import numpy as np

import config
from errors import DomainError, EvaluationError

logger = logging.getLogger(__name__)

_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_RESCALE = 1e250
_MIN_ZERO_GAP = 2.5   # consecutive zeros of J_nu, nu >= 0, are more than 3 apart
_SCAN_STEP = 0.5
_EPS = float(np.finfo(float).eps)


def _check_order(nu: float) -> None:
    if not nu >= 0:
        raise DomainError(f"Bessel order must be non-negative, got {nu!r}")


def gamma_lanczos(x: float) -> float:
    """Gamma(x) for x > 0 (Lanczos, g = 7)."""
    if not x > 0:
        raise DomainError(f"gamma_lanczos needs x > 0, got {x!r}")
    if x < 0.5:
        return gamma_lanczos(x + 1.0) / x
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    try:
        value = math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc
    except OverflowError as exc:
        raise EvaluationError(f"Gamma({x + 1.0!r}) overflows") from exc
    if not math.isfinite(value):
        raise EvaluationError(f"Gamma({x + 1.0!r}) overflows")
    return value


def _series(nu: float, x: float) -> float:
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    try:
        term = half ** nu / gamma_lanczos(nu + 1.0)
    except OverflowError as exc:
        raise EvaluationError(f"series leading term overflows at nu={nu!r}, x={x!r}") from exc
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (nu + k))
        total += term
        if abs(term) <= 1e-17 * abs(total) or term == 0.0:
            break
        if k > 500:
            raise EvaluationError(f"power series did not converge at nu={nu!r}, x={x!r}")
    return total


def _hankel(nu: float, x: float) -> float:
    mu = 4.0 * nu * nu
    p, q = 1.0, 0.0
    term = 1.0
    previous = math.inf
    k = 0
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        size = abs(term)
        if size == 0.0 or size >= previous:
            break
        # (-1)^(k/2) on even terms feeds P, (-1)^((k-1)/2) on odd terms feeds Q
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * term
        else:
            p += sign * term
        if size < 1e-17:
            break
        previous = size
    chi = x - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def _miller(nu: float, x: float) -> float:
    m = int(math.floor(nu))
    alpha = nu - m
    top = max(x, nu)
    start = m + int(top + 10.0 * top ** (1.0 / 3.0) + 30.0)
    start += start % 2

    # Neumann coefficients c_k = (alpha + 2k) Gamma(alpha + k) / k!
    coeffs = np.empty(start // 2 + 1)
    coeffs[0] = gamma_lanczos(alpha + 1.0)
    g = coeffs[0]
    for k in range(1, coeffs.size):
        if k > 1:
            g *= (alpha + k - 1.0) / k
        coeffs[k] = (alpha + 2.0 * k) * g

    upper, current = 0.0, 1e-30
    norm = coeffs[start // 2] * current
    target = current if start == m else 0.0
    for j in range(start, 0, -1):
        lower = 2.0 * (alpha + j) / x * current - upper
        upper, current = current, lower
        if (j - 1) % 2 == 0:
            norm += coeffs[(j - 1) // 2] * current
        if j - 1 == m:
            target = current
        if abs(current) > _RESCALE:
            upper /= _RESCALE
            current /= _RESCALE
            norm /= _RESCALE
            target /= _RESCALE
    return target * (0.5 * x) ** alpha / norm


def bessel_j(nu: float, x: float) -> float:
    """J_nu(x) for nu >= 0, x >= 0."""
    _check_order(nu)
    if not x >= 0:
        raise DomainError(f"bessel_j needs x >= 0, got {x!r}")
    nu, x = float(nu), float(x)
    if x * x <= max(config.SERIES_MAX_X ** 2, 8.0 * (nu + 1.0)):
        value = _series(nu, x)
    elif x >= max(config.HANKEL_MIN_X, nu * nu):
        value = _hankel(nu, x)
    else:
        value = _miller(nu, x)
    if not math.isfinite(value):
        raise EvaluationError(f"J_{nu!r}({x!r}) is not finite")
    return value


_REGIMES = {"series": _series, "hankel": _hankel, "miller": _miller}


def bessel_j_regime(nu: float, x: float, regime: str) -> float:
    """J_nu(x) forced through one evaluation regime; used to check the switchovers agree."""
    _check_order(nu)
    if not x > 0:
        raise DomainError(f"bessel_j_regime needs x > 0, got {x!r}")
    try:
        method = _REGIMES[regime]
    except KeyError:
        raise ValueError(f"unknown regime {regime!r}, expected one of {sorted(_REGIMES)}") from None
    return method(float(nu), float(x))


def bessel_j_array(nu: float, xs: Iterable[float]) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    return np.fromiter((bessel_j(nu, x) for x in xs.ravel()), dtype=float, count=xs.size).reshape(xs.shape)


def bessel_j_prime(nu: float, x: float) -> float:
    """dJ_nu/dx, from (J_{nu-1} - J_{nu+1})/2; nu < 1 uses (nu/x) J_nu - J_{nu+1}."""
    _check_order(nu)
    if not x > 0:
        raise DomainError(f"bessel_j_prime needs x > 0, got {x!r}")
    if nu >= 1.0:
        return 0.5 * (bessel_j(nu - 1.0, x) - bessel_j(nu + 1.0, x))
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


def bessel_j_leading(nu: float, x: float) -> float:
    """Leading large-argument form sqrt(2/(pi x)) cos(x - nu pi/2 - pi/4)."""
    _check_order(nu)
    if not x > 0:
        raise DomainError(f"bessel_j_leading needs x > 0, got {x!r}")
    return math.sqrt(2.0 / (math.pi * x)) * math.cos(x - 0.5 * nu * math.pi - 0.25 * math.pi)


def neumann_y(nu: float, x: float) -> float:
    """Not provided: the radial solution must be regular on the axis, so N_nu never enters."""
    raise NotImplementedError("Neumann functions are excluded by regularity at rho = 0")


def mcmahon_zero(nu: float, n: int) -> float:
    """McMahon's large-n estimate of the n-th zero of J_nu."""
    _check_order(nu)
    beta = (n + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    b8 = 8.0 * beta
    return (
        beta
        - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 ** 3)
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8 ** 5)
    )


def _refine_zero(nu: float, a: float, b: float, fa: float, guess: float) -> float:
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(100):
        fx = bessel_j(nu, x)
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b = x
        step = fx / bessel_j_prime(nu, x)
        # converged Newton: x is already one of the bracket ends, so test before bracketing
        if abs(step) <= 4.0 * _EPS * x:
            return x
        candidate = x - step
        if not a < candidate < b:
            candidate = 0.5 * (a + b)
        if candidate == x:
            return x
        if abs(candidate - x) <= config.ZERO_TOLERANCE or b - a <= config.ZERO_TOLERANCE:
            return candidate
        x = candidate
    logger.warning("zero refinement for nu=%s stopped at iteration cap near x=%s", nu, x)
    return x


def bessel_zeros(nu: float, count: int) -> List[float]:
    """First ``count`` positive zeros of J_nu, in increasing order."""
    _check_order(nu)
    if count < 1:
        raise DomainError(f"zero count must be >= 1, got {count!r}")
    zeros: List[float] = []
    # J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > sqrt(nu (nu + 2))
    a = max(math.sqrt(nu * (nu + 2.0)), 0.5)
    fa = bessel_j(nu, a)
    while len(zeros) < count:
        b = a + _SCAN_STEP
        fb = bessel_j(nu, b)
        if fb == 0.0:
            root = b
        elif (fb > 0) == (fa > 0):
            a, fa = b, fb
            continue
        else:
            root = _refine_zero(nu, a, b, fa, mcmahon_zero(nu, len(zeros) + 1))
        zeros.append(root)
        a = root + _MIN_ZERO_GAP
        fa = bessel_j(nu, a)
    logger.debug("bessel_zeros(nu=%s, count=%d) -> last %.17g", nu, count, zeros[-1])
    return zeros


def bessel_zero(nu: float, n: int) -> float:
    """n-th positive zero j_{nu,n}, n >= 1."""
    if n < 1:
        raise DomainError(f"zero index must be >= 1, got {n!r}")
    return bessel_zeros(nu, n)[-1]
