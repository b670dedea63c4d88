"""
Rotating-frame geometry of the cosmic dislocation spacetime.

Coordinates are ordered (t, rho, phi, z) in the rotating frame and
(T, R, Phi, Z) in the rest frame; signature is (-, +, +, +). Cross terms of the
line element such as 2*omega*rho^2 dphi dt are split symmetrically, so they
contribute omega*rho^2 to both g[t, phi] and g[phi, t].
"""
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

import config
from errors import DomainError, NoAdmissibleRegion

T, RHO, PHI, Z = 0, 1, 2, 3
MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])


@dataclass(frozen=True)
class PhysicalParams:
    """Particle and frame parameters in natural units."""
    mass: float
    omega: float
    zeta: float = 0.0
    k: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass!r}")
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega!r}")
        if self.zeta < 0:
            raise DomainError(f"zeta must be non-negative, got {self.zeta!r}")
        if self.zeta * self.omega >= 1:
            raise NoAdmissibleRegion(self.zeta, self.omega)


@dataclass(frozen=True)
class ConnectionComponent:
    """One nonzero omega_mu^a_b of the connection 1-form."""
    mu: int
    a: int
    b: int
    value: float


@dataclass
class FrameField:
    point: Tuple[float, float, float, float]
    g: np.ndarray
    tetrad: np.ndarray
    connection: List[ConnectionComponent]
    # torsion 2-form is delta-supported on the axis; no numerics are done there
    defect_on_axis: bool = True
    torsion_coefficient: float = 0.0
    inside_region: bool = field(default=True)


def _check_rho(rho) -> None:
    if not rho > 0:
        raise DomainError(f"radial coordinate must be positive, got {rho!r}")


def _matrix(rows, exact: bool) -> np.ndarray:
    return np.array(rows, dtype=object if exact else float)


def singular_radius(params: PhysicalParams) -> float:
    """rho0 = sqrt(1 - zeta^2 omega^2) / omega, where g_tt changes sign."""
    zw = params.zeta * params.omega
    if zw >= 1:
        raise NoAdmissibleRegion(params.zeta, params.omega)
    return math.sqrt(1.0 - zw * zw) / params.omega


def metric_components(params: PhysicalParams, rho, exact: bool = False) -> np.ndarray:
    """Metric of the rotating frame in (t, rho, phi, z).

    With ``exact=True`` the entries keep the input number type (e.g. Fraction).
    """
    _check_rho(rho)
    w, zeta = params.omega, params.zeta
    g_tt = -(1 - w * w * rho * rho - zeta * zeta * w * w)
    g_tphi = w * rho * rho + zeta * zeta * w
    g_tz = zeta * w
    zero, one = 0 * w, 0 * w + 1
    return _matrix([
        [g_tt, zero, g_tphi, g_tz],
        [zero, one, zero, zero],
        [g_tphi, zero, rho * rho + zeta * zeta, zeta],
        [g_tz, zero, zeta, one],
    ], exact)


def rest_frame_metric(zeta, R, exact: bool = False) -> np.ndarray:
    """Metric -dT^2 + dR^2 + R^2 dPhi^2 + (dZ + zeta dPhi)^2 in (T, R, Phi, Z)."""
    _check_rho(R)
    zero, one = 0 * R, 0 * R + 1
    return _matrix([
        [-one, zero, zero, zero],
        [zero, one, zero, zero],
        [zero, zero, R * R + zeta * zeta, zeta + zero],
        [zero, zero, zeta + zero, one],
    ], exact)


def rotation_jacobian(params: PhysicalParams, exact: bool = False) -> np.ndarray:
    """d(T, R, Phi, Z)/d(t, rho, phi, z) for Phi = phi + omega t."""
    w = params.omega
    zero, one = 0 * w, 0 * w + 1
    return _matrix([
        [one, zero, zero, zero],
        [zero, one, zero, zero],
        [w, zero, one, zero],
        [zero, zero, zero, one],
    ], exact)


def pullback_metric(params: PhysicalParams, rho, exact: bool = False) -> np.ndarray:
    """Rest-frame metric pulled back through the rotation: J^T G J."""
    jac = rotation_jacobian(params, exact)
    G = rest_frame_metric(params.zeta, rho, exact)
    return jac.T.dot(G).dot(jac)


def tetrad_components(params: PhysicalParams, rho) -> np.ndarray:
    """Fermi-Walker tetrad e^a_mu; row a is the 1-form theta^a."""
    _check_rho(rho)
    w, zeta = params.omega, params.zeta
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [rho * w, 0.0, rho, 0.0],
        [zeta * w, 0.0, zeta, 1.0],
    ])


def metric_from_tetrad(tetrad: np.ndarray) -> np.ndarray:
    """g_mu_nu = e^a_mu e^b_nu eta_ab."""
    return tetrad.T @ MINKOWSKI @ tetrad


def metric_determinant(params: PhysicalParams, rho) -> float:
    return float(np.linalg.det(metric_components(params, rho)))


def inverse_metric(params: PhysicalParams, rho) -> np.ndarray:
    # det g = -rho^2, so the matrix is invertible even on the wall
    g = metric_components(params, rho)
    return np.linalg.inv(g)


def timelike_observer(params: PhysicalParams, rho) -> bool:
    """True when an observer at rest in the rotating frame is time-like (g_tt < 0)."""
    return bool(metric_components(params, rho)[T, T] < 0)


def connection_components(params: PhysicalParams) -> List[ConnectionComponent]:
    """Nonzero omega_mu^a_b of the Fermi-Walker frame (antisymmetric in the spatial pair)."""
    w = params.omega
    return [
        ConnectionComponent(PHI, 1, 2, -1.0),
        ConnectionComponent(PHI, 2, 1, 1.0),
        ConnectionComponent(T, 1, 2, -w),
        ConnectionComponent(T, 2, 1, w),
    ]


def connection_forms(params: PhysicalParams) -> np.ndarray:
    """omega^a_b as an array [a, b, mu] of 1-form coefficients."""
    forms = np.zeros((4, 4, 4))
    for c in connection_components(params):
        forms[c.a, c.b, c.mu] = c.value
    return forms


def wedge(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """(alpha ^ beta)_{mu nu} = alpha_mu beta_nu - alpha_nu beta_mu."""
    return np.outer(alpha, beta) - np.outer(beta, alpha)


def _tetrad_rho_derivative(params: PhysicalParams) -> np.ndarray:
    # only theta^2 depends on rho, linearly
    d = np.zeros((4, 4))
    d[2, T] = params.omega
    d[2, PHI] = 1.0
    return d


def exterior_derivative(
    params: PhysicalParams,
    rho,
    method: str = "analytic",
    h: float = 1e-3,
) -> np.ndarray:
    """d theta^a as antisymmetric arrays [a, mu, nu].

    Components depend on rho alone, so (d theta^a)_{rho nu} = d_rho e^a_nu.
    """
    _check_rho(rho)
    if method == "analytic":
        de = _tetrad_rho_derivative(params)
    elif method == "finite_difference":
        if not 0 < h < rho:
            raise DomainError(f"finite-difference step must lie in (0, rho), got {h!r}")
        de = (tetrad_components(params, rho + h) - tetrad_components(params, rho - h)) / (2 * h)
    else:
        raise ValueError(f"unknown differentiation method: {method}")

    d_rho = np.zeros(4)
    d_rho[RHO] = 1.0
    return np.stack([wedge(d_rho, de[a]) for a in range(4)])


def torsion_two_form(
    params: PhysicalParams,
    rho,
    method: str = "analytic",
    h: float = 1e-3,
) -> np.ndarray:
    """T^a = d theta^a + omega^a_b ^ theta^b evaluated off the axis."""
    dtheta = exterior_derivative(params, rho, method, h)
    tetrad = tetrad_components(params, rho)
    forms = connection_forms(params)
    torsion = dtheta.copy()
    for a in range(4):
        for b in range(4):
            if np.any(forms[a, b]):
                torsion[a] += wedge(forms[a, b], tetrad[b])
    return torsion


def structure_equation_residual(
    params: PhysicalParams,
    rho,
    method: str = "analytic",
    h: float = 1e-3,
) -> float:
    """max |T^a_{mu nu}| off the axis; zero for the Fermi-Walker connection."""
    return float(np.max(np.abs(torsion_two_form(params, rho, method, h))))


def tetrad_residual(params: PhysicalParams, rho) -> float:
    """max |e^a_mu e^b_nu eta_ab - g_mu_nu| / max(1, |g_mu_nu|)."""
    g = metric_components(params, rho)
    diff = np.abs(metric_from_tetrad(tetrad_components(params, rho)) - g)
    return float(np.max(diff / np.maximum(1.0, np.abs(g))))


def pullback_residual(params: PhysicalParams, rho) -> float:
    """Same relative measure between metric_components and pullback_metric."""
    g = metric_components(params, rho)
    diff = np.abs(pullback_metric(params, rho) - g)
    return float(np.max(diff / np.maximum(1.0, np.abs(g))))


def determinant_residual(params: PhysicalParams, rho) -> float:
    """|det g + rho^2| in units of max(1, max |g_mu_nu|)^4.

    det g is a sum of four-entry products of O(1) entries that cancel down to
    -rho^2, so its rounding error scales with the entries, not with rho^2.
    """
    g = metric_components(params, rho)
    scale = max(1.0, float(np.max(np.abs(g)))) ** 4
    return abs(float(np.linalg.det(g)) + rho * rho) / scale


def frame_field(params: PhysicalParams, rho, t: float = 0.0, phi: float = 0.0, z: float = 0.0) -> FrameField:
    return FrameField(
        point=(t, rho, phi, z),
        g=metric_components(params, rho),
        tetrad=tetrad_components(params, rho),
        connection=connection_components(params),
        defect_on_axis=True,
        torsion_coefficient=2 * math.pi * params.zeta,
        inside_region=rho < singular_radius(params),
    )


def log_radius_grid(params: PhysicalParams, count: int = 10) -> np.ndarray:
    """Log-spaced radii between the near-axis and near-wall sampling limits."""
    rho0 = singular_radius(params)
    return np.geomspace(config.LOG_GRID_LOW * rho0, config.LOG_GRID_HIGH * rho0, count)
