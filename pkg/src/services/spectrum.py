"""
Bound-state spectrum of the spin-1/2 particle inside the rotating-frame wall.

After separation psi = exp(i(l + 1/2)phi + ikz) R(rho) chi_s the radial
equation is Bessel's equation of order nu_s = l + (1 - s)/2 - zeta k, and the
hard wall R(rho0) = 0 quantizes eta rho0 to a zero of J_|nu_s|. Radial index n
maps to the (n+1)-th zero, which puts the large-argument spectrum
eta rho0 ~ n pi + |nu| pi/2 + 3 pi/4 on the same labels.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

import config
from errors import DomainError, EvaluationError, ResolutionError
from services.geometry import PhysicalParams, singular_radius
from services.solver_service import BesselZeroSolver, EigenvalueSolver
from services.specfun import bessel_j_array

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuantumNumbers:
    n: int
    l: int
    s: int

    def __post_init__(self):
        if self.s not in (1, -1):
            raise DomainError(f"spin eigenvalue must be +1 or -1, got {self.s!r}")
        if self.n < 0:
            raise DomainError(f"radial index must be >= 0, got {self.n!r}")

    def sort_key(self) -> Tuple[int, int, int]:
        return (self.n, self.l, self.s)


@dataclass(frozen=True)
class EnergyLevel:
    qn: QuantumNumbers
    nu: float
    eta_exact: float
    eta_asym: float
    energy_exact: float
    energy_asym: float
    rel_err_eta: float
    rho0: float
    asymptotic_unreliable: bool

    @property
    def eta_rho0(self) -> float:
        return self.eta_exact * self.rho0


@dataclass
class RadialMode:
    qn: QuantumNumbers
    grid: np.ndarray
    values: np.ndarray
    # sum(norm_weight * values**2) approximates the integral of R^2 rho drho
    norm_weight: np.ndarray


@dataclass(frozen=True)
class SeparatedTerms:
    """Pieces of the Schrodinger-Pauli operator left after separating phi, z and spin."""
    angular: float        # gamma = l + 1/2 - zeta k, eigenvalue of (d_phi - zeta d_z)/i
    spin_cross: float     # -s gamma
    axis_term: float      # 1/4, from the 1/(8 m rho^2) piece
    centrifugal: float    # gamma^2 - s gamma + 1/4, equals nu_s^2
    axial_kinetic: float  # k^2 / 2m
    page_werner: float    # -omega (l + 1/2)


def effective_order(qn: QuantumNumbers, params: PhysicalParams) -> float:
    """nu_s = l + (1 - s)/2 - zeta k (signed; the radial solution uses |nu_s|)."""
    return qn.l + 0.5 * (1 - qn.s) - params.zeta * params.k


def asymptotic_eta_rho0(nu: float, n: int) -> float:
    return n * math.pi + 0.5 * abs(nu) * math.pi + 0.75 * math.pi


def _energy(eta: float, qn: QuantumNumbers, params: PhysicalParams) -> float:
    m = params.mass
    return eta * eta / (2.0 * m) + params.k * params.k / (2.0 * m) - params.omega * (qn.l + 0.5)


def _level(qn: QuantumNumbers, params: PhysicalParams, rho0: float, eta_rho0: float) -> EnergyLevel:
    nu = effective_order(qn, params)
    asym = asymptotic_eta_rho0(nu, qn.n)
    eta_exact = eta_rho0 / rho0
    eta_asym = asym / rho0
    return EnergyLevel(
        qn=qn,
        nu=nu,
        eta_exact=eta_exact,
        eta_asym=eta_asym,
        energy_exact=_energy(eta_exact, qn, params),
        energy_asym=_energy(eta_asym, qn, params),
        rel_err_eta=abs(asym / eta_rho0 - 1.0),
        rho0=rho0,
        asymptotic_unreliable=eta_rho0 < config.ASYMPTOTIC_RELIABLE_ETA_RHO0,
    )


def energy_exact(
    qn: QuantumNumbers,
    params: PhysicalParams,
    solver: Optional[EigenvalueSolver] = None,
) -> EnergyLevel:
    """Level from the exact hard-wall condition J_|nu|(eta rho0) = 0."""
    rho0 = singular_radius(params)
    solver = solver or BesselZeroSolver()
    eta_rho0 = solver.eta_rho0_values(abs(effective_order(qn, params)), qn.n + 1)[-1]
    return _level(qn, params, rho0, eta_rho0)


def energy_asymptotic(qn: QuantumNumbers, params: PhysicalParams) -> float:
    """Closed-form large-argument energy; omega^2 / (1 - omega^2 zeta^2) is 1/rho0^2."""
    rho0 = singular_radius(params)
    eta = asymptotic_eta_rho0(effective_order(qn, params), qn.n) / rho0
    return _energy(eta, qn, params)


def level_table(
    params: PhysicalParams,
    l_range: Tuple[int, int],
    n_max: int,
    spins: Iterable[int] = config.DEFAULT_SPINS,
    solver: Optional[EigenvalueSolver] = None,
) -> List[EnergyLevel]:
    """All levels with l_min <= l <= l_max, 0 <= n <= n_max, sorted by (n, l, s).

    Zeros are computed once per distinct |nu|.
    """
    l_min, l_max = l_range
    if l_min > l_max:
        raise DomainError(f"empty l range [{l_min}, {l_max}]")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max!r}")
    rho0 = singular_radius(params)
    solver = solver or BesselZeroSolver()

    numbers = [QuantumNumbers(n, l, s) for l in range(l_min, l_max + 1) for s in spins for n in range(n_max + 1)]
    zeros: Dict[float, List[float]] = {}
    levels = []
    for qn in numbers:
        order = abs(effective_order(qn, params))
        if order not in zeros:
            zeros[order] = solver.eta_rho0_values(order, n_max + 1)
        levels.append(_level(qn, params, rho0, zeros[order][qn.n]))
    levels.sort(key=lambda level: level.qn.sort_key())
    logger.debug("level table: %d levels, %d distinct orders", len(levels), len(zeros))
    return levels


def _simpson_weights(count: int, h: float) -> np.ndarray:
    """Composite Simpson weights on nodes 0..count; an odd last interval gets the trapezoid rule."""
    even = count - count % 2
    w = np.zeros(count + 1)
    w[0:even + 1:2] = 2.0
    w[1:even:2] = 4.0
    w[0] = w[even] = 1.0
    w *= h / 3.0
    if count % 2:
        w[-2] += 0.5 * h
        w[-1] += 0.5 * h
    return w


def radial_mode(
    qn: QuantumNumbers,
    params: PhysicalParams,
    grid_size: int = config.RADIAL_GRID_SIZE,
) -> RadialMode:
    """A J_|nu|(eta rho) sampled on rho_i = i rho0 / N, i = 1..N, normalised under rho drho."""
    if grid_size < config.MIN_RADIAL_GRID_SIZE:
        raise ResolutionError(f"radial grid needs at least {config.MIN_RADIAL_GRID_SIZE} points, got {grid_size}")
    level = energy_exact(qn, params)
    fractions = np.arange(1, grid_size + 1) / grid_size
    grid = level.rho0 * fractions
    # eta rho_i built from the zero itself so the last sample sits exactly on it
    values = bessel_j_array(abs(level.nu), level.eta_rho0 * fractions)

    # rho R^2 vanishes on the axis, so the origin node carries no weight
    weights = _simpson_weights(grid_size, level.rho0 / grid_size)[1:] * grid
    values = values / math.sqrt(float(np.dot(weights, values * values)))
    return RadialMode(qn=qn, grid=grid, values=values, norm_weight=weights)


def node_count(mode: RadialMode) -> int:
    """Interior sign changes of R (the wall sample is excluded)."""
    interior = mode.values[:-1]
    interior = interior[np.abs(interior) > 1e-12 * np.max(np.abs(interior))]
    return int(np.count_nonzero(np.diff(np.sign(interior))))


def schrodinger_pauli_terms(qn: QuantumNumbers, params: PhysicalParams) -> SeparatedTerms:
    gamma = qn.l + 0.5 - params.zeta * params.k
    cross = -qn.s * gamma
    return SeparatedTerms(
        angular=gamma,
        spin_cross=cross,
        axis_term=0.25,
        centrifugal=gamma * gamma + cross + 0.25,
        axial_kinetic=params.k * params.k / (2.0 * params.mass),
        page_werner=-params.omega * (qn.l + 0.5),
    )


def reassemble_energy(terms: SeparatedTerms, eta: float, mass: float) -> float:
    """E = eta^2 / 2m + k^2 / 2m - omega (l + 1/2) from the separated pieces."""
    return eta * eta / (2.0 * mass) + terms.axial_kinetic + terms.page_werner


def hamiltonian_residual(
    mode: RadialMode,
    level: EnergyLevel,
    params: PhysicalParams,
    connection_term: float = 1.0,
) -> float:
    """Relative rho-weighted L2 residual of R'' + R'/rho - nu^2 R/rho^2 + eta^2 R on interior nodes.

    ``connection_term`` scales the first-derivative term; anything but 1 is a broken operator.
    Also checks that the separated Schrodinger-Pauli pieces reassemble nu^2 and the level energy.
    """
    if mode.qn != level.qn:
        raise DomainError(f"mode {mode.qn} and level {level.qn} have different quantum numbers")

    terms = schrodinger_pauli_terms(level.qn, params)
    nu2 = level.nu * level.nu
    if abs(terms.centrifugal - nu2) > config.ENERGY_REASSEMBLY_TOLERANCE * max(1.0, nu2):
        raise EvaluationError(f"centrifugal coefficient {terms.centrifugal!r} != nu^2 = {nu2!r}")
    energy = reassemble_energy(terms, level.eta_exact, params.mass)
    if abs(energy - level.energy_exact) > config.ENERGY_REASSEMBLY_TOLERANCE * max(1.0, abs(energy)):
        raise EvaluationError(f"reassembled energy {energy!r} != level energy {level.energy_exact!r}")

    R, rho = mode.values, mode.grid
    h = rho[1] - rho[0]
    r = rho[1:-1]
    centre = R[1:-1]
    second = (R[2:] - 2.0 * centre + R[:-2]) / (h * h)
    first = (R[2:] - R[:-2]) / (2.0 * h)
    eta2 = level.eta_exact ** 2
    applied = second + connection_term * first / r - nu2 * centre / (r * r) + eta2 * centre

    # discrete L2 under rho drho, the measure R is normalised in
    weight = np.sqrt(r)
    residual = float(np.linalg.norm(weight * applied) / np.linalg.norm(weight * eta2 * centre))
    logger.debug("hamiltonian residual %s on %d nodes: %.3e", level.qn, rho.size, residual)
    if residual > config.HAMILTONIAN_MAX_RESIDUAL:
        raise ResolutionError(f"radial residual {residual:.3e} exceeds {config.HAMILTONIAN_MAX_RESIDUAL}")
    return residual
