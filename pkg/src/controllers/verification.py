"""
Invariant suites behind `dspec verify`.

Each check measures one quantity and compares it with its tolerance; a check
that raises is recorded as failed with the error text. Reference values of
Bessel zeros that feed the oracle comparisons come from services.specfun and
are handed to the oracle's caller here, never to the oracle itself.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, List, Optional

import numpy as np

import config
from errors import ResolutionError
from services import geometry, oracle, specfun, spectrum
from services.geometry import PhysicalParams
from services.spectrum import QuantumNumbers

logger = logging.getLogger(__name__)

DEPTHS = ("quick", "full")

# closed-form references
J0_FIRST_ZERO = 2.404825557695773
J15_FIRST_ZERO = 4.493409457909064
REFERENCE_ENERGY = -0.021084070185266076

GEOMETRY_CASES = (
    PhysicalParams(mass=1.0, omega=0.1),
    PhysicalParams(mass=1.0, omega=0.5, zeta=1.2, k=0.7),
    PhysicalParams(mass=2.0, omega=2.0, zeta=0.3, k=-1.0),
)
ORACLE_ORDERS = (0.0, 0.5, 1.0, 1.5, 2.7)
ORACLE_RADII = (1.0, 10.0)
ORACLE_INDICES = 5


@dataclass
class CheckResult:
    suite: str
    name: str
    measured: Optional[float]
    tolerance: Optional[float]
    passed: bool
    detail: str = ""

    def to_json(self) -> str:
        data = asdict(self)
        for key in ("measured", "tolerance"):
            value = data[key]
            if isinstance(value, float) and not math.isfinite(value):
                data[key] = None
        return json.dumps(data, sort_keys=True)


class VerificationSuite:
    """Runs the geometry, specfun, spectrum and oracle invariant suites.

    ``quick`` caps oracle resolutions at ORACLE_POINTS_QUICK and shortens the
    asymptotic-decay sweep; ``connection_term`` is forwarded to
    hamiltonian_residual so a broken radial operator can be injected.
    """

    def __init__(self, depth: str = "quick", connection_term: float = 1.0, seed: int = 20240601):
        if depth not in DEPTHS:
            raise ValueError(f"depth must be one of {DEPTHS}, got {depth!r}")
        self.depth = depth
        self.connection_term = connection_term
        self.seed = seed
        self.results: List[CheckResult] = []

    @property
    def oracle_points(self) -> int:
        return config.ORACLE_POINTS_QUICK if self.depth == "quick" else config.ORACLE_POINTS

    @property
    def decay_n_max(self) -> int:
        return 20 if self.depth == "quick" else 50

    # ------------------------------------------------------------------ plumbing

    def _record(self, suite: str, name: str, measured, tolerance, passed: bool, detail: str = "") -> None:
        result = CheckResult(
            suite=suite,
            name=name,
            measured=None if measured is None else float(measured),
            tolerance=None if tolerance is None else float(tolerance),
            passed=bool(passed),
            detail=detail,
        )
        self.results.append(result)
        log = logger.debug if result.passed else logger.warning
        log("%s/%s: measured=%s tolerance=%s %s", suite, name, result.measured, result.tolerance,
            "ok" if result.passed else "FAILED")

    def _at_most(self, suite: str, name: str, measured: float, tolerance: float, detail: str = "") -> None:
        self._record(suite, name, measured, tolerance, measured <= tolerance, detail)

    def _guarded(self, suite: str, name: str, body: Callable[[], None]) -> None:
        try:
            body()
        except Exception as e:
            self._record(suite, name, None, None, False, f"{type(e).__name__}: {e}")

    def run(self, suites: Optional[Iterable[str]] = None) -> List[CheckResult]:
        selected = list(suites or ("geometry", "specfun", "spectrum", "oracle"))
        self.results = []
        for suite in selected:
            logger.info("Running %s checks (%s)", suite, self.depth)
            getattr(self, f"_{suite}_checks")()
        failed = sum(not r.passed for r in self.results)
        logger.info("%d checks, %d failed", len(self.results), failed)
        return self.results

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    def report_lines(self) -> List[str]:
        return [r.to_json() for r in self.results]

    # ------------------------------------------------------------------ geometry

    def _geometry_checks(self) -> None:
        suite = "geometry"
        for i, params in enumerate(GEOMETRY_CASES):
            tag = f"case{i}"
            radii = geometry.log_radius_grid(params, 10)

            self._guarded(suite, f"tetrad_compatibility[{tag}]", lambda: self._at_most(
                suite, f"tetrad_compatibility[{tag}]",
                max(geometry.tetrad_residual(params, r) for r in radii), config.TETRAD_TOLERANCE,
            ))
            self._guarded(suite, f"structure_analytic[{tag}]", lambda: self._at_most(
                suite, f"structure_analytic[{tag}]",
                max(geometry.structure_equation_residual(params, r) for r in radii), config.STRUCTURE_TOLERANCE,
            ))
            self._guarded(suite, f"structure_finite_difference[{tag}]", lambda: self._at_most(
                suite, f"structure_finite_difference[{tag}]",
                max(geometry.structure_equation_residual(params, r, "finite_difference", 0.5 * radii[0])
                    for r in radii),
                1e-10,
            ))
            self._guarded(suite, f"gtt_at_wall[{tag}]", lambda: self._at_most(
                suite, f"gtt_at_wall[{tag}]",
                abs(geometry.metric_components(params, geometry.singular_radius(params))[geometry.T, geometry.T]),
                config.GTT_WALL_TOLERANCE,
            ))
            self._guarded(suite, f"pullback_float[{tag}]", lambda: self._at_most(
                suite, f"pullback_float[{tag}]",
                max(geometry.pullback_residual(params, r) for r in radii), config.METRIC_PULLBACK_TOLERANCE,
            ))
            self._guarded(suite, f"determinant[{tag}]", lambda: self._at_most(
                suite, f"determinant[{tag}]",
                max(geometry.determinant_residual(params, r) for r in radii), config.DETERMINANT_TOLERANCE,
            ))

        def exact_pullback():
            params = PhysicalParams(mass=Fraction(1), omega=Fraction(1, 3), zeta=Fraction(2, 5), k=Fraction(1, 7))
            mismatches = 0
            for rho in (Fraction(1, 10), Fraction(1), Fraction(27, 10)):
                g = geometry.metric_components(params, rho, exact=True)
                pulled = geometry.pullback_metric(params, rho, exact=True)
                mismatches += int(np.count_nonzero(g != pulled))
            self._record(suite, "pullback_exact", mismatches, 0, mismatches == 0, "rational arithmetic")

        self._guarded(suite, "pullback_exact", exact_pullback)

        def observer_region():
            params = GEOMETRY_CASES[1]
            rho0 = geometry.singular_radius(params)
            ok = geometry.timelike_observer(params, 0.5 * rho0) and not geometry.timelike_observer(params, 1.5 * rho0)
            self._record(suite, "timelike_inside_only", None, None, ok)

        self._guarded(suite, "timelike_inside_only", observer_region)

    # ------------------------------------------------------------------ specfun

    def _specfun_checks(self) -> None:
        suite = "specfun"
        rng = np.random.default_rng(self.seed)

        def recurrence():
            worst = 0.0
            for nu, x in zip(rng.uniform(1.0, 10.0, 200), rng.uniform(0.1, 50.0, 200)):
                lhs = specfun.bessel_j(nu - 1, x) + specfun.bessel_j(nu + 1, x)
                worst = max(worst, abs(lhs - 2.0 * nu / x * specfun.bessel_j(nu, x)))
            self._at_most(suite, "recurrence_identity", worst, config.RECURRENCE_TOLERANCE)

        def overlaps():
            worst_low = worst_high = 0.0
            for nu in (0.0, 0.5, 1.0, 2.7, 5.0):
                for x in np.linspace(3.0, 7.0, 9):
                    worst_low = max(worst_low, abs(
                        specfun.bessel_j_regime(nu, x, "series") - specfun.bessel_j_regime(nu, x, "miller")))
                for x in np.linspace(25.0, 40.0, 16):
                    worst_high = max(worst_high, abs(
                        specfun.bessel_j_regime(nu, x, "miller") - specfun.bessel_j_regime(nu, x, "hankel")))
            self._at_most(suite, "overlap_series_miller", worst_low, config.OVERLAP_TOLERANCE)
            self._at_most(suite, "overlap_miller_hankel", worst_high, config.OVERLAP_TOLERANCE)

        def known_zeros():
            self._at_most(suite, "zero_j0_1", abs(specfun.bessel_zero(0.0, 1) - J0_FIRST_ZERO), 1e-12)
            self._at_most(suite, "zero_j1.5_1", abs(specfun.bessel_zero(1.5, 1) - J15_FIRST_ZERO), 1e-12)
            self._at_most(suite, "zero_j0.5_3", abs(specfun.bessel_zero(0.5, 3) - 3.0 * math.pi), 1e-12)

        def bracketing():
            flips = 0
            total = 0
            for nu in (0.0, 0.5, 1.0, 1.5, 2.7, 5.0):
                for j in specfun.bessel_zeros(nu, 10):
                    total += 1
                    if specfun.bessel_j(nu, j - 1e-9) * specfun.bessel_j(nu, j + 1e-9) < 0:
                        flips += 1
            self._record(suite, "zero_bracketing", total - flips, 0, flips == total, f"{flips}/{total} sign changes")

        def interlacing():
            violations = 0
            for nu in (0.0, 0.5, 1.0, 2.7):
                lower = specfun.bessel_zeros(nu, 11)
                upper = specfun.bessel_zeros(nu + 1.0, 10)
                violations += sum(not (lower[n] < upper[n] < lower[n + 1]) for n in range(10))
            self._record(suite, "interlacing", violations, 0, violations == 0)

        def mcmahon():
            worst = 0.0
            n = 50
            for nu in (0.0, 1.0, 2.5):
                beta = (n + 0.5 * nu - 0.25) * math.pi
                expected = -(4.0 * nu * nu - 1.0) / (8.0 * beta)
                measured = specfun.bessel_zero(nu, n) - beta
                worst = max(worst, abs(measured - expected) / abs(expected))
            self._at_most(suite, "mcmahon_first_correction", worst, 0.05, "relative to the 1/beta term, n=50")

        for name, body in (
            ("recurrence_identity", recurrence),
            ("overlap", overlaps),
            ("known_zeros", known_zeros),
            ("zero_bracketing", bracketing),
            ("interlacing", interlacing),
            ("mcmahon_first_correction", mcmahon),
        ):
            self._guarded(suite, name, body)

    # ------------------------------------------------------------------ spectrum

    def _spectrum_checks(self) -> None:
        suite = "spectrum"
        base = PhysicalParams(mass=1.0, omega=0.1)

        def reference_energy():
            level = spectrum.energy_exact(QuantumNumbers(0, 0, 1), base)
            self._at_most(suite, "reference_energy", abs(level.energy_exact - REFERENCE_ENERGY), 1e-12)

        def asymptotic_fidelity():
            n_max = self.decay_n_max
            for nu in (0.0, 1.5, 2.5):
                zeros = specfun.bessel_zeros(nu, n_max + 1)
                errors = [abs(spectrum.asymptotic_eta_rho0(nu, n) / zeros[n] - 1.0) for n in range(n_max + 1)]
                gaps = [abs(spectrum.asymptotic_eta_rho0(nu, n) - zeros[n]) for n in range(n_max + 1)]
                increases = sum(b >= a for a, b in zip(gaps, gaps[1:]))
                self._record(suite, f"asymptotic_monotone[nu={nu}]", increases, 0, increases == 0,
                             f"n=0..{n_max}")
                bound_ratio = max(
                    gaps[n] / (1.5 * abs(4.0 * nu * nu - 1.0) / (8.0 * zeros[n])) for n in range(5, n_max + 1)
                )
                self._at_most(suite, f"asymptotic_bound[nu={nu}]", bound_ratio, 1.0)
                if nu == 0.0:
                    self._at_most(suite, "asymptotic_error_n0", errors[0], 0.021)
                    self._at_most(suite, "asymptotic_error_n20", errors[20], 1e-4)

        def modes():
            residuals = {}
            for n in range(6):
                qn = QuantumNumbers(n, 0, 1)
                level = spectrum.energy_exact(qn, base)
                mode = spectrum.radial_mode(qn, base, config.RADIAL_GRID_SIZE)
                self._at_most(suite, f"hard_wall[n={n}]", abs(mode.values[-1]), config.WALL_TOLERANCE)
                nodes = spectrum.node_count(mode)
                self._record(suite, f"node_count[n={n}]", nodes, n, nodes == n)
                norm = float(np.sum(mode.norm_weight * mode.values ** 2))
                self._at_most(suite, f"normalisation[n={n}]", abs(norm - 1.0), config.NORM_TOLERANCE)
                try:
                    residual = spectrum.hamiltonian_residual(mode, level, base, self.connection_term)
                except ResolutionError as e:
                    self._record(suite, f"hamiltonian_residual[n={n}]", None, config.HAMILTONIAN_TOLERANCE,
                                 False, str(e))
                    continue
                residuals[n] = residual
                self._at_most(suite, f"hamiltonian_residual[n={n}]", residual, config.HAMILTONIAN_TOLERANCE)
            if 0 in residuals:
                qn = QuantumNumbers(0, 0, 1)
                coarse = spectrum.hamiltonian_residual(
                    spectrum.radial_mode(qn, base, config.RADIAL_GRID_SIZE // 2),
                    spectrum.energy_exact(qn, base), base, self.connection_term,
                )
                ratio = coarse / residuals[0]
                self._record(suite, "hamiltonian_order", ratio, 4.0, 3.5 <= ratio <= 4.5,
                             "residual ratio under grid halving")

        def scale_invariance():
            # equal rho0 = 10 reached through different (omega, zeta, m)
            other = PhysicalParams(mass=2.5, omega=0.08, zeta=7.5)
            worst = 0.0
            for n in range(4):
                for l in range(3):
                    qn = QuantumNumbers(n, l, 1)
                    a = spectrum.energy_exact(qn, base)
                    b = spectrum.energy_exact(qn, other)
                    worst = max(worst, abs(a.eta_rho0 - b.eta_rho0))
            self._at_most(suite, "eta_rho0_depends_on_rho0_only", worst, config.INVARIANCE_TOLERANCE)

        def torsion_invariance():
            first = PhysicalParams(mass=1.0, omega=0.1, zeta=0.5, k=2.0)
            rho0 = geometry.singular_radius(first)
            second = PhysicalParams(mass=1.0, omega=1.0 / math.sqrt(rho0 ** 2 + 0.25 ** 2), zeta=0.25, k=4.0)
            worst = 0.0
            for l in (-2, 0, 3):
                for s in (1, -1):
                    qn = QuantumNumbers(1, l, s)
                    a = spectrum.energy_exact(qn, first)
                    b = spectrum.energy_exact(qn, second)
                    reduced = [
                        lvl.energy_exact + p.omega * (l + 0.5) - p.k ** 2 / (2.0 * p.mass)
                        for lvl, p in ((a, first), (b, second))
                    ]
                    worst = max(worst, abs(a.eta_rho0 - b.eta_rho0), abs(a.nu - b.nu),
                                abs(reduced[0] - reduced[1]) / abs(reduced[0]))
            self._at_most(suite, "page_werner_torsion_invariance", worst, config.INVARIANCE_TOLERANCE,
                          "zeta*k and rho0 held fixed")

            shifted = replace(first, k=first.k + 1e-3 / first.zeta)
            qn = QuantumNumbers(1, 0, 1)
            change = abs(spectrum.energy_exact(qn, shifted).eta_exact - spectrum.energy_exact(qn, first).eta_exact)
            self._record(suite, "torsion_sensitivity", change, config.INVARIANCE_TOLERANCE,
                         change > config.INVARIANCE_TOLERANCE, "zeta*k shifted by 1e-3")

        def spin_pairs():
            worst_eta = worst_shift = 0.0
            for l in range(0, 4):
                down = spectrum.energy_exact(QuantumNumbers(2, l, -1), base)
                up = spectrum.energy_exact(QuantumNumbers(2, l + 1, 1), base)
                worst_eta = max(worst_eta, abs(down.eta_exact - up.eta_exact))
                worst_shift = max(worst_shift, abs((down.energy_exact - up.energy_exact) - base.omega))
            self._at_most(suite, "spin_pair_eta", worst_eta, 0.0)
            self._at_most(suite, "spin_pair_shift", worst_shift, config.INVARIANCE_TOLERANCE)

        def parabolic_growth():
            n = 200
            expected = math.pi ** 2 / (2.0 * base.mass * geometry.singular_radius(base) ** 2)
            ratio = spectrum.energy_asymptotic(QuantumNumbers(n, 0, 1), base) / (n * n)
            self._at_most(suite, "parabolic_growth", abs(ratio / expected - 1.0), 0.01, f"n={n}")

        for name, body in (
            ("reference_energy", reference_energy),
            ("asymptotic", asymptotic_fidelity),
            ("modes", modes),
            ("eta_rho0_depends_on_rho0_only", scale_invariance),
            ("page_werner_torsion_invariance", torsion_invariance),
            ("spin_pairs", spin_pairs),
            ("parabolic_growth", parabolic_growth),
        ):
            self._guarded(suite, name, body)

    # ------------------------------------------------------------------ oracle

    def _oracle_checks(self) -> None:
        suite = "oracle"
        points = self.oracle_points
        low, high = config.ORDER_BAND

        def equivalence():
            worst_error = 0.0
            orders = []
            for nu in ORACLE_ORDERS:
                zeros = specfun.bessel_zeros(nu, ORACLE_INDICES)
                for rho0 in ORACLE_RADII:
                    for index in range(1, ORACLE_INDICES + 1):
                        estimate = oracle.richardson(nu, rho0, index, points)
                        reference = (zeros[index - 1] / rho0) ** 2
                        worst_error = max(worst_error, abs(estimate.value / reference - 1.0))
                        orders.append(estimate.order)
            self._at_most(suite, "closed_form_agreement", worst_error, config.ORACLE_RELATIVE_TOLERANCE,
                          f"{points} points")
            spread = max(abs(o - 2.0) for o in orders)
            self._record(suite, "convergence_order", spread, high - 2.0,
                         all(low <= o <= high for o in orders), "max |order - 2|")

        def nodes():
            mismatches = 0
            for nu in ORACLE_ORDERS:
                op = oracle.discretize(nu, 1.0, points)
                mismatches += sum(oracle.mode_node_count(op, i) != i - 1 for i in range(1, ORACLE_INDICES + 1))
            self._record(suite, "eigenvector_nodes", mismatches, 0, mismatches == 0)

        def scaling():
            worst = 0.0
            for nu in (0.0, 2.7):
                base = oracle.lowest_eigenvalues(oracle.discretize(nu, 1.0, points), 3)
                scaled = oracle.lowest_eigenvalues(oracle.discretize(nu, 10.0, points), 3)
                worst = max(worst, float(np.max(np.abs(scaled * 100.0 / base - 1.0))))
            self._at_most(suite, "inverse_square_scaling", worst, 1e-10)

        def free_string():
            value = oracle.eigenvalue_extrapolated(0.5, math.pi, 2, points)
            self._at_most(suite, "free_string", abs(value - 4.0), 1e-6)

        def cross_pipeline():
            value = oracle.eigenvalue_extrapolated(0.0, 10.0, 1, points)
            eta = spectrum.energy_exact(QuantumNumbers(0, 0, 1), PhysicalParams(mass=1.0, omega=0.1)).eta_exact
            self._at_most(suite, "reference_level_cross_check", abs(value / eta ** 2 - 1.0), 1e-7)

        for name, body in (
            ("closed_form_agreement", equivalence),
            ("eigenvector_nodes", nodes),
            ("inverse_square_scaling", scaling),
            ("free_string", free_string),
            ("reference_level_cross_check", cross_pipeline),
        ):
            self._guarded(suite, name, body)
