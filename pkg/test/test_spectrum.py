import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import special

from errors import DomainError, EvaluationError, NoAdmissibleRegion, ResolutionError
from services import spectrum
from services.geometry import PhysicalParams, singular_radius
from services.specfun import bessel_zeros
from services.spectrum import QuantumNumbers, RadialMode


class TestQuantumNumbers:
    def test_spin_must_be_unit(self):
        with pytest.raises(DomainError):
            QuantumNumbers(0, 0, 0)

    def test_radial_index_non_negative(self):
        with pytest.raises(DomainError):
            QuantumNumbers(-1, 0, 1)


class TestEffectiveOrder:
    def test_vanishes(self):
        params = PhysicalParams(mass=1.0, omega=0.1, zeta=0.0, k=3.0)
        assert spectrum.effective_order(QuantumNumbers(0, 0, 1), params) == 0.0

    def test_spin_down_with_torsion(self):
        params = PhysicalParams(mass=1.0, omega=0.1, zeta=0.25, k=2.0)
        assert spectrum.effective_order(QuantumNumbers(0, 1, -1), params) == pytest.approx(1.5)

    def test_negative_order(self):
        params = PhysicalParams(mass=1.0, omega=0.1, zeta=0.5, k=1.0)
        nu = spectrum.effective_order(QuantumNumbers(0, -2, 1), params)
        assert nu == pytest.approx(-2.5)
        # order 5/2 zeros solve tan x = 3x / (3 - x^2)
        level = spectrum.energy_exact(QuantumNumbers(0, -2, 1), params)
        assert level.eta_rho0 == pytest.approx(5.763459196894550, abs=1e-9)


class TestEnergyExact:
    def test_reference_level(self, base_params):
        level = spectrum.energy_exact(QuantumNumbers(0, 0, 1), base_params)
        assert level.eta_exact == pytest.approx(0.2404825557695773, abs=1e-14)
        assert level.energy_exact == pytest.approx(-0.021084070185266076, abs=1e-12)
        assert level.rho0 == pytest.approx(10.0)

    def test_spin_down_ground_level(self, base_params):
        level = spectrum.energy_exact(QuantumNumbers(0, 0, -1), base_params)
        assert abs(level.nu) == 1.0
        assert level.eta_exact == pytest.approx(0.3831705970, abs=1e-10)

    def test_spin_splitting(self, base_params):
        up = spectrum.energy_exact(QuantumNumbers(0, 1, 1), base_params)
        down = spectrum.energy_exact(QuantumNumbers(0, 1, -1), base_params)
        assert (abs(up.nu), abs(down.nu)) == (1.0, 2.0)
        assert up.eta_exact != down.eta_exact
        shift = lambda lvl: lvl.energy_exact - lvl.eta_exact ** 2 / 2.0
        assert shift(up) == pytest.approx(shift(down), abs=1e-15)

    def test_wall_is_a_zero(self, torsion_params):
        for n in range(4):
            level = spectrum.energy_exact(QuantumNumbers(n, 1, -1), torsion_params)
            assert abs(special.jv(abs(level.nu), level.eta_exact * level.rho0)) < 1e-10

    def test_energy_inversion(self, torsion_params):
        level = spectrum.energy_exact(QuantumNumbers(2, -1, 1), torsion_params)
        m, k, w = torsion_params.mass, torsion_params.k, torsion_params.omega
        for eta, energy in ((level.eta_exact, level.energy_exact), (level.eta_asym, level.energy_asym)):
            assert energy == pytest.approx(eta ** 2 / (2 * m) + k ** 2 / (2 * m) - w * (-1 + 0.5), abs=1e-14)

    def test_unreliable_flag(self, base_params):
        assert spectrum.energy_exact(QuantumNumbers(0, 0, 1), base_params).asymptotic_unreliable
        assert not spectrum.energy_exact(QuantumNumbers(2, 0, 1), base_params).asymptotic_unreliable

    def test_no_admissible_region(self):
        with pytest.raises(NoAdmissibleRegion):
            spectrum.energy_exact(QuantumNumbers(0, 0, 1), PhysicalParams(mass=1.0, omega=0.5, zeta=2.4))


class TestAsymptotic:
    def test_ground_level_formula(self, base_params):
        expected = (0.75 * math.pi) ** 2 / 200.0 - 0.05
        assert spectrum.energy_asymptotic(QuantumNumbers(0, 0, 1), base_params) == pytest.approx(expected, rel=1e-14)

    def test_ground_level_error(self, base_params):
        level = spectrum.energy_exact(QuantumNumbers(0, 0, 1), base_params)
        assert level.eta_asym * level.rho0 == pytest.approx(2.35619449, abs=1e-8)
        assert level.rel_err_eta == pytest.approx(0.0202, abs=1e-4)
        assert level.rel_err_eta < 0.021

    def test_high_level_error(self, base_params):
        assert spectrum.energy_exact(QuantumNumbers(20, 0, 1), base_params).rel_err_eta < 1e-4

    @pytest.mark.parametrize("nu", [0.0, 1.5, 2.5])
    def test_gap_decreases(self, nu):
        zeros = bessel_zeros(nu, 51)
        gaps = [abs(spectrum.asymptotic_eta_rho0(nu, n) - zeros[n]) for n in range(51)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        for n in range(5, 51):
            assert gaps[n] <= 1.5 * abs(4 * nu * nu - 1) / (8 * zeros[n])

    def test_parabolic_growth(self, base_params):
        n = 200
        ratio = spectrum.energy_asymptotic(QuantumNumbers(n, 0, 1), base_params) / n ** 2
        assert ratio == pytest.approx(math.pi ** 2 / (2 * 100.0), rel=0.01)


class TestInvariance:
    def test_eta_rho0_depends_on_rho0_only(self, base_params):
        other = PhysicalParams(mass=2.5, omega=0.08, zeta=7.5)
        assert singular_radius(other) == pytest.approx(10.0, rel=1e-14)
        for n in range(3):
            for l in range(3):
                qn = QuantumNumbers(n, l, 1)
                a = spectrum.energy_exact(qn, base_params)
                b = spectrum.energy_exact(qn, other)
                assert abs(a.eta_rho0 - b.eta_rho0) < 1e-12

    def test_torsion_enters_through_product_only(self):
        first = PhysicalParams(mass=1.0, omega=0.1, zeta=0.5, k=2.0)
        rho0 = singular_radius(first)
        second = PhysicalParams(mass=1.0, omega=1.0 / math.sqrt(rho0 ** 2 + 0.0625), zeta=0.25, k=4.0)
        for l in (-2, 0, 3):
            for s in (1, -1):
                qn = QuantumNumbers(1, l, s)
                a = spectrum.energy_exact(qn, first)
                b = spectrum.energy_exact(qn, second)
                assert a.nu == b.nu
                assert a.eta_rho0 == pytest.approx(b.eta_rho0, abs=1e-12)
                reduced = [
                    lvl.energy_exact + p.omega * (l + 0.5) - p.k ** 2 / (2 * p.mass)
                    for lvl, p in ((a, first), (b, second))
                ]
                assert reduced[0] == pytest.approx(reduced[1], rel=1e-12)

    def test_torsion_sensitivity(self):
        params = PhysicalParams(mass=1.0, omega=0.1, zeta=0.5, k=2.0)
        shifted = replace(params, k=params.k + 2e-3)
        qn = QuantumNumbers(1, 0, 1)
        assert spectrum.energy_exact(qn, shifted).eta_exact != pytest.approx(
            spectrum.energy_exact(qn, params).eta_exact, abs=1e-9)

    def test_spin_pair_degeneracy(self, base_params):
        for l in range(4):
            down = spectrum.energy_exact(QuantumNumbers(1, l, -1), base_params)
            up = spectrum.energy_exact(QuantumNumbers(1, l + 1, 1), base_params)
            assert down.eta_exact == up.eta_exact
            assert down.energy_exact - up.energy_exact == pytest.approx(base_params.omega, abs=1e-14)


class TestLevelTable:
    def test_sorted_by_quantum_numbers(self, base_params):
        levels = spectrum.level_table(base_params, (-1, 1), 2, (1, -1))
        assert len(levels) == 3 * 2 * 3
        keys = [lvl.qn.sort_key() for lvl in levels]
        assert keys == sorted(keys)

    def test_matches_single_levels(self, torsion_params):
        levels = spectrum.level_table(torsion_params, (0, 2), 3, (1,))
        for level in levels:
            single = spectrum.energy_exact(level.qn, torsion_params)
            assert level.eta_exact == pytest.approx(single.eta_exact, rel=1e-15)
            assert level.energy_exact == pytest.approx(single.energy_exact, rel=1e-14)

    def test_empty_range(self, base_params):
        with pytest.raises(DomainError):
            spectrum.level_table(base_params, (2, 1), 0)


class TestRadialMode:
    @pytest.mark.parametrize("n", range(6))
    def test_mode_properties(self, base_params, n):
        qn = QuantumNumbers(n, 0, 1)
        mode = spectrum.radial_mode(qn, base_params, 4096)
        assert abs(mode.values[-1]) < 1e-9
        assert spectrum.node_count(mode) == n
        assert np.sum(mode.norm_weight * mode.values ** 2) == pytest.approx(1.0, abs=1e-8)
        assert mode.grid[0] > 0 and mode.grid[-1] == pytest.approx(10.0)
        assert np.all(np.diff(mode.grid) > 0)

    def test_ground_mode_single_sign(self, base_params):
        mode = spectrum.radial_mode(QuantumNumbers(0, 0, 1), base_params, 256)
        assert np.all(mode.values[:-1] > 0)

    def test_norm_stable_under_refinement(self, base_params):
        qn = QuantumNumbers(3, 1, -1)
        coarse = spectrum.radial_mode(qn, base_params, 2048)
        fine = spectrum.radial_mode(qn, base_params, 4096)
        np.testing.assert_allclose(fine.values[1::2], coarse.values, rtol=0, atol=1e-8)

    def test_odd_grid_weights(self, base_params):
        mode = spectrum.radial_mode(QuantumNumbers(1, 0, 1), base_params, 1001)
        assert np.sum(mode.norm_weight * mode.values ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_grid_too_small(self, base_params):
        with pytest.raises(ResolutionError):
            spectrum.radial_mode(QuantumNumbers(0, 0, 1), base_params, 32)


class TestHamiltonianResidual:
    def test_small_on_fine_grid(self, base_params):
        for n in range(6):
            qn = QuantumNumbers(n, 0, 1)
            mode = spectrum.radial_mode(qn, base_params, 4096)
            level = spectrum.energy_exact(qn, base_params)
            assert spectrum.hamiltonian_residual(mode, level, base_params) < 1e-5

    @pytest.mark.parametrize("qn", [
        QuantumNumbers(0, 0, 1), QuantumNumbers(1, 0, -1), QuantumNumbers(0, 1, 1), QuantumNumbers(2, 1, -1),
    ])
    def test_second_order_decay(self, base_params, qn):
        level = spectrum.energy_exact(qn, base_params)
        coarse = spectrum.hamiltonian_residual(spectrum.radial_mode(qn, base_params, 2048), level, base_params)
        fine = spectrum.hamiltonian_residual(spectrum.radial_mode(qn, base_params, 4096), level, base_params)
        assert coarse / fine == pytest.approx(4.0, abs=0.5)

    def test_perturbed_eta_is_detected(self, base_params):
        qn = QuantumNumbers(0, 0, 1)
        level = spectrum.energy_exact(qn, base_params)
        mode = spectrum.radial_mode(qn, base_params, 4096)
        detuned = RadialMode(
            qn=qn,
            grid=mode.grid,
            values=special.jv(0.0, 1.01 * level.eta_exact * mode.grid),
            norm_weight=mode.norm_weight,
        )
        assert spectrum.hamiltonian_residual(detuned, level, base_params) > 1e-2

    def test_flipped_first_derivative_term(self, base_params):
        qn = QuantumNumbers(1, 0, 1)
        mode = spectrum.radial_mode(qn, base_params, 4096)
        level = spectrum.energy_exact(qn, base_params)
        with pytest.raises(ResolutionError):
            spectrum.hamiltonian_residual(mode, level, base_params, connection_term=-1.0)

    def test_mismatched_quantum_numbers(self, base_params):
        mode = spectrum.radial_mode(QuantumNumbers(0, 0, 1), base_params, 256)
        level = spectrum.energy_exact(QuantumNumbers(1, 0, 1), base_params)
        with pytest.raises(DomainError):
            spectrum.hamiltonian_residual(mode, level, base_params)

    def test_inconsistent_energy(self, base_params):
        qn = QuantumNumbers(0, 0, 1)
        mode = spectrum.radial_mode(qn, base_params, 256)
        level = replace(spectrum.energy_exact(qn, base_params), energy_exact=0.5)
        with pytest.raises(EvaluationError):
            spectrum.hamiltonian_residual(mode, level, base_params)


class TestSeparatedTerms:
    @pytest.mark.parametrize("l", [-3, 0, 2])
    @pytest.mark.parametrize("s", [1, -1])
    def test_centrifugal_is_nu_squared(self, torsion_params, l, s):
        qn = QuantumNumbers(0, l, s)
        terms = spectrum.schrodinger_pauli_terms(qn, torsion_params)
        nu = spectrum.effective_order(qn, torsion_params)
        assert terms.centrifugal == pytest.approx(nu * nu, rel=1e-14, abs=1e-14)
        assert terms.axis_term == 0.25
        assert terms.page_werner == pytest.approx(-torsion_params.omega * (l + 0.5))

    def test_reassembly(self, torsion_params):
        qn = QuantumNumbers(1, 2, -1)
        level = spectrum.energy_exact(qn, torsion_params)
        terms = spectrum.schrodinger_pauli_terms(qn, torsion_params)
        assert spectrum.reassemble_energy(terms, level.eta_exact, torsion_params.mass) == pytest.approx(
            level.energy_exact, abs=1e-12)
