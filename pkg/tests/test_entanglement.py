import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from conftest import SINGLET, random_density, random_product_mixture
from musr_tomography.dynamics import free_mu_bell_max, free_mu_state, mhz_to_rad_per_ns
from musr_tomography.entanglement import (
    BellContraction,
    BellSetting,
    EntanglementReport,
    bell_cells,
    bell_number,
    chsh_bound,
    correlation_tensor,
    elementwise_bound,
    entanglement_E,
    entanglement_report,
    max_bell,
    negativity,
    positivity_coefficients,
    ppt_tomogram,
    qubit_star_factor,
    star_kernel,
    tomographic_M34,
)
from musr_tomography.errors import DimensionError, InvalidStateError, ProbabilityRangeError
from musr_tomography.linalg import Subsystem, SubsystemDims, partial_transpose
from musr_tomography.spin_tomography import Direction, dequantizer, quantizer
from musr_tomography.two_spin import TwoSpinTomogram

OMEGA0 = mhz_to_rad_per_ns(4453.0, is_angular=True)
QUBITS = SubsystemDims(2, 2)


def test_singlet_measures():
    # rho^ppt has spectrum (-1/2, 1/2, 1/2, 1/2)
    coeffs = positivity_coefficients(partial_transpose(SINGLET, QUBITS, Subsystem.MUON))
    assert coeffs.M2 == pytest.approx(0.0, abs=1e-12)
    assert coeffs.M3 == pytest.approx(-1 / 4, abs=1e-12)
    assert coeffs.M4 == pytest.approx(-1 / 16, abs=1e-12)
    assert entanglement_E(SINGLET) == pytest.approx(5 / 8, abs=1e-12)
    assert negativity(SINGLET) == pytest.approx(0.5, abs=1e-12)


def test_singlet_reaches_tsirelson_bound():
    setting = BellSetting.coplanar(0.0, np.pi / 2, np.pi / 4, -np.pi / 4)
    cells = bell_cells(SINGLET, setting)
    assert abs(bell_number(cells, BellContraction.TRACE)) == pytest.approx(2 * np.sqrt(2), abs=1e-12)
    assert abs(bell_number(cells)) == pytest.approx(np.sqrt(2) / 2, abs=1e-12)
    assert chsh_bound(SINGLET) == pytest.approx(2 * np.sqrt(2))


def test_separable_states(rng):
    for _ in range(200):
        rho = random_product_mixture(rng)
        assert entanglement_E(rho) < 1e-12
        assert negativity(rho) < 1e-12


@pytest.mark.slow
def test_separable_states_respect_bell_bound(rng):
    for _ in range(10):
        rho = random_product_mixture(rng)
        for _ in range(1000):
            cells = bell_cells(rho, BellSetting.from_angles(rng.uniform(0, 2 * np.pi, 8)))
            for contraction in BellContraction:
                assert abs(bell_number(cells, contraction)) <= 2 + 1e-6


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_measure_is_non_negative(seed):
    rho = random_density(np.random.default_rng(seed), 4)
    assert entanglement_E(rho) >= 0.0
    assert positivity_coefficients(rho).is_positive


def test_free_muonium_correlations():
    t = 0.37
    c, s = np.cos(OMEGA0 * t), np.sin(OMEGA0 * t)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    expected[3, 0] = (1 + c) / 2
    expected[0, 3] = (1 - c) / 2
    expected[1, 2] = s / 2
    expected[2, 1] = -s / 2
    assert np.allclose(correlation_tensor(free_mu_state(t, OMEGA0)), expected, atol=1e-12)


@pytest.mark.parametrize("contraction", list(BellContraction))
def test_free_muonium_bell_maximum(contraction):
    for t in np.linspace(0.05, 1.3, 5):
        result = max_bell(free_mu_state(t, OMEGA0), contraction, starts=16)
        assert result.value == pytest.approx(free_mu_bell_max(t, OMEGA0, contraction), abs=1e-3)
        if contraction is BellContraction.ELEMENTWISE:
            assert result.value <= 1 + 1e-6


def test_default_bell_maximum_of_free_muonium_stays_below_one():
    result = max_bell(free_mu_state(np.pi / (2 * OMEGA0), OMEGA0), starts=16)
    assert result.contraction is BellContraction.ELEMENTWISE
    assert result.value == pytest.approx(1.0, abs=1e-3)
    assert result.value <= 1 + 1e-6


def test_bell_search_matches_analytic_chsh_bound(rng):
    for _ in range(5):
        rho = random_density(rng, 4)
        assert max_bell(rho, BellContraction.TRACE, starts=16).value == pytest.approx(chsh_bound(rho), abs=1e-3)
        assert max_bell(rho, starts=16).value == pytest.approx(elementwise_bound(rho), abs=1e-3)


def test_bell_number_validation():
    with pytest.raises(ProbabilityRangeError):
        bell_number(np.full((4, 4), 0.3))
    with pytest.raises(DimensionError):
        bell_number(np.full((3, 4), 1 / 3))


def test_bell_setting_round_trip():
    setting = BellSetting.coplanar(0.1, 1.2, 0.7, 2.5)
    again = BellSetting.from_angles(setting.to_angles())
    for a, b in zip(setting.directions, again.directions):
        assert np.allclose(a.vector, b.vector)
    assert set(setting.to_dict()) == {"n1_mu", "n2_mu", "n1_e", "n2_e"}


def test_qubit_star_factor_is_trace_of_operator_product(rng):
    for _ in range(20):
        n1, n2, n = Direction.random(rng), Direction.random(rng), Direction.random(rng)
        m1, m2, m = rng.choice([0.5, -0.5], 3)
        expected = np.trace(quantizer(0.5, m1, n1) @ quantizer(0.5, m2, n2) @ dequantizer(0.5, m, n))
        assert qubit_star_factor(m1, n1, m2, n2, m, n) == pytest.approx(expected, abs=1e-12)


def test_ppt_tomogram_is_tomogram_of_partial_transpose(rng):
    rho = random_density(rng, 4)
    w = TwoSpinTomogram.for_spins(rho)
    transposed = TwoSpinTomogram.from_state(partial_transpose(rho, QUBITS, Subsystem.MUON), w.grid_mu, w.grid_e)
    assert np.allclose(ppt_tomogram(w).values, transposed.values, atol=1e-12)


def test_tomographic_coefficients_match_trace_formulas(rng):
    for _ in range(20):
        rho = random_density(rng, 4)
        coeffs = positivity_coefficients(partial_transpose(rho, QUBITS, Subsystem.MUON))
        w = TwoSpinTomogram.for_spins(rho)
        M3, M4 = tomographic_M34(w)
        assert M3 == pytest.approx(coeffs.M3, abs=1e-6)
        assert M4 == pytest.approx(coeffs.M4, abs=1e-6)
        M3b, M4b = tomographic_M34(w, Direction.random(rng), Direction.random(rng))
        assert M3b == pytest.approx(M3, abs=1e-6)
        assert M4b == pytest.approx(M4, abs=1e-6)


def test_negativity_dimensions(rng):
    product = np.kron(random_density(rng, 2, 1), random_density(rng, 3))
    assert negativity(product) < 1e-12
    with pytest.raises(DimensionError):
        negativity(random_density(rng, 8))


def test_positivity_coefficients_need_unit_trace():
    with pytest.raises(InvalidStateError):
        positivity_coefficients(np.eye(4) / 2)


def test_entanglement_report_of_singlet():
    setting = BellSetting.coplanar(0.0, np.pi / 2, np.pi / 4, -np.pi / 4)
    report = entanglement_report(SINGLET, t=0.0, setting=setting)
    assert report.E == pytest.approx(5 / 8)
    assert report.M3 == pytest.approx(-1 / 4)
    assert report.M4 == pytest.approx(-1 / 16)
    assert report.max_bell == pytest.approx(2.0, abs=1e-3)
    chsh = entanglement_report(SINGLET, t=0.0, setting=setting, contraction=BellContraction.TRACE)
    assert abs(chsh.bell_number) == pytest.approx(2 * np.sqrt(2))
    assert chsh.max_bell == pytest.approx(2 * np.sqrt(2), abs=1e-3)
    assert report.negativity == pytest.approx(0.5)


def test_entanglement_report_validation():
    with pytest.raises(ValidationError):
        EntanglementReport(t=0.0, E=0.5, M2=0.0, M3=0.0, M4=0.0, max_bell=0.0, negativity=0.0)
    with pytest.raises(ValidationError):
        EntanglementReport(t=0.0, E=0.0, M2=0.0, M3=0.0, M4=0.0, max_bell=0.0, negativity=-0.1)


def test_star_kernel_factorizes_over_subsystems(rng):
    pairs = [[(m, Direction.random(rng)) for m in (0.5, -0.5)] for _ in range(3)]
    first, second, target = pairs
    expected = qubit_star_factor(*first[0], *second[0], *target[0]) * qubit_star_factor(
        *first[1], *second[1], *target[1]
    )
    assert star_kernel(first, second, target) == pytest.approx(expected)
    with pytest.raises(DimensionError):
        star_kernel(first, second, target[:1])
