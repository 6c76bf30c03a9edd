import numpy as np
import pytest

from conftest import random_density, random_unitary
from musr_tomography.linalg import Subsystem, SubsystemDims, partial_trace
from musr_tomography.spin_tomography import Direction, QuadratureGrid, rotation_matrix, tomogram
from musr_tomography.two_spin import (
    TotalPdfTable,
    TwoSpinTomogram,
    blockdiag_rotation,
    cg_matrix,
    individual_tomogram,
    individual_tomogram_unitary,
    product_rotation,
    reconstruct_blockdiag,
    reconstruct_two_spin,
    reduced_tomogram,
    reduced_tomogram_unitary,
    total_from_individual,
    total_pdf,
    total_tomogram,
)


@pytest.mark.parametrize("j_e", [0.5, 1.0])
def test_cg_matrix_is_orthogonal(j_e):
    U = cg_matrix(0.5, j_e).matrix
    assert np.allclose(U @ U.T, np.eye(U.shape[0]), atol=1e-12)


@pytest.mark.parametrize("j_e", [0.5, 1.0])
def test_direct_sum_rotation_equals_conjugated_product_rotation(rng, j_e):
    cg = cg_matrix(0.5, j_e).matrix
    for _ in range(50):
        n = Direction.random(rng)
        product = np.kron(rotation_matrix(0.5, n), rotation_matrix(j_e, n))
        assert np.max(np.abs(blockdiag_rotation(0.5, j_e, n) - cg @ product @ cg.T)) < 1e-12


@pytest.mark.parametrize("dim", [4, 6])
def test_two_spin_reconstruction_round_trip(rng, dim):
    for _ in range(50):
        rho = random_density(rng, dim)
        w = TwoSpinTomogram.for_spins(rho)
        assert w.normalization_defect() < 1e-12
        assert np.linalg.norm(reconstruct_two_spin(w) - rho) < 1e-9


def test_individual_tomogram_of_product_state_factorizes(rng):
    a, b = random_density(rng, 2), random_density(rng, 3)
    n_mu, n_e = Direction(0.7, 1.0), Direction(2.1, 5.0)
    joint = individual_tomogram(np.kron(a, b), n_mu, n_e)
    assert np.allclose(joint, np.outer(tomogram(a, 0.5, n_mu), tomogram(b, 1.0, n_e)), atol=1e-12)


def test_reduced_tomogram_is_electron_marginal(rng):
    rho = random_density(rng, 4)
    n = Direction(1.2, 0.4)
    marginal = individual_tomogram(rho, n, Direction(0.3, 2.0)).sum(axis=1)
    assert np.allclose(reduced_tomogram(rho, n), marginal, atol=1e-12)
    rho_mu = partial_trace(rho, SubsystemDims(2, 2), Subsystem.MUON)
    assert np.allclose(reduced_tomogram(rho, n), tomogram(rho_mu, 0.5, n), atol=1e-12)


def test_reduced_tomogram_of_unitary_marginal(rng):
    rho = random_density(rng, 4)
    U = random_unitary(rng, 4)
    assert reduced_tomogram_unitary(rho, U).sum() == pytest.approx(1.0)


def test_total_tomogram_from_individual_without_density_matrix(rng):
    rho = random_density(rng, 4)
    U = random_unitary(rng, 4)
    w = TwoSpinTomogram.for_spins(rho)
    assert np.allclose(total_from_individual(w, U), total_tomogram(rho, U), atol=1e-10)


def test_singlet_has_all_weight_in_the_L0_block():
    singlet = np.outer([0, 1, -1, 0], [0, 1, -1, 0]) / 2
    total = total_tomogram(singlet, np.eye(4))
    assert total[-1] == pytest.approx(1.0)
    assert np.allclose(total[:-1], 0.0, atol=1e-12)


def test_blockdiag_reconstruction_drops_interblock_coherence(rng):
    rho = random_density(rng, 4)
    grid = QuadratureGrid.for_spin(1.0)
    coupled = cg_matrix(0.5, 0.5).to_coupled(rho)
    expected = coupled.copy()
    expected[:3, 3] = 0
    expected[3, :3] = 0
    assert np.allclose(reconstruct_blockdiag(TotalPdfTable.from_state(rho, grid)), expected, atol=1e-10)


def test_tomogram_frame_columns(rng):
    w = TwoSpinTomogram.for_spins(random_density(rng, 4))
    frame = w.to_frame()
    assert list(frame.columns) == ["m_mu", "theta_mu", "phi_mu", "m_e", "theta_e", "phi_e", "probability"]
    assert len(frame) == w.values.size


def test_unitary_individual_tomogram_with_identity_is_the_diagonal(rng):
    rho = random_density(rng, 6)
    w = individual_tomogram_unitary(rho, np.eye(6))
    assert w.shape == (2, 3)
    assert np.allclose(w.ravel(), np.real(np.diag(rho)))


@pytest.mark.parametrize("j_e", [0.5, 1.0])
def test_total_pdf_is_total_tomogram_at_inverse_rotation(rng, j_e):
    dims = SubsystemDims(2, int(2 * j_e + 1))
    rho = random_density(rng, dims.dim_a * dims.dim_b)
    n = Direction.random(rng)
    f = total_pdf(rho, n)
    assert f.sum() == pytest.approx(1.0)
    R = product_rotation(dims, n, n)
    assert np.allclose(f, total_tomogram(rho, R.conj().T), atol=1e-12)
