import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, random_unitary
from musr_tomography.errors import (
    CoplanarDirectionsError,
    InvalidProjectionError,
    QuadratureDegreeError,
)
from musr_tomography.linalg import PAULI, IDENTITY_2, spin_operators
from musr_tomography.spin_tomography import (
    Direction,
    QuadratureGrid,
    SpinTomogram,
    clebsch_gordan,
    dequantizer,
    dual_basis,
    quantizer,
    reconstruct_from_sphere,
    reconstruct_qubit_three_directions,
    rotation_matrix,
    three_j,
    tomogram,
    unitary_tomogram,
    wigner_small_d,
)

angles = st.tuples(st.floats(0.0, np.pi), st.floats(0.0, 2 * np.pi))


def test_known_small_d_values():
    beta = 0.83
    assert wigner_small_d(0.5, 0.5, 0.5, beta) == pytest.approx(np.cos(beta / 2))
    assert wigner_small_d(0.5, 0.5, -0.5, beta) == pytest.approx(-np.sin(beta / 2))
    assert wigner_small_d(1, 0, 0, beta) == pytest.approx(np.cos(beta))
    assert wigner_small_d(1, 1, 1, beta) == pytest.approx((1 + np.cos(beta)) / 2)


def test_known_three_j_and_clebsch_gordan():
    assert three_j(0.5, 0.5, 1, 0.5, -0.5, 0) == pytest.approx(1 / np.sqrt(6))
    assert clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0, 0) == pytest.approx(1 / np.sqrt(2))
    assert clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) == pytest.approx(-1 / np.sqrt(2))
    assert clebsch_gordan(1, 1, 0.5, -0.5, 1.5, 0.5) == pytest.approx(1 / np.sqrt(3))


def test_three_j_selection_rules_give_zero():
    assert three_j(0.5, 0.5, 1, 0.5, 0.5, 0) == 0.0
    assert three_j(0.5, 0.5, 2, 0.5, -0.5, 0) == 0.0


def test_invalid_projection():
    with pytest.raises(InvalidProjectionError):
        wigner_small_d(0.5, 1.0, 0.5, 0.1)


@settings(max_examples=50, deadline=None)
@given(angles)
def test_rotation_carries_z_onto_n(theta_phi):
    n = Direction(*theta_phi)
    for j in (0.5, 1.0):
        jx, jy, jz = spin_operators(j)
        R = rotation_matrix(j, n)
        n_dot_j = n.vector[0] * jx + n.vector[1] * jy + n.vector[2] * jz
        assert np.allclose(R @ jz @ R.conj().T, n_dot_j, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(angles, st.integers(0, 2**32 - 1))
def test_qubit_tomogram_is_polarization_projection(theta_phi, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 2)
    n = Direction(*theta_phi)
    P = np.real([np.trace(rho @ s) for s in PAULI])
    w = tomogram(rho, 0.5, n)
    assert w[0] == pytest.approx(0.5 * (1 + P @ n.vector), abs=1e-12)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_rotation_tomogram_is_unitary_tomogram_at_inverse_rotation(rng):
    rho = random_density(rng, 3)
    n = Direction(1.1, 2.3)
    R = rotation_matrix(1.0, n)
    assert np.allclose(tomogram(rho, 1.0, n), unitary_tomogram(rho, R.conj().T), atol=1e-12)
    assert unitary_tomogram(rho, random_unitary(rng, 3)).sum() == pytest.approx(1.0)


def test_qubit_quantizer_closed_form():
    n = Direction(0.4, 1.9)
    n_sigma = sum(c * s for c, s in zip(n.vector, PAULI))
    for m in (0.5, -0.5):
        assert np.allclose(quantizer(0.5, m, n), IDENTITY_2 / 2 + 3 * m * n_sigma, atol=1e-12)


def test_dequantizer_gives_tomogram(rng):
    rho = random_density(rng, 4)
    n = Direction(2.0, 0.3)
    w = tomogram(rho, 1.5, n)
    assert np.real(np.trace(rho @ dequantizer(1.5, -0.5, n))) == pytest.approx(w[2])


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5])
def test_sphere_reconstruction_round_trip(rng, j):
    dim = int(2 * j + 1)
    grid = QuadratureGrid.for_spin(j)
    for _ in range(50):
        rho = random_density(rng, dim)
        tom = SpinTomogram.from_state(rho, j, grid)
        assert tom.normalization_defect() < 1e-12
        assert np.linalg.norm(reconstruct_from_sphere(tom) - rho) < 1e-9


def test_reconstruction_requires_exact_grid(rng):
    grid = QuadratureGrid.gauss_legendre(1, 1)
    tom = SpinTomogram.from_state(random_density(rng, 2), 0.5, grid)
    with pytest.raises(QuadratureDegreeError):
        reconstruct_from_sphere(tom)


def test_three_direction_inverse_is_exact(rng):
    directions = (Direction(0.3, 0.0), Direction(1.4, 2.0), Direction(2.2, 4.1))
    for _ in range(20):
        rho = random_density(rng, 2)
        w = tuple(tomogram(rho, 0.5, n)[0] for n in directions)
        assert np.max(np.abs(reconstruct_qubit_three_directions(w, directions) - rho)) < 1e-12


def test_three_direction_inverse_rejects_coplanar_axes(axes):
    x, y, _ = axes
    with pytest.raises(CoplanarDirectionsError):
        reconstruct_qubit_three_directions((0.5, 0.5, 0.5), (x, y, Direction.from_vector([1, 1, 0])))


def test_grid_weights_integrate_low_order_polynomials():
    grid = QuadratureGrid.gauss_legendre(3, 4)
    z = grid.vectors[:, 2]
    assert grid.weights.sum() == pytest.approx(1.0)
    assert grid.weights @ z**2 == pytest.approx(1 / 3)
    assert grid.weights @ (grid.vectors[:, 0] ** 2) == pytest.approx(1 / 3)


def test_direction_validation_and_mirror():
    with pytest.raises(ValueError):
        Direction(4.0, 0.0)
    n = Direction(1.0, 0.5)
    assert np.allclose(n.ppt().vector, n.vector * [1, -1, 1])
    assert Direction.from_vector([0, 0, -3]).theta == pytest.approx(np.pi)


def test_dual_basis_is_biorthogonal(rng):
    for _ in range(20):
        directions = [Direction.random(rng) for _ in range(3)]
        duals = dual_basis(*directions)
        gram = np.array([[l @ n.vector for n in directions] for l in duals])
        assert np.allclose(gram, np.eye(3), atol=1e-12)
