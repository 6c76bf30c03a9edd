import numpy as np

from musr_tomography.errors import CoplanarDirectionsError
from musr_tomography.linalg.matrix_ops import DensityMatrix
from musr_tomography.linalg.spin_operators import IDENTITY_2, spin_along
from musr_tomography.spin_tomography.direction import Direction

COPLANAR_TOL = 1e-10


def dual_basis(n1: Direction, n2: Direction, n3: Direction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectors l_k with l_i . n_j = delta_ij.

    Raises:
        CoplanarDirectionsError: If |n1 . (n2 x n3)| < 1e-10.
    """
    a, b, c = n1.vector, n2.vector, n3.vector
    triple = float(a @ np.cross(b, c))
    if abs(triple) < COPLANAR_TOL:
        raise CoplanarDirectionsError(f"directions are coplanar (triple product {triple:.2e})")
    return np.cross(b, c) / triple, np.cross(c, a) / triple, np.cross(a, b) / triple


def reconstruct_qubit_three_directions(
    w: tuple[float, float, float],
    directions: tuple[Direction, Direction, Direction],
) -> DensityMatrix:
    """Qubit density matrix from w(+1/2, n_k) along three non-coplanar axes.

    rho = I/2 + sum_k (2 w_k - 1) (J . l_k) with J = sigma/2. The result is Hermitian
    with unit trace; positivity is the caller's concern.
    """
    duals = dual_basis(*directions)
    rho = IDENTITY_2 / 2
    for wk, lk in zip(w, duals):
        rho = rho + (2 * wk - 1) * spin_along(0.5, lk)
    return rho
