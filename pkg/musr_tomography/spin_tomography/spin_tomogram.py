import numpy as np
import pandas as pd
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from musr_tomography.errors import DimensionError, InvalidProjectionError
from musr_tomography.linalg.matrix_ops import (
    ComplexMatrix,
    DensityMatrix,
    as_density_matrix,
    check_unitary,
)
from musr_tomography.linalg.spin_operators import check_spin, projections, two_j
from musr_tomography.spin_tomography.direction import Direction
from musr_tomography.spin_tomography.quadrature import QuadratureGrid
from musr_tomography.spin_tomography.wigner import rotation_matrix, three_j

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpinTomogram:
    """Probabilities w(m, n) of a single spin sampled on a grid of directions.

    `values[i, k]` is the probability of the i-th projection (m descending) along
    `grid.nodes[k]`.
    """

    j: float
    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (two_j(self.j) + 1, len(self.grid)):
            raise DimensionError(f"values of shape {values.shape} do not match spin and grid")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_state(cls, rho, j: float, grid: QuadratureGrid) -> "SpinTomogram":
        return cls(j, grid, tomogram_on_grid(rho, j, grid))

    def normalization_defect(self) -> float:
        return float(np.max(np.abs(self.values.sum(axis=0) - 1.0)))

    def to_frame(self) -> pd.DataFrame:
        ms = projections(self.j)
        rows = [
            (m, node.theta, node.phi, weight, self.values[i, k])
            for i, m in enumerate(ms)
            for k, (node, weight) in enumerate(zip(self.grid.nodes, self.grid.weights))
        ]
        return pd.DataFrame(rows, columns=["m", "theta", "phi", "weight", "probability"])

    def to_csv(self, path: str | Path) -> None:
        frame = self.to_frame()
        # presentation boundary: clamp roundoff outside [0, 1]
        frame["probability"] = frame["probability"].clip(0.0, 1.0)
        frame.to_csv(path, index=False, float_format="%.12g")


def unitary_tomogram(rho, U) -> np.ndarray:
    """Diagonal of U rho U^dagger, the unitary spin tomogram w(m, U)."""
    rho = as_density_matrix(rho)
    U = check_unitary(U)
    if U.shape != rho.shape:
        raise DimensionError("unitary and state dimensions differ")
    return np.real(np.einsum("ij,jk,ik->i", U, rho, U.conj()))


def tomogram(rho, j: float, direction: Direction) -> np.ndarray:
    """w(m, n) for m = j..-j, the probability of projection m along n.

    This is the unitary tomogram at u = R(n)^dagger.

    Args:
        rho: (2j+1)-dimensional density matrix.
        j (float): Spin.
        direction (Direction): Measurement axis.

    Returns:
        np.ndarray: Probabilities ordered with m descending.
    """
    rho = as_density_matrix(rho, two_j(j) + 1)
    R = rotation_matrix(j, direction)
    return np.real(np.einsum("im,ij,jm->m", R.conj(), rho, R))


def rotation_stack(j: float, grid: QuadratureGrid) -> np.ndarray:
    return np.array([rotation_matrix(j, node) for node in grid.nodes])


def tomogram_on_grid(rho, j: float, grid: QuadratureGrid) -> np.ndarray:
    rho = as_density_matrix(rho, two_j(j) + 1)
    R = rotation_stack(j, grid)
    return np.real(np.einsum("kim,ij,kjm->mk", R.conj(), rho, R))


@lru_cache(maxsize=None)
def _zonal_quantizer(doubled: int) -> np.ndarray:
    """Diagonals of D(m, z) for every m: row i belongs to the i-th projection."""
    j = doubled / 2
    ms = projections(j)
    phase = np.array([(-1) ** int(round(j - m)) for m in ms])
    table = np.zeros((len(ms), len(ms)))
    for k in range(doubled + 1):
        t_k0 = phase * np.sqrt(2 * k + 1) * np.array([three_j(j, j, k, m, -m, 0) for m in ms])
        table += (2 * k + 1) * np.outer(t_k0, t_k0)
    table.setflags(write=False)
    return table


def _projection_index(j: float, m: float) -> int:
    ms = projections(j)
    hits = np.flatnonzero(np.abs(ms - m) < 1e-9)
    if len(hits) == 0:
        raise InvalidProjectionError(f"projection {m} is invalid for spin {j}")
    return int(hits[0])


def quantizer(j: float, m: float, direction: Direction) -> ComplexMatrix:
    """Quantizer D(m, n) dual to the tomogram under dn/4pi integration.

    For j = 1/2 this is I/2 + 3m (n . sigma).
    """
    j = check_spin(j)
    zonal = _zonal_quantizer(two_j(j))[_projection_index(j, m)]
    R = rotation_matrix(j, direction)
    return (R * zonal) @ R.conj().T


def dequantizer(j: float, m: float, direction: Direction) -> ComplexMatrix:
    """Projector R(n)|jm><jm|R(n)^dagger, so that w(m, n) = Tr[rho * dequantizer]."""
    j = check_spin(j)
    column = rotation_matrix(j, direction)[:, _projection_index(j, m)]
    return np.outer(column, column.conj())


def reconstruct_from_sphere(tom: SpinTomogram) -> DensityMatrix:
    """rho = sum_m integral w(m, n) D(m, n) dn/4pi by quadrature.

    Raises:
        QuadratureDegreeError: If the grid is not exact to degree 4j.
    """
    j = check_spin(tom.j)
    tom.grid.require_degree(int(round(4 * j)))
    zonal = _zonal_quantizer(two_j(j))
    R = rotation_stack(j, tom.grid)
    # per node the quantizer sum is diagonal before rotation
    diagonals = tom.grid.weights[:, None] * (tom.values.T @ zonal)
    rho = np.einsum("kab,kb,kcb->ac", R, diagonals, R.conj())
    return (rho + rho.conj().T) / 2


def quantizer_stack(j: float, grid: QuadratureGrid) -> np.ndarray:
    """D(m_i, n_k) for every projection and node, shape (2j+1, N, 2j+1, 2j+1)."""
    j = check_spin(j)
    zonal = _zonal_quantizer(two_j(j))
    R = rotation_stack(j, grid)
    return np.einsum("kab,ib,kcb->ikac", R, zonal, R.conj())


def dequantizer_stack(j: float, grid: QuadratureGrid) -> np.ndarray:
    """R(n_k)|m_i><m_i|R(n_k)^dagger for every projection and node."""
    R = rotation_stack(check_spin(j), grid)
    return np.einsum("kai,kci->ikac", R, R.conj())
