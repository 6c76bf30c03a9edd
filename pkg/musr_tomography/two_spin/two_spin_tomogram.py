import numpy as np
import pandas as pd
from dataclasses import dataclass
from pathlib import Path
from scipy.linalg import block_diag

from musr_tomography.errors import DimensionError
from musr_tomography.linalg.matrix_ops import (
    ComplexMatrix,
    DensityMatrix,
    Subsystem,
    SubsystemDims,
    as_density_matrix,
    check_unitary,
    kron,
    partial_trace,
)
from musr_tomography.linalg.spin_operators import check_spin, projections, two_j
from musr_tomography.spin_tomography.direction import Direction
from musr_tomography.spin_tomography.quadrature import QuadratureGrid
from musr_tomography.spin_tomography.spin_tomogram import (
    dequantizer_stack,
    quantizer_stack,
    reconstruct_from_sphere,
    SpinTomogram,
    tomogram,
)
from musr_tomography.spin_tomography.wigner import rotation_matrix
from musr_tomography.two_spin.clebsch_gordan import TwoSpinBasis, cg_matrix

J_MU = 0.5


def infer_dims(rho: np.ndarray) -> SubsystemDims:
    """Muon qubit times an electron shell of whatever size remains."""
    n = np.asarray(rho).shape[0]
    if n % 2:
        raise DimensionError(f"dimension {n} is not a muon qubit times an electron shell")
    return SubsystemDims(2, n // 2)


def _j_e(dims: SubsystemDims) -> float:
    return check_spin((dims.dim_b - 1) / 2)


@dataclass(frozen=True, eq=False)
class TwoSpinTomogram:
    """Joint probabilities w(m_mu, n_mu, m_e, n_e) on a product of direction grids.

    `values[i, k, j, l]` belongs to the i-th muon projection along `grid_mu.nodes[k]`
    and the j-th electron projection along `grid_e.nodes[l]`.
    """

    j_e: float
    grid_mu: QuadratureGrid
    grid_e: QuadratureGrid
    values: np.ndarray
    j_mu: float = J_MU

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (two_j(self.j_mu) + 1, len(self.grid_mu), two_j(self.j_e) + 1, len(self.grid_e))
        if values.shape != expected:
            raise DimensionError(f"values of shape {values.shape}, expected {expected}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_state(cls, rho, grid_mu: QuadratureGrid, grid_e: QuadratureGrid) -> "TwoSpinTomogram":
        rho = as_density_matrix(rho)
        dims = infer_dims(rho)
        j_e = _j_e(dims)
        P_mu = dequantizer_stack(J_MU, grid_mu)
        P_e = dequantizer_stack(j_e, grid_e)
        rho4 = rho.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
        values = np.real(np.einsum("abcd,ikca,jldb->ikjl", rho4, P_mu, P_e, optimize=True))
        return cls(j_e, grid_mu, grid_e, values)

    @classmethod
    def for_spins(cls, rho, extra: int = 0) -> "TwoSpinTomogram":
        """Sample rho on the smallest grids that allow exact reconstruction."""
        j_e = _j_e(infer_dims(rho))
        return cls.from_state(rho, QuadratureGrid.for_spin(J_MU, extra), QuadratureGrid.for_spin(j_e, extra))

    @property
    def basis(self) -> TwoSpinBasis:
        return TwoSpinBasis(self.j_mu, self.j_e)

    def normalization_defect(self) -> float:
        return float(np.max(np.abs(self.values.sum(axis=(0, 2)) - 1.0)))

    def reduced(self, electron_node: int = 0) -> SpinTomogram:
        """Marginal over electron outcomes, the muon tomogram."""
        return SpinTomogram(self.j_mu, self.grid_mu, self.values[:, :, :, electron_node].sum(axis=2))

    def to_frame(self) -> pd.DataFrame:
        ms_mu, ms_e = projections(self.j_mu), projections(self.j_e)
        i, k, j, l = np.meshgrid(
            np.arange(len(ms_mu)), np.arange(len(self.grid_mu)),
            np.arange(len(ms_e)), np.arange(len(self.grid_e)),
            indexing="ij",
        )
        theta_mu = np.array([n.theta for n in self.grid_mu.nodes])
        phi_mu = np.array([n.phi for n in self.grid_mu.nodes])
        theta_e = np.array([n.theta for n in self.grid_e.nodes])
        phi_e = np.array([n.phi for n in self.grid_e.nodes])
        return pd.DataFrame(
            {
                "m_mu": ms_mu[i.ravel()],
                "theta_mu": theta_mu[k.ravel()],
                "phi_mu": phi_mu[k.ravel()],
                "m_e": ms_e[j.ravel()],
                "theta_e": theta_e[l.ravel()],
                "phi_e": phi_e[l.ravel()],
                "probability": self.values.ravel(),
            }
        )

    def to_csv(self, path: str | Path) -> None:
        frame = self.to_frame()
        frame["probability"] = frame["probability"].clip(0.0, 1.0)
        frame.to_csv(path, index=False, float_format="%.12g")


def individual_tomogram_unitary(rho, U, dims: SubsystemDims | None = None) -> np.ndarray:
    """Diagonal of U rho U^dagger in the product basis, shaped (d_mu, d_e)."""
    rho = as_density_matrix(rho)
    U = check_unitary(U)
    if U.shape != rho.shape:
        raise DimensionError("unitary and state dimensions differ")
    dims = dims or infer_dims(rho)
    diagonal = np.real(np.einsum("ij,jk,ik->i", U, rho, U.conj()))
    return diagonal.reshape(dims.dim_a, dims.dim_b)


def product_rotation(dims: SubsystemDims, dir_mu: Direction, dir_e: Direction) -> ComplexMatrix:
    return kron(rotation_matrix(J_MU, dir_mu), rotation_matrix(_j_e(dims), dir_e))


def individual_tomogram(rho, dir_mu: Direction, dir_e: Direction) -> np.ndarray:
    """Joint probabilities of projections m_mu along n_mu and m_e along n_e.

    Returns:
        np.ndarray: Shape (2, 2 j_e + 1), projections descending on both axes.
    """
    rho = as_density_matrix(rho)
    dims = infer_dims(rho)
    R = product_rotation(dims, dir_mu, dir_e)
    return individual_tomogram_unitary(rho, R.conj().T, dims)


def reduced_tomogram(rho, dir_mu: Direction) -> np.ndarray:
    """Muon tomogram of Tr_e[rho], the quantity a MuSR histogram measures."""
    rho = as_density_matrix(rho)
    return tomogram(partial_trace(rho, infer_dims(rho), keep=Subsystem.MUON), J_MU, dir_mu)


def reduced_tomogram_unitary(rho, U) -> np.ndarray:
    """Marginal over electron outcomes of the unitary two-spin tomogram."""
    return individual_tomogram_unitary(rho, U).sum(axis=1)


def total_tomogram(rho, U) -> np.ndarray:
    """<L M| U rho U^dagger |L M> in the coupled-basis order of `cg_matrix`."""
    rho = as_density_matrix(rho)
    U = check_unitary(U)
    cg = cg_matrix(J_MU, _j_e(infer_dims(rho)))
    V = cg.matrix @ U
    return np.real(np.einsum("ij,jk,ik->i", V, rho, V.conj()))


def blockdiag_rotation(j_mu: float, j_e: float, direction: Direction) -> ComplexMatrix:
    """Direct sum of R^(L)(N) over L in the coupled basis.

    Equals U_CG (R^(j_mu)(N) x R^(j_e)(N)) U_CG^T.
    """
    basis = TwoSpinBasis(j_mu, j_e)
    return block_diag(*[rotation_matrix(L, direction) for L, _ in basis.blocks]).astype(np.complex128)


def total_pdf(rho, direction: Direction) -> np.ndarray:
    """f^(L)(M, N): probability of total projection M along N within each block L."""
    rho = as_density_matrix(rho)
    j_e = _j_e(infer_dims(rho))
    coupled = cg_matrix(J_MU, j_e).to_coupled(rho)
    B = blockdiag_rotation(J_MU, j_e, direction)
    return np.real(np.einsum("im,ij,jm->m", B.conj(), coupled, B))


@dataclass(frozen=True, eq=False)
class TotalPdfTable:
    """Samples f^(L)(M, N) on a grid; rows follow the coupled-basis order."""

    j_e: float
    grid: QuadratureGrid
    values: np.ndarray
    j_mu: float = J_MU

    @classmethod
    def from_state(cls, rho, grid: QuadratureGrid) -> "TotalPdfTable":
        rho = as_density_matrix(rho)
        j_e = _j_e(infer_dims(rho))
        values = np.array([total_pdf(rho, node) for node in grid.nodes]).T
        return cls(j_e, grid, values)


def reconstruct_blockdiag(table: TotalPdfTable) -> DensityMatrix:
    """Block-diagonal state sum_L rho^(L) in the coupled basis from f^(L) samples.

    Each block is inverted with the spin-L quantizer, so the grid must be exact to
    degree 4 L_max. Coherences between blocks are not recoverable.
    """
    basis = TwoSpinBasis(table.j_mu, table.j_e)
    blocks = []
    for L, rows in basis.blocks:
        block_tomogram = SpinTomogram(L, table.grid, table.values[rows])
        blocks.append(reconstruct_from_sphere(block_tomogram))
    return block_diag(*blocks).astype(np.complex128)


def weighted_values(w: TwoSpinTomogram) -> np.ndarray:
    w.grid_mu.require_degree(int(round(4 * w.j_mu)))
    w.grid_e.require_degree(int(round(4 * w.j_e)))
    return w.values * w.grid_mu.weights[None, :, None, None] * w.grid_e.weights[None, None, None, :]


def reconstruct_two_spin(w: TwoSpinTomogram) -> DensityMatrix:
    """rho = sum over projections, double integral of w D_mu x D_e."""
    weighted = weighted_values(w)
    D_mu = quantizer_stack(w.j_mu, w.grid_mu)
    D_e = quantizer_stack(w.j_e, w.grid_e)
    rho4 = np.einsum("ikjl,ikac,jlbd->abcd", weighted, D_mu, D_e, optimize=True)
    n = D_mu.shape[-1] * D_e.shape[-1]
    rho = rho4.reshape(n, n)
    return (rho + rho.conj().T) / 2


def total_from_individual(w: TwoSpinTomogram, U) -> np.ndarray:
    """Total tomogram <L M|U rho U^dagger|L M> computed directly from w.

    The kernel <L M| U (D_mu x D_e) U^dagger |L M> is contracted with the sampled
    individual tomogram; rho itself is never formed.
    """
    weighted = weighted_values(w)
    U = check_unitary(U)
    d_mu, d_e = two_j(w.j_mu) + 1, two_j(w.j_e) + 1
    V = (cg_matrix(w.j_mu, w.j_e).matrix @ U).reshape(-1, d_mu, d_e)
    D_mu = quantizer_stack(w.j_mu, w.grid_mu)
    D_e = quantizer_stack(w.j_e, w.grid_e)
    total = np.einsum("rab,ikac,jlbd,rcd,ikjl->r", V, D_mu, D_e, V.conj(), weighted, optimize=True)
    return np.real(total)
