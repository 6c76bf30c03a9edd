import logging
import numpy as np
from dataclasses import dataclass
from enum import Enum
from scipy.optimize import minimize

from musr_tomography.errors import DimensionError, ProbabilityRangeError
from musr_tomography.linalg.matrix_ops import as_density_matrix
from musr_tomography.linalg.spin_operators import IDENTITY_2, PAULI
from musr_tomography.spin_tomography.direction import Direction
from musr_tomography.two_spin.two_spin_tomogram import individual_tomogram

logger = logging.getLogger(__name__)

# rows follow the setting index of the cell matrix, columns the outcome index
BELL_MATRIX = np.array(
    [
        [1, -1, -1, 1],
        [1, -1, -1, 1],
        [1, -1, -1, 1],
        [-1, 1, 1, -1],
    ],
    dtype=float,
)

CELL_SUM_TOL = 1e-8
DEFAULT_STARTS = 32
ANGLE_XTOL = 1e-4


class BellContraction(Enum):
    """How the sign matrix is contracted with the cell matrix W."""

    TRACE = "trace"  # sum_kl I_kl W_lk, the CHSH combination
    ELEMENTWISE = "elementwise"  # sum_kl I_kl W_kl


@dataclass(frozen=True)
class BellSetting:
    """Two measurement axes per spin."""

    n1_mu: Direction
    n2_mu: Direction
    n1_e: Direction
    n2_e: Direction

    @classmethod
    def from_angles(cls, angles) -> "BellSetting":
        """Eight angles (theta, phi) x 4; out-of-range theta is folded back onto the sphere."""
        angles = np.asarray(angles, dtype=float).reshape(4, 2)
        vectors = np.stack(
            [
                np.sin(angles[:, 0]) * np.cos(angles[:, 1]),
                np.sin(angles[:, 0]) * np.sin(angles[:, 1]),
                np.cos(angles[:, 0]),
            ],
            axis=1,
        )
        return cls(*(Direction.from_vector(v) for v in vectors))

    @classmethod
    def coplanar(cls, a1: float, a2: float, b1: float, b2: float) -> "BellSetting":
        """Axes in the x-z plane at the given angles from z."""
        def axis(angle):
            return Direction.from_vector([np.sin(angle), 0.0, np.cos(angle)])

        return cls(axis(a1), axis(a2), axis(b1), axis(b2))

    def to_angles(self) -> np.ndarray:
        return np.array([[n.theta, n.phi] for n in self.directions]).ravel()

    @property
    def directions(self) -> tuple[Direction, Direction, Direction, Direction]:
        return self.n1_mu, self.n2_mu, self.n1_e, self.n2_e

    def to_dict(self) -> dict:
        names = ("n1_mu", "n2_mu", "n1_e", "n2_e")
        return {name: [n.theta, n.phi] for name, n in zip(names, self.directions)}


@dataclass(frozen=True)
class BellResult:
    value: float
    setting: BellSetting
    contraction: BellContraction


def bell_cells(rho, setting: BellSetting) -> np.ndarray:
    """Cell matrix W of a two-qubit state.

    Rows are the outcomes (++, +-, -+, --), columns the axis pairs
    (n1 n1, n1 n2, n2 n1, n2 n2) with the muon axis first.
    """
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DimensionError("Bell cells are defined for two qubits")
    columns = [
        individual_tomogram(rho, n_mu, n_e).ravel()
        for n_mu in (setting.n1_mu, setting.n2_mu)
        for n_e in (setting.n1_e, setting.n2_e)
    ]
    return np.array(columns).T


def bell_number(cells, contraction: BellContraction = BellContraction.ELEMENTWISE) -> float:
    """Bell-like number B of a 4x4 cell matrix.

    Raises:
        ProbabilityRangeError: If a column does not sum to 1 within 1e-8.
    """
    W = np.asarray(cells, dtype=float)
    if W.shape != (4, 4):
        raise DimensionError(f"cell matrix must be 4x4, got {W.shape}")
    defect = np.max(np.abs(W.sum(axis=0) - 1.0))
    if defect > CELL_SUM_TOL:
        raise ProbabilityRangeError(f"cell columns do not sum to 1 (defect {defect:.2e})")
    if contraction is BellContraction.TRACE:
        return float(np.trace(BELL_MATRIX @ W))
    return float(np.sum(BELL_MATRIX * W))


def correlation_tensor(rho) -> np.ndarray:
    """R_ij = Tr[rho sigma_i x sigma_j] with sigma_0 = I, shape (4, 4)."""
    rho = as_density_matrix(rho, 4)
    basis = (IDENTITY_2,) + PAULI
    return np.array([[np.real(np.trace(rho @ np.kron(a, b))) for b in basis] for a in basis])


def _cells_from_correlations(R: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Cell matrix from R for unit vectors (n1_mu, n2_mu, n1_e, n2_e)."""
    signs = np.array([1.0, -1.0])
    # augmented[s, a] = (1, 2 m n_a) for m = +-1/2
    augmented = np.concatenate(
        [np.ones((2, 4, 1)), signs[:, None, None] * vectors[None, :, :]], axis=2
    )
    mu, e = augmented[:, :2], augmented[:, 2:]
    # cells[m_mu, m_e, a, b]
    cells = np.einsum("pax,xy,qby->pqab", mu, R, e) / 4
    return cells.reshape(4, 4)


def _unit_vectors(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles.reshape(4, 2).T
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1)


def max_bell(
    rho,
    contraction: BellContraction = BellContraction.ELEMENTWISE,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
) -> BellResult:
    """Maximize |B| over the four measurement axes.

    Random multi-starts are each refined by coordinate-wise line searches (Powell's
    method with the unit directions) on the eight angles; the best run wins.
    """
    R = correlation_tensor(rho)
    rng = np.random.default_rng(seed)

    def objective(angles):
        W = _cells_from_correlations(R, _unit_vectors(angles))
        if contraction is BellContraction.TRACE:
            return -abs(np.trace(BELL_MATRIX @ W))
        return -abs(np.sum(BELL_MATRIX * W))

    best_value, best_angles = -np.inf, None
    for _ in range(starts):
        x0 = np.column_stack([np.arccos(rng.uniform(-1, 1, 4)), rng.uniform(0, 2 * np.pi, 4)]).ravel()
        result = minimize(
            objective,
            x0,
            method="Powell",
            options={"direc": np.eye(8), "xtol": ANGLE_XTOL, "ftol": 1e-12},
        )
        if -result.fun > best_value:
            best_value, best_angles = -result.fun, result.x
    logger.debug(f"[Bell]: max |B| = {best_value:.6f} over {starts} starts ({contraction.value})")
    return BellResult(float(best_value), BellSetting.from_angles(best_angles), contraction)


def chsh_bound(rho) -> float:
    """Largest CHSH value 2 sqrt(t1^2 + t2^2) from the two largest singular values of T."""
    T = correlation_tensor(rho)[1:, 1:]
    singular = np.linalg.svd(T, compute_uv=False)
    return float(2 * np.sqrt(singular[0] ** 2 + singular[1] ** 2))


def elementwise_bound(rho) -> float:
    """Largest elementwise |B|, 2 t1 from the largest singular value of T.

    B = -(a1 - a2) T (b1 - b2) / 2 under that contraction, so antipodal axis pairs along the
    leading singular vectors attain the maximum.
    """
    T = correlation_tensor(rho)[1:, 1:]
    return float(2 * np.linalg.svd(T, compute_uv=False)[0])
