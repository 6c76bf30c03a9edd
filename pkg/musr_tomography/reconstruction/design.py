import numpy as np
from dataclasses import dataclass
from itertools import product

from musr_tomography.dynamics.evolution import evolve_density
from musr_tomography.errors import DimensionError
from musr_tomography.linalg.matrix_ops import as_density_matrix
from musr_tomography.linalg.spin_operators import IDENTITY_2, PAULI
from musr_tomography.reconstruction.plan import Plan
from musr_tomography.spin_tomography.wigner import rotation_matrix
from musr_tomography.two_spin.two_spin_tomogram import reduced_tomogram

PARAMETERS = 15
RANK_RTOL = 1e-10
PAULI_LABELS = "IXYZ"

# sigma_i x sigma_j for (i, j) != (0, 0), i outermost
PAULI_PRODUCTS = tuple(
    np.kron(a, b)
    for (i, a), (j, b) in product(enumerate((IDENTITY_2,) + PAULI), repeat=2)
    if (i, j) != (0, 0)
)
PRODUCT_LABELS = tuple(
    PAULI_LABELS[i] + PAULI_LABELS[j] for i, j in product(range(4), repeat=2) if (i, j) != (0, 0)
)


def state_from_parameters(x) -> np.ndarray:
    """rho = I/4 + sum_k x_k P_k / 2 over the fifteen Pauli products."""
    x = np.asarray(x, dtype=float)
    if x.shape != (PARAMETERS,):
        raise DimensionError(f"expected {PARAMETERS} parameters, got {x.shape}")
    return np.eye(4) / 4 + np.einsum("k,kab->ab", x, np.array(PAULI_PRODUCTS)) / 2


def parameters_from_state(rho) -> np.ndarray:
    rho = as_density_matrix(rho, 4)
    return np.array([np.real(np.trace(rho @ p)) / 2 for p in PAULI_PRODUCTS])


def _check_qubits(plan: Plan) -> None:
    if any(segment.propagator.dim != 4 for segment in plan.segments):
        raise DimensionError("initial-state reconstruction is defined for two qubits")


def forward_model(rho0, plan: Plan) -> np.ndarray:
    """w(+1/2, n, t) of Tr_e[U(t) rho0 U(t)^dagger] at every plan point in plan order."""
    _check_qubits(plan)
    rho0 = as_density_matrix(rho0, 4)
    values = []
    for segment in plan.segments:
        evolved = {t: evolve_density(rho0, segment.propagator.unitary(t)) for t in segment.times}
        values.extend(reduced_tomogram(evolved[t], n)[0] for n, t in segment.points)
    return np.array(values)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Affine map x -> 1/2 + G x from Pauli parameters of rho0 to plan predictions."""

    matrix: np.ndarray
    offset: float = 0.5

    @classmethod
    def assemble(cls, plan: Plan) -> "DesignMatrix":
        _check_qubits(plan)
        products = np.array(PAULI_PRODUCTS)
        rows = []
        for segment in plan.segments:
            unitaries = {t: segment.propagator.unitary(t) for t in segment.times}
            for n, t in segment.points:
                column = rotation_matrix(0.5, n)[:, 0]
                projector = np.kron(np.outer(column, column.conj()), IDENTITY_2)
                U = unitaries[t]
                Q = U.conj().T @ projector @ U
                rows.append(np.real(np.einsum("ab,kba->k", Q, products)) / 2)
        return cls(np.array(rows))

    def predict(self, x) -> np.ndarray:
        return self.offset + self.matrix @ np.asarray(x, dtype=float)

    @property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    @property
    def rank(self) -> int:
        s = self.singular_values
        if len(s) == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > RANK_RTOL * s[0]))

    @property
    def condition_number(self) -> float:
        s = self.singular_values
        if self.rank < PARAMETERS:
            return float("inf")
        return float(s[0] / s[PARAMETERS - 1])

    def null_space(self) -> np.ndarray:
        """Orthonormal parameter directions the plan cannot see, as rows."""
        _, _, vh = np.linalg.svd(self.matrix)
        return vh[self.rank :]

    def describe_null_space(self, terms: int = 3) -> str:
        descriptions = []
        for v in self.null_space():
            order = np.argsort(-np.abs(v))[:terms]
            descriptions.append(" + ".join(f"{v[k]:+.3f} {PRODUCT_LABELS[k]}" for k in order if abs(v[k]) > 1e-6))
        return "; ".join(descriptions) or "none"


@dataclass(frozen=True)
class Identifiability:
    rank: int
    condition_number: float

    @property
    def reconstructible(self) -> bool:
        return self.rank == PARAMETERS


def identifiability(plan: Plan) -> Identifiability:
    """Rank and condition number of the plan's design matrix."""
    design = DesignMatrix.assemble(plan)
    return Identifiability(design.rank, design.condition_number)
