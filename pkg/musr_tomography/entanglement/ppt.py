import numpy as np
from dataclasses import dataclass, replace
from pydantic import BaseModel, Field, model_validator

from musr_tomography.errors import DimensionError, InvalidStateError
from musr_tomography.linalg.matrix_ops import (
    Subsystem,
    SubsystemDims,
    as_density_matrix,
    check_hermitian,
    partial_transpose,
)
from musr_tomography.two_spin.two_spin_tomogram import TwoSpinTomogram, infer_dims

NEGATIVITY_DIMS = ((2, 2), (2, 3))
TRACE_TOL = 1e-10


def ppt_tomogram(w: TwoSpinTomogram) -> TwoSpinTomogram:
    """Partial transpose of the muon factor acting on a tomogram.

    w_ppt(m_mu, n_mu, ...) = w(m_mu, n_mu_ppt, ...) with n_ppt = (n_x, -n_y, n_z); the
    muon grid must be closed under that mirror.
    """
    perm = w.grid_mu.ppt_permutation()
    return replace(w, values=w.values[:, perm, :, :])


@dataclass(frozen=True)
class PositivityCoefficients:
    """Elementary symmetric polynomials M2, M3, M4 of a unit-trace 4x4 spectrum."""

    M2: float
    M3: float
    M4: float

    @property
    def is_positive(self) -> bool:
        return min(self.M2, self.M3, self.M4) >= -1e-12


def positivity_coefficients(lam) -> PositivityCoefficients:
    """M2, M3 and M4 from traces of powers of a 4x4 Hermitian, unit-trace matrix."""
    lam = check_hermitian(lam)
    if lam.shape != (4, 4):
        raise DimensionError(f"positivity coefficients need a 4x4 matrix, got {lam.shape}")
    if abs(np.trace(lam) - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"trace is {np.trace(lam).real:.12g}, expected 1")
    lam2 = lam @ lam
    t2 = np.real(np.trace(lam2))
    t3 = np.real(np.trace(lam2 @ lam))
    t4 = np.real(np.trace(lam2 @ lam2))
    return PositivityCoefficients(
        M2=(1 - t2) / 2,
        M3=(1 - 3 * t2 + 2 * t3) / 6,
        M4=(1 - 6 * t2 + 3 * t2**2 + 8 * t3 - 6 * t4) / 24,
    )


def measure_from_coefficients(M3: float, M4: float) -> float:
    return abs(M3) + abs(M4) - M3 - M4


def entanglement_E(rho) -> float:
    """E = |M3| + |M4| - M3 - M4 of the partially transposed two-qubit state."""
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DimensionError("the measure E is defined for two qubits")
    coeffs = positivity_coefficients(partial_transpose(rho, SubsystemDims(2, 2), Subsystem.MUON))
    return measure_from_coefficients(coeffs.M3, coeffs.M4)


def negativity(rho, dims: SubsystemDims | None = None) -> float:
    """Sum of |negative eigenvalues| of rho^ppt, for 2x2 and 2x3 systems."""
    rho = as_density_matrix(rho)
    dims = dims or infer_dims(rho)
    if tuple(dims) not in NEGATIVITY_DIMS:
        raise DimensionError(f"negativity is supported for dims {NEGATIVITY_DIMS}, got {tuple(dims)}")
    transposed = partial_transpose(rho, dims, Subsystem.MUON)
    eigenvalues = np.linalg.eigvalsh((transposed + transposed.conj().T) / 2)
    return float(-eigenvalues[eigenvalues < 0].sum())


class EntanglementReport(BaseModel):
    """Entanglement diagnostics of one state, serialized as one JSON record."""

    t: float
    E: float = Field(ge=0.0)
    M2: float
    M3: float
    M4: float
    bell_number: float | None = None
    max_bell: float
    negativity: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _measure_matches_coefficients(self):
        if abs(self.E - measure_from_coefficients(self.M3, self.M4)) > 1e-12:
            raise ValueError("E must equal |M3| + |M4| - M3 - M4")
        return self
