import numpy as np
from enum import Enum
from typing import NamedTuple
from numpy.typing import ArrayLike, NDArray

from musr_tomography.errors import (
    DimensionError,
    InvalidStateError,
    NotHermitianError,
    NotUnitaryError,
)

ComplexMatrix = NDArray[np.complex128]
DensityMatrix = NDArray[np.complex128]

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
STATE_TOL = 1e-10


class Subsystem(Enum):
    MUON = "A"
    ELECTRON = "B"


class SubsystemDims(NamedTuple):
    """Dimensions of the muon (A) and electron (B) factors."""

    dim_a: int
    dim_b: int

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b

    @classmethod
    def from_spins(cls, j_mu: float, j_e: float) -> "SubsystemDims":
        return cls(int(round(2 * j_mu)) + 1, int(round(2 * j_e)) + 1)


def as_matrix(m: ArrayLike) -> ComplexMatrix:
    """Convert to a finite square complex matrix, raising DimensionError otherwise."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("matrix has non-finite entries")
    return arr


def hermitian_defect(m: ComplexMatrix) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(m: ArrayLike, rtol: float = HERMITIAN_TOL) -> ComplexMatrix:
    arr = as_matrix(m)
    scale = max(np.linalg.norm(arr), 1.0)
    if hermitian_defect(arr) > rtol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (defect {hermitian_defect(arr):.3e})")
    return arr


def check_unitary(u: ArrayLike, tol: float = UNITARY_TOL) -> ComplexMatrix:
    arr = as_matrix(u)
    defect = np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0])))
    if defect > tol:
        raise NotUnitaryError(f"matrix is not unitary (defect {defect:.3e})")
    return arr


def as_density_matrix(rho: ArrayLike, dim: int | None = None, tol: float = STATE_TOL) -> DensityMatrix:
    """Validate a density matrix: square, Hermitian and unit trace within `tol`.

    Positivity is not checked here; callers that need it use `eig_hermitian`.
    """
    arr = as_matrix(rho)
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected a {dim}x{dim} density matrix, got {arr.shape}")
    if hermitian_defect(arr) > tol:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(arr) - 1.0) > tol:
        raise InvalidStateError(f"density matrix trace is {np.trace(arr).real:.12g}, expected 1")
    return arr


def kron(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def _check_dims(m: ComplexMatrix, dims: SubsystemDims) -> None:
    if m.shape[0] != dims.total:
        raise DimensionError(f"matrix of size {m.shape[0]} does not match dims {tuple(dims)}")


def partial_trace(m: ArrayLike, dims: SubsystemDims, keep: Subsystem = Subsystem.MUON) -> ComplexMatrix:
    """Trace out one factor of a bipartite operator.

    Args:
        m (ArrayLike): Operator on the composite space, muon-major ordering.
        dims (SubsystemDims): Factor dimensions.
        keep (Subsystem): The factor that survives.

    Returns:
        ComplexMatrix: The reduced operator.
    """
    arr = as_matrix(m)
    _check_dims(arr, dims)
    t = arr.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    if keep is Subsystem.MUON:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def partial_transpose(m: ArrayLike, dims: SubsystemDims, which: Subsystem = Subsystem.MUON) -> ComplexMatrix:
    """Transpose the indices of one factor."""
    arr = as_matrix(m)
    _check_dims(arr, dims)
    t = arr.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    if which is Subsystem.MUON:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(dims.total, dims.total)


def eig_hermitian(m: ArrayLike) -> tuple[NDArray[np.float64], ComplexMatrix]:
    """Eigendecomposition of a Hermitian matrix.

    Returns:
        tuple: Ascending real eigenvalues and the unitary matrix of eigenvectors (columns).
    """
    arr = check_hermitian(m)
    values, vectors = np.linalg.eigh((arr + arr.conj().T) / 2)
    return values, vectors


def propagator(h: ArrayLike, t: float, hbar: float = 1.0) -> ComplexMatrix:
    """exp(-i h t / hbar) for a static Hermitian h."""
    values, vectors = eig_hermitian(h)
    phases = np.exp(-1j * values * t / hbar)
    return (vectors * phases) @ vectors.conj().T


def phase_insensitive_distance(u: ArrayLike, v: ArrayLike) -> float:
    """Max-entry distance between u and e^{i phi} v with phi chosen to align the two."""
    a = np.asarray(u, dtype=np.complex128)
    b = np.asarray(v, dtype=np.complex128)
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))
