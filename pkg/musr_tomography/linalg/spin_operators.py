import numpy as np
from functools import lru_cache

from musr_tomography.errors import UnsupportedSpinError
from musr_tomography.linalg.matrix_ops import ComplexMatrix

SUPPORTED_SPINS = (0.0, 0.5, 1.0, 1.5, 2.0)

IDENTITY_2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def two_j(j: float) -> int:
    """Return 2j as an int, rejecting values that are not half-integers."""
    doubled = round(2 * float(j))
    if doubled < 0 or abs(2 * float(j) - doubled) > 1e-9:
        raise UnsupportedSpinError(f"{j} is not a non-negative half-integer")
    return int(doubled)


def check_spin(j: float) -> float:
    doubled = two_j(j)
    if doubled / 2 not in SUPPORTED_SPINS:
        raise UnsupportedSpinError(f"spin {j} is not supported (allowed: {SUPPORTED_SPINS})")
    return doubled / 2


def projections(j: float) -> np.ndarray:
    """Projections m = j, j-1, ..., -j (descending, the basis order used everywhere)."""
    doubled = two_j(j)
    return (doubled - 2 * np.arange(doubled + 1)) / 2


@lru_cache(maxsize=None)
def _spin_operators(doubled: int) -> tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    j = doubled / 2
    m = (doubled - 2 * np.arange(doubled + 1)) / 2
    j_plus = np.zeros((doubled + 1, doubled + 1), dtype=np.complex128)
    for i in range(1, doubled + 1):
        # <m+1| J+ |m>, rows ordered with m descending
        j_plus[i - 1, i] = np.sqrt((j - m[i]) * (j + m[i] + 1))
    j_minus = j_plus.T.copy()
    jx = (j_plus + j_minus) / 2
    jy = (j_plus - j_minus) / 2j
    jz = np.diag(m).astype(np.complex128)
    for op in (jx, jy, jz):
        op.setflags(write=False)
    return jx, jy, jz


def spin_operators(j: float) -> tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """Spin matrices (Jx, Jy, Jz) in units of hbar, basis |j m> with m descending."""
    return _spin_operators(two_j(j))


def spin_along(j: float, vector) -> ComplexMatrix:
    """Projection v.J of the spin operator on a (not necessarily unit) 3-vector."""
    jx, jy, jz = spin_operators(j)
    vx, vy, vz = np.asarray(vector, dtype=float)
    return vx * jx + vy * jy + vz * jz
