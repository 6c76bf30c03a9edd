from musr_tomography.linalg.matrix_ops import (
    ComplexMatrix,
    DensityMatrix,
    Subsystem,
    SubsystemDims,
    as_density_matrix,
    as_matrix,
    check_hermitian,
    check_unitary,
    eig_hermitian,
    kron,
    partial_trace,
    partial_transpose,
    phase_insensitive_distance,
    propagator,
)
from musr_tomography.linalg.spin_operators import (
    IDENTITY_2,
    PAULI,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SUPPORTED_SPINS,
    check_spin,
    projections,
    spin_along,
    spin_operators,
    two_j,
)
