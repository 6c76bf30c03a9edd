from musr_tomography.spin_tomography.direction import Direction
from musr_tomography.spin_tomography.quadrature import QuadratureGrid
from musr_tomography.spin_tomography.qubit_reconstruction import (
    dual_basis,
    reconstruct_qubit_three_directions,
)
from musr_tomography.spin_tomography.spin_tomogram import (
    SpinTomogram,
    dequantizer,
    dequantizer_stack,
    quantizer,
    quantizer_stack,
    reconstruct_from_sphere,
    rotation_stack,
    tomogram,
    tomogram_on_grid,
    unitary_tomogram,
)
from musr_tomography.spin_tomography.wigner import (
    clebsch_gordan,
    rotation_matrix,
    three_j,
    wigner_D_matrix,
    wigner_small_d,
)
