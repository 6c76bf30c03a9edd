from musr_tomography.entanglement.bell import (
    BELL_MATRIX,
    BellContraction,
    BellResult,
    BellSetting,
    bell_cells,
    bell_number,
    chsh_bound,
    correlation_tensor,
    elementwise_bound,
    max_bell,
)
from musr_tomography.entanglement.ppt import (
    EntanglementReport,
    PositivityCoefficients,
    entanglement_E,
    negativity,
    positivity_coefficients,
    ppt_tomogram,
)
from musr_tomography.entanglement.report import entanglement_report
from musr_tomography.entanglement.star_product import qubit_star_factor, star_kernel, star_product, tomographic_M34
