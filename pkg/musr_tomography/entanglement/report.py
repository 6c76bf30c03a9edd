from musr_tomography.entanglement.bell import (
    DEFAULT_STARTS,
    BellContraction,
    BellSetting,
    bell_cells,
    bell_number,
    max_bell,
)
from musr_tomography.entanglement.ppt import (
    EntanglementReport,
    measure_from_coefficients,
    negativity,
    positivity_coefficients,
)
from musr_tomography.linalg.matrix_ops import Subsystem, SubsystemDims, as_density_matrix, partial_transpose


def entanglement_report(
    rho,
    t: float = 0.0,
    setting: BellSetting | None = None,
    contraction: BellContraction = BellContraction.ELEMENTWISE,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
) -> EntanglementReport:
    """All two-qubit diagnostics of one state at time t."""
    rho = as_density_matrix(rho, 4)
    coeffs = positivity_coefficients(partial_transpose(rho, SubsystemDims(2, 2), Subsystem.MUON))
    return EntanglementReport(
        t=t,
        E=measure_from_coefficients(coeffs.M3, coeffs.M4),
        M2=coeffs.M2,
        M3=coeffs.M3,
        M4=coeffs.M4,
        bell_number=None if setting is None else bell_number(bell_cells(rho, setting), contraction),
        max_bell=max_bell(rho, contraction, starts, seed).value,
        negativity=negativity(rho),
    )
