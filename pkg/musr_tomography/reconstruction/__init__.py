from musr_tomography.reconstruction.design import (
    PARAMETERS,
    PRODUCT_LABELS,
    DesignMatrix,
    Identifiability,
    forward_model,
    identifiability,
    parameters_from_state,
    state_from_parameters,
)
from musr_tomography.reconstruction.plan import (
    CompositePlan,
    MeasurementPlan,
    Plan,
    default_directions,
    default_plan_times,
)
from musr_tomography.reconstruction.reconstruct import (
    ReconstructionReport,
    ReconstructionResult,
    clip_to_states,
    reconstruct_initial,
)
