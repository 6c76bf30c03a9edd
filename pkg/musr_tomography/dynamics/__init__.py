from musr_tomography.dynamics.constants import (
    DEFAULT_CONSTANTS,
    MUON_LIFETIME_NS,
    PhysicalConstants,
    critical_field_gauss,
    mhz_to_rad_per_ns,
)
from musr_tomography.dynamics.evolution import (
    EvolutionPath,
    TomogramSeries,
    analytic_free_mu,
    analytic_free_mu_reduced,
    default_times,
    evolve_density,
    evolve_tomogram,
    free_mu_bell_max,
    free_mu_entanglement,
    free_mu_state,
    muon_states,
    muonium_initial_state,
)
from musr_tomography.dynamics.hamiltonian import HamiltonianFamily, HamiltonianSpec, build_hamiltonian
from musr_tomography.dynamics.propagators import (
    ClosedFormVariant,
    PropagatorMethod,
    PropagatorScalars,
    PropagatorSpec,
    detect_variant,
    propagator_closed_form,
    propagator_numeric,
)
