import numpy as np
import pytest

from conftest import random_density
from musr_tomography.dynamics import (
    HamiltonianFamily,
    HamiltonianSpec,
    PropagatorMethod,
    PropagatorSpec,
    muonium_initial_state,
)
from musr_tomography.errors import DimensionError, PlanError, RankDeficientPlanError
from musr_tomography.reconstruction import (
    PARAMETERS,
    CompositePlan,
    DesignMatrix,
    MeasurementPlan,
    clip_to_states,
    default_plan_times,
    forward_model,
    identifiability,
    parameters_from_state,
    reconstruct_initial,
    state_from_parameters,
)
from musr_tomography.reconstruction.design import PAULI_PRODUCTS
from musr_tomography.spin_tomography import Direction

TWO_PI = 2 * np.pi
SI_A = TWO_PI * 0.0926
SI_DELTA_A = TWO_PI * -0.0758
# rotation by pi/2 about y: z -> x, x -> -z
RY = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])
# field series that breaks the conservation of any single Hamiltonian
FIELDS = ((0.0, 0.0, 33.0), (0.0, 0.0, 100.0), (33.0, 0.0, 0.0))


def mu_star(B_field=(0.0, 0.0, 33.0), axis=(1.0, 1.0, 1.0), method=PropagatorMethod.NUMERIC) -> PropagatorSpec:
    h = HamiltonianSpec(
        HamiltonianFamily.ANISOTROPIC_MU_STAR,
        A=SI_A,
        delta_A=SI_DELTA_A,
        B_field=B_field,
        anisotropy_axis=Direction.from_vector(axis),
    )
    if method is PropagatorMethod.CLOSED_FORM:
        return PropagatorSpec.resolve(h)
    return PropagatorSpec(h, method)


@pytest.fixture(scope="module")
def oblique_plan():
    return MeasurementPlan.with_defaults(mu_star())


@pytest.fixture(scope="module")
def field_series_plan():
    return CompositePlan(tuple(MeasurementPlan.with_defaults(mu_star(B_field=B)) for B in FIELDS))


def mixed_state(rng) -> np.ndarray:
    return 0.5 * random_density(rng, 4) + 0.5 * np.eye(4) / 4


def test_pauli_parameters_round_trip(rng):
    rho = random_density(rng, 4)
    assert np.allclose(state_from_parameters(parameters_from_state(rho)), rho, atol=1e-14)
    with pytest.raises(DimensionError):
        state_from_parameters(np.zeros(PARAMETERS - 1))


def test_field_series_identifies_every_parameter(field_series_plan):
    assert len(field_series_plan) == 45
    assert len(field_series_plan.points) == 45
    assert len(field_series_plan.to_dict()["segments"]) == len(FIELDS)
    result = identifiability(field_series_plan)
    assert result.rank == PARAMETERS
    assert result.reconstructible
    assert np.isfinite(result.condition_number)


def test_single_field_leaves_the_hamiltonian_direction_unobserved(rng, oblique_plan):
    design = DesignMatrix.assemble(oblique_plan)
    assert design.rank == PARAMETERS - 1
    (blind,) = design.null_space()
    h = np.array([np.real(np.trace(oblique_plan.propagator.matrix @ p)) / 2 for p in PAULI_PRODUCTS])
    assert abs(blind @ h) / np.linalg.norm(h) > 0.99
    times = tuple(np.sort(rng.uniform(1.0, 500.0, 40)))
    dense = MeasurementPlan.with_defaults(oblique_plan.propagator, times=times)
    assert identifiability(dense).rank == PARAMETERS - 1


def test_composite_plan_needs_a_field():
    with pytest.raises(PlanError):
        CompositePlan(())


def test_aligned_mu_star_conserves_zz():
    prop = mu_star(axis=(1.0, 0.0, 0.0), method=PropagatorMethod.CLOSED_FORM)
    design = DesignMatrix.assemble(MeasurementPlan.with_defaults(prop))
    assert design.rank <= 13
    assert design.condition_number == float("inf")
    assert len(design.null_space()) == PARAMETERS - design.rank
    assert design.describe_null_space() != "none"


def test_free_muonium_plan_is_rank_deficient():
    prop = PropagatorSpec.resolve(HamiltonianSpec(HamiltonianFamily.HYPERFINE_ONLY, omega0=4.453))
    assert identifiability(MeasurementPlan.with_defaults(prop)).rank < PARAMETERS


def test_single_time_sees_only_the_muon_polarization(oblique_plan):
    plan = MeasurementPlan.with_defaults(oblique_plan.propagator, times=(0.0,))
    assert DesignMatrix.assemble(plan).rank == 3


@pytest.mark.parametrize("axis", [(1.0, 1.0, 1.0), (1.0, 0.0, 0.0)])
def test_rank_is_rotation_invariant(axis):
    plan = MeasurementPlan.with_defaults(mu_star(axis=axis))
    B = RY @ np.array(plan.propagator.hamiltonian.B_field)
    rotated = MeasurementPlan(
        tuple(n.rotated(RY) for n in plan.directions),
        plan.times,
        mu_star(B_field=tuple(B), axis=RY @ np.asarray(axis)),
    )
    assert np.allclose(rotated.directions[0].vector, [0.0, 0.0, -1.0], atol=1e-12)
    s = DesignMatrix.assemble(plan).singular_values
    s_rotated = DesignMatrix.assemble(rotated).singular_values
    assert np.allclose(s, s_rotated, atol=1e-10)
    assert identifiability(plan).rank == identifiability(rotated).rank


def test_design_matrix_reproduces_forward_model(rng, field_series_plan):
    design = DesignMatrix.assemble(field_series_plan)
    assert np.allclose(forward_model(np.eye(4) / 4, field_series_plan), 0.5, atol=1e-12)
    for _ in range(5):
        rho = random_density(rng, 4)
        predicted = design.predict(parameters_from_state(rho))
        assert np.allclose(predicted, forward_model(rho, field_series_plan), atol=1e-12)


def test_forward_model_is_affine(rng, field_series_plan):
    a, b = random_density(rng, 4), random_density(rng, 4)
    mixed = forward_model(0.3 * a + 0.7 * b, field_series_plan)
    expected = 0.3 * forward_model(a, field_series_plan) + 0.7 * forward_model(b, field_series_plan)
    assert np.allclose(mixed, expected, atol=1e-12)


def test_noiseless_round_trip(rng, field_series_plan):
    for _ in range(10):
        rho0 = random_density(rng, 4)
        result = reconstruct_initial(forward_model(rho0, field_series_plan), field_series_plan)
        assert np.linalg.norm(result.rho0 - rho0) <= 1e-6
        assert result.residual_norm < 1e-8
        assert not result.clipping_significant


def test_muonium_initial_state_is_recovered(field_series_plan):
    rho0 = muonium_initial_state()
    result = reconstruct_initial(forward_model(rho0, field_series_plan), field_series_plan)
    assert np.linalg.norm(result.rho0 - rho0) <= 1e-6
    report = result.to_report()
    assert report.rank == PARAMETERS
    assert np.allclose(report.rho0_real, np.real(rho0), atol=1e-6)


def test_noise_matches_predicted_standard_error(rng, field_series_plan):
    rho0 = mixed_state(rng)
    clean = forward_model(rho0, field_series_plan)

    def mean_error(sigma):
        errors, predicted = [], []
        for _ in range(100):
            noisy = clean + rng.normal(0.0, sigma, len(clean))
            result = reconstruct_initial(noisy, field_series_plan, np.full(len(clean), sigma))
            errors.append(np.linalg.norm(result.rho0_unclipped - rho0))
            predicted.append(result.standard_error)
        return np.mean(errors), np.mean(predicted)

    small, predicted = mean_error(5e-3)
    assert 1 / 3 <= small / predicted <= 3
    large, _ = mean_error(1e-2)
    assert 1.5 <= large / small <= 2.5


def test_clip_to_states():
    rho = np.diag([0.6, 0.5, -0.1, 0.0]).astype(complex)
    clipped, shift = clip_to_states(rho)
    assert np.all(np.linalg.eigvalsh(clipped) >= -1e-15)
    assert np.trace(clipped).real == pytest.approx(1.0)
    assert shift > 0.1 - 1e-12
    state = np.eye(4) / 4
    unchanged, shift = clip_to_states(state)
    assert unchanged is state
    assert shift == 0.0


def test_plan_rejects_congruent_times(oblique_plan):
    prop = oblique_plan.propagator
    period = TWO_PI / prop.eigenfrequency_gaps()[0]
    with pytest.raises(PlanError):
        MeasurementPlan.with_defaults(prop, times=(1.0, 1.0 + 3 * period))
    with pytest.raises(PlanError):
        MeasurementPlan.with_defaults(prop, times=(2.0, 2.0))
    with pytest.raises(PlanError):
        MeasurementPlan.with_defaults(prop, directions=())


def test_default_times_are_distinct(oblique_plan):
    times = default_plan_times(oblique_plan.propagator, 7)
    assert len(set(times)) == 7
    assert min(times) > 0


def test_reconstruction_input_checks(field_series_plan):
    values = forward_model(np.eye(4) / 4, field_series_plan)
    with pytest.raises(PlanError):
        reconstruct_initial(values[:-1], field_series_plan)
    with pytest.raises(PlanError):
        reconstruct_initial(values, field_series_plan, np.zeros(len(values)))


def test_rank_deficient_plan_is_reported():
    prop = PropagatorSpec.resolve(HamiltonianSpec(HamiltonianFamily.HYPERFINE_ONLY, omega0=4.453))
    plan = MeasurementPlan.with_defaults(prop)
    with pytest.raises(RankDeficientPlanError) as info:
        reconstruct_initial(np.full(len(plan), 0.5), plan)
    assert info.value.rank < PARAMETERS
    assert info.value.null_space != "none"


def test_qutrit_electron_is_rejected():
    h = HamiltonianSpec(HamiltonianFamily.ISOTROPIC_MU, A=1.0, B_field=(0.0, 0.0, 10.0), j_e=1.0)
    plan = MeasurementPlan.with_defaults(PropagatorSpec(h))
    with pytest.raises(DimensionError):
        DesignMatrix.assemble(plan)
