import numpy as np
from dataclasses import dataclass

from musr_tomography.dynamics.propagators import PropagatorSpec
from musr_tomography.errors import PlanError
from musr_tomography.spin_tomography.direction import Direction

GOLDEN = (np.sqrt(5) - 1) / 2
DEFAULT_TIME_COUNT = 5
CONGRUENCE_TOL = 1e-9


def default_directions() -> tuple[Direction, Direction, Direction]:
    return Direction.x(), Direction.y(), Direction.z()


def default_plan_times(prop: PropagatorSpec, count: int = DEFAULT_TIME_COUNT) -> tuple[float, ...]:
    """Times spread over the beat period of the two lowest level gaps.

    t_l = T frac((l + 1) g) with g the golden ratio conjugate, which keeps every pair of
    times away from a common period.
    """
    gaps = prop.eigenfrequency_gaps()
    if len(gaps) == 0:
        raise PlanError("the Hamiltonian has no level splitting to sample")
    beat = gaps[1] - gaps[0] if len(gaps) > 1 else gaps[0]
    period = 2 * np.pi / beat
    return tuple(float(period * ((l + 1) * GOLDEN % 1.0)) for l in range(count))


@dataclass(frozen=True)
class MeasurementPlan:
    """Axes and times at which w(+1/2, n, t) of the muon is measured.

    Raises:
        PlanError: If two times coincide or differ by a multiple of a level-gap period.
    """

    directions: tuple[Direction, ...]
    times: tuple[float, ...]
    propagator: PropagatorSpec

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if not self.directions or not self.times:
            raise PlanError("a plan needs at least one direction and one time")
        times = np.asarray(self.times)
        for i in range(len(times)):
            for k in range(i + 1, len(times)):
                if abs(times[i] - times[k]) < CONGRUENCE_TOL:
                    raise PlanError(f"times {times[i]} and {times[k]} coincide")
        for gap in self.propagator.eigenfrequency_gaps():
            period = 2 * np.pi / gap
            for i in range(len(times)):
                for k in range(i + 1, len(times)):
                    phase = ((times[i] - times[k]) / period) % 1.0
                    if min(phase, 1 - phase) < CONGRUENCE_TOL:
                        raise PlanError(
                            f"times {times[i]} and {times[k]} differ by a multiple of the period {period:.6g} ns"
                        )

    @classmethod
    def with_defaults(cls, prop: PropagatorSpec, directions=None, times=None) -> "MeasurementPlan":
        return cls(
            tuple(directions) if directions is not None else default_directions(),
            tuple(times) if times is not None else default_plan_times(prop),
            prop,
        )

    @property
    def points(self) -> list[tuple[Direction, float]]:
        """Measurement points, directions outermost."""
        return [(n, t) for n in self.directions for t in self.times]

    def __len__(self) -> int:
        return len(self.directions) * len(self.times)

    def to_dict(self) -> dict:
        h = self.propagator.hamiltonian
        return {
            "directions": [[n.theta, n.phi] for n in self.directions],
            "times_ns": list(self.times),
            "family": h.family.value,
            "A": h.A,
            "delta_A": h.delta_A,
            "B_field": list(h.B_field),
            "anisotropy_axis": None if h.anisotropy_axis is None else [h.anisotropy_axis.theta, h.anisotropy_axis.phi],
            "j_e": h.j_e,
            "method": self.propagator.method.value,
        }

    @property
    def segments(self) -> tuple["MeasurementPlan", ...]:
        return (self,)


@dataclass(frozen=True)
class CompositePlan:
    """Single-field plans taken on identically prepared samples, rows stacked in order.

    A single Hamiltonian conserves its own expectation value, so one field alone leaves one
    parameter direction close to H unobserved. Stacking fields removes that blind spot.
    """

    plans: tuple[MeasurementPlan, ...]

    def __post_init__(self):
        object.__setattr__(self, "plans", tuple(self.plans))
        if not self.plans:
            raise PlanError("a composite plan needs at least one field")

    @property
    def segments(self) -> tuple[MeasurementPlan, ...]:
        return self.plans

    @property
    def points(self) -> list[tuple[Direction, float]]:
        """Measurement points, fields outermost, then directions."""
        return [point for plan in self.plans for point in plan.points]

    def __len__(self) -> int:
        return sum(len(plan) for plan in self.plans)

    def to_dict(self) -> dict:
        return {"segments": [plan.to_dict() for plan in self.plans]}


Plan = MeasurementPlan | CompositePlan
