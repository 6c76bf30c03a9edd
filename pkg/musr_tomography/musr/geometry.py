import numpy as np
from dataclasses import dataclass

from musr_tomography.errors import ConfigError
from musr_tomography.spin_tomography.direction import Direction

OPPOSITE_TOL = 1e-9


@dataclass(frozen=True)
class Detector:
    """Acceptance cone around `axis` with a detection efficiency."""

    axis: Direction
    half_angle: float
    efficiency: float = 1.0

    def __post_init__(self):
        if not 0 < self.half_angle <= np.pi:
            raise ConfigError(f"half-angle {self.half_angle} outside (0, pi]")
        if not 0 < self.efficiency <= 1:
            raise ConfigError(f"efficiency {self.efficiency} outside (0, 1]")

    @property
    def solid_fraction(self) -> float:
        """Fraction of the full sphere inside the cone."""
        return (1 - np.cos(self.half_angle)) / 2

    @property
    def mean_cosine(self) -> float:
        """Average of cos(angle to axis) over the cone."""
        return (1 + np.cos(self.half_angle)) / 2

    def expected_fraction(self, P, a: float) -> float:
        """Share of emitted positrons hitting and registered by this detector."""
        return self.efficiency * self.solid_fraction * (1 + a * self.mean_cosine * float(np.asarray(P) @ self.axis.vector))

    def contains(self, vectors: np.ndarray) -> np.ndarray:
        return vectors @ self.axis.vector >= np.cos(self.half_angle)


@dataclass(frozen=True)
class DetectorGeometry:
    detectors: tuple[Detector, ...]

    def __post_init__(self):
        if not self.detectors:
            raise ConfigError("a geometry needs at least one detector")
        object.__setattr__(self, "detectors", tuple(self.detectors))

    def __len__(self) -> int:
        return len(self.detectors)

    def __iter__(self):
        return iter(self.detectors)

    @classmethod
    def full_sphere(cls, efficiency: float = 1.0) -> "DetectorGeometry":
        """A single detector covering all directions."""
        return cls((Detector(Direction.z(), np.pi, efficiency),))

    @classmethod
    def cartesian(cls, half_angle: float, efficiency: float = 1.0) -> "DetectorGeometry":
        """Six cones along +-x, +-y, +-z, ordered as forward/backward pairs."""
        axes = []
        for v in np.eye(3):
            axes += [Direction.from_vector(v), Direction.from_vector(-v)]
        return cls(tuple(Detector(axis, half_angle, efficiency) for axis in axes))

    def opposite_pairs(self) -> list[tuple[int, int]]:
        """(forward, backward) index pairs of detectors on opposite axes."""
        pairs, used = [], set()
        for i, d in enumerate(self.detectors):
            if i in used:
                continue
            for k in range(i + 1, len(self.detectors)):
                other = self.detectors[k]
                if k not in used and d.axis.dot(other.axis) < -1 + OPPOSITE_TOL:
                    if not np.isclose(d.half_angle, other.half_angle):
                        raise ConfigError(f"detectors {i} and {k} face each other with different cones")
                    pairs.append((i, k))
                    used.update((i, k))
                    break
        return pairs
