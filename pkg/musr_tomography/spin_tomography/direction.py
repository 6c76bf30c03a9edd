import numpy as np
from dataclasses import dataclass
from functools import cached_property

ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class Direction:
    """Unit vector n(theta, phi) on the sphere.

    Also used for the anisotropy axis and for the quantization axis of total-spin
    tomograms. `phi` is normalized into [0, 2*pi); at the poles it is kept as given.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if theta < -ANGLE_SLACK or theta > np.pi + ANGLE_SLACK:
            raise ValueError(f"polar angle {theta} outside [0, pi]")
        object.__setattr__(self, "theta", min(max(theta, 0.0), np.pi))
        object.__setattr__(self, "phi", float(self.phi) % (2 * np.pi))

    @cached_property
    def vector(self) -> np.ndarray:
        s = np.sin(self.theta)
        return np.array([np.cos(self.phi) * s, np.sin(self.phi) * s, np.cos(self.theta)])

    @cached_property
    def perp(self) -> np.ndarray:
        """Rotation axis n_perp = (-sin phi, cos phi, 0) carrying z onto n."""
        return np.array([-np.sin(self.phi), np.cos(self.phi), 0.0])

    @classmethod
    def from_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot take the direction of a zero vector")
        x, y, z = v / norm
        theta = float(np.arccos(np.clip(z, -1.0, 1.0)))
        phi = float(np.arctan2(y, x)) if (x != 0 or y != 0) else 0.0
        return cls(theta, phi)

    @classmethod
    def x(cls) -> "Direction":
        return cls(np.pi / 2, 0.0)

    @classmethod
    def y(cls) -> "Direction":
        return cls(np.pi / 2, np.pi / 2)

    @classmethod
    def z(cls) -> "Direction":
        return cls(0.0, 0.0)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Direction":
        return cls.from_vector(rng.normal(size=3))

    def ppt(self) -> "Direction":
        """Mirror n -> (n_x, -n_y, n_z), the partial-transpose image of a direction."""
        return Direction(self.theta, -self.phi)

    def rotated(self, rotation: np.ndarray) -> "Direction":
        return Direction.from_vector(np.asarray(rotation) @ self.vector)

    def dot(self, other: "Direction") -> float:
        return float(self.vector @ other.vector)
