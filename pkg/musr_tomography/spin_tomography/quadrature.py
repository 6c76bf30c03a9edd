import numpy as np
from dataclasses import dataclass, field
from scipy.special import roots_legendre

from musr_tomography.errors import QuadratureDegreeError
from musr_tomography.spin_tomography.direction import Direction

# degree marker for plain evaluation sets that carry no integration rule
NO_DEGREE = -1


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Directions with weights summing to 1, integrating dn/4pi.

    A grid built by `gauss_legendre` integrates spherical polynomials up to `degree`
    exactly. Grids built by `from_directions` are evaluation sets only.
    """

    nodes: tuple[Direction, ...]
    weights: np.ndarray
    degree: int = NO_DEGREE
    vectors: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if len(weights) != len(self.nodes):
            raise ValueError("one weight per node is required")
        if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "vectors", np.array([n.vector for n in self.nodes]))

    def __len__(self) -> int:
        return len(self.nodes)

    @classmethod
    def gauss_legendre(cls, n_theta: int, n_phi: int) -> "QuadratureGrid":
        """Gauss-Legendre in cos(theta) times the uniform trapezoid rule in phi."""
        cos_theta, w_theta = roots_legendre(n_theta)
        phis = 2 * np.pi * np.arange(n_phi) / n_phi
        nodes, weights = [], []
        for c, wt in zip(cos_theta, w_theta):
            theta = float(np.arccos(np.clip(c, -1.0, 1.0)))
            for phi in phis:
                nodes.append(Direction(theta, phi))
                weights.append(wt / 2 / n_phi)
        weights = np.asarray(weights)
        return cls(tuple(nodes), weights / weights.sum(), min(2 * n_theta - 1, n_phi - 1))

    @classmethod
    def for_spin(cls, j: float, extra: int = 0) -> "QuadratureGrid":
        """Smallest product grid that is exact for reconstruction at spin j."""
        four_j = int(round(4 * j))
        return cls.gauss_legendre(four_j + 1 + extra, four_j + 2 + extra)

    @classmethod
    def from_directions(cls, directions) -> "QuadratureGrid":
        directions = tuple(directions)
        return cls(directions, np.full(len(directions), 1.0 / len(directions)))

    def require_degree(self, degree: int) -> None:
        if self.degree < degree:
            raise QuadratureDegreeError(
                f"grid integrates up to degree {self.degree}, degree {degree} is required"
            )

    def ppt_permutation(self) -> np.ndarray:
        """Index map i -> index of the node mirrored by n_y -> -n_y."""
        mirrored = self.vectors * np.array([1.0, -1.0, 1.0])
        distance = np.linalg.norm(mirrored[:, None, :] - self.vectors[None, :, :], axis=2)
        perm = np.argmin(distance, axis=1)
        if np.max(distance[np.arange(len(self)), perm]) > 1e-9:
            raise ValueError("grid is not closed under the n_y -> -n_y mirror")
        return perm
