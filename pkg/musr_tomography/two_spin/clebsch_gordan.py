import numpy as np
from dataclasses import dataclass
from functools import lru_cache

from musr_tomography.linalg.spin_operators import check_spin, projections, two_j
from musr_tomography.spin_tomography.wigner import clebsch_gordan


def coupled_spins(j_mu: float, j_e: float) -> list[float]:
    """Total spins L from j_mu + j_e down to |j_mu - j_e|."""
    top, bottom = two_j(j_mu) + two_j(j_e), abs(two_j(j_mu) - two_j(j_e))
    return [doubled / 2 for doubled in range(top, bottom - 1, -2)]


@dataclass(frozen=True, eq=False)
class TwoSpinBasis:
    j_mu: float
    j_e: float

    def __post_init__(self):
        object.__setattr__(self, "j_mu", check_spin(self.j_mu))
        object.__setattr__(self, "j_e", check_spin(self.j_e))

    @property
    def dim(self) -> int:
        return (two_j(self.j_mu) + 1) * (two_j(self.j_e) + 1)

    @property
    def product_labels(self) -> list[tuple[float, float]]:
        return [(m_mu, m_e) for m_mu in projections(self.j_mu) for m_e in projections(self.j_e)]

    @property
    def coupled_labels(self) -> list[tuple[float, float]]:
        return [(L, M) for L in coupled_spins(self.j_mu, self.j_e) for M in projections(L)]

    @property
    def blocks(self) -> list[tuple[float, slice]]:
        """Slices of the coupled basis belonging to each total spin L."""
        out, start = [], 0
        for L in coupled_spins(self.j_mu, self.j_e):
            size = two_j(L) + 1
            out.append((L, slice(start, start + size)))
            start += size
        return out


@dataclass(frozen=True, eq=False)
class CGMatrix:
    """Change of basis |L M> = sum U[(L M), (m_mu m_e)] |m_mu m_e>.

    Rows follow `basis.coupled_labels` (L descending, M descending), columns follow
    `basis.product_labels`. An operator X in the product basis reads U X U^T in the
    coupled basis.
    """

    basis: TwoSpinBasis
    matrix: np.ndarray

    def to_coupled(self, operator: np.ndarray) -> np.ndarray:
        return self.matrix @ operator @ self.matrix.T

    def to_product(self, operator: np.ndarray) -> np.ndarray:
        return self.matrix.T @ operator @ self.matrix


@lru_cache(maxsize=None)
def cg_matrix(j_mu: float, j_e: float) -> CGMatrix:
    basis = TwoSpinBasis(j_mu, j_e)
    matrix = np.array(
        [
            [clebsch_gordan(basis.j_mu, m_mu, basis.j_e, m_e, L, M) for m_mu, m_e in basis.product_labels]
            for L, M in basis.coupled_labels
        ]
    )
    matrix.setflags(write=False)
    return CGMatrix(basis, matrix)
