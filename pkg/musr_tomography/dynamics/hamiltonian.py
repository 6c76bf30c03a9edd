import numpy as np
from dataclasses import dataclass, field
from enum import Enum

from musr_tomography.dynamics.constants import DEFAULT_CONSTANTS, PhysicalConstants
from musr_tomography.errors import ConfigError
from musr_tomography.linalg.matrix_ops import ComplexMatrix, kron
from musr_tomography.linalg.spin_operators import check_spin, spin_along, spin_operators, two_j
from musr_tomography.spin_tomography.direction import Direction

ELECTRON_SPINS = (0.5, 1.0, 1.5)


class HamiltonianFamily(Enum):
    HYPERFINE_ONLY = "HyperfineOnly"
    ISOTROPIC_MU = "IsotropicMu"
    ANISOTROPIC_MU_STAR = "AnisotropicMuStar"


@dataclass(frozen=True)
class HamiltonianSpec:
    """Parameters of a muonium-family Hamiltonian.

    All energies are angular frequencies in rad/ns (hbar = 1), the field is a
    3-vector in Gauss.

    Args:
        family (HamiltonianFamily): Which of the three Hamiltonians.
        A (float): Hyperfine constant. For the hyperfine-only family `omega0` may be
            given instead.
        delta_A (float): Axial anisotropy, Mu* only.
        omega0 (float | None): Hyperfine frequency of the hyperfine-only family.
        B_field (tuple): Field vector in Gauss.
        anisotropy_axis (Direction | None): Axis of the anisotropic term, Mu* only.
        j_e (float): Spin of the electron shell.
    """

    family: HamiltonianFamily
    A: float = 0.0
    delta_A: float = 0.0
    omega0: float | None = None
    B_field: tuple[float, float, float] = (0.0, 0.0, 0.0)
    anisotropy_axis: Direction | None = None
    j_e: float = 0.5
    B: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        family = HamiltonianFamily(self.family)
        object.__setattr__(self, "family", family)
        if check_spin(self.j_e) not in ELECTRON_SPINS:
            raise ConfigError(f"electron spin {self.j_e} not in {ELECTRON_SPINS}")
        B = np.asarray(self.B_field, dtype=float)
        if B.shape != (3,):
            raise ConfigError("B_field must be a 3-vector")
        object.__setattr__(self, "B_field", tuple(float(x) for x in B))
        object.__setattr__(self, "B", B)
        if family is HamiltonianFamily.HYPERFINE_ONLY:
            if self.omega0 is None:
                object.__setattr__(self, "omega0", float(self.A))
            if self.omega0 <= 0:
                raise ConfigError("hyperfine-only Hamiltonian needs omega0 > 0")
            object.__setattr__(self, "A", float(self.omega0))
            if np.any(B != 0):
                raise ConfigError("hyperfine-only Hamiltonian carries no field")
        if family is HamiltonianFamily.ANISOTROPIC_MU_STAR and self.anisotropy_axis is None:
            raise ConfigError("Mu* Hamiltonian needs an anisotropy axis")

    @property
    def hyperfine(self) -> float:
        return float(self.A)

    @property
    def dim(self) -> int:
        return 2 * (two_j(self.j_e) + 1)

    def with_field(self, B_field) -> "HamiltonianSpec":
        return HamiltonianSpec(
            self.family, self.A, self.delta_A, self.omega0, tuple(B_field), self.anisotropy_axis, self.j_e
        )


def spin_coupling(j_e: float) -> ComplexMatrix:
    """J_mu . J_e summed over Cartesian components."""
    return sum(kron(a, b) for a, b in zip(spin_operators(0.5), spin_operators(j_e)))


def build_hamiltonian(spec: HamiltonianSpec, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ComplexMatrix:
    """Hamiltonian matrix in the muon-major product basis, in rad/ns.

    H = A J_mu.J_e - g_mu mu_mu (B.J_mu) x I + g_e mu_e I x (B.J_e)
        [+ delta_A (N.J_mu) x (N.J_e) for Mu*]
    """
    d_e = two_j(spec.j_e) + 1
    h = spec.hyperfine * spin_coupling(spec.j_e)
    if spec.family is HamiltonianFamily.HYPERFINE_ONLY:
        return h
    h = h - constants.gamma_mu * kron(spin_along(0.5, spec.B), np.eye(d_e))
    h = h + constants.gamma_e * kron(np.eye(2), spin_along(spec.j_e, spec.B))
    if spec.family is HamiltonianFamily.ANISOTROPIC_MU_STAR:
        axis = spec.anisotropy_axis.vector
        h = h + spec.delta_A * kron(spin_along(0.5, axis), spin_along(spec.j_e, axis))
    return h
