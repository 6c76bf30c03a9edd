import logging
import numpy as np
from dataclasses import dataclass, field
from enum import Enum

from musr_tomography.dynamics.constants import DEFAULT_CONSTANTS, PhysicalConstants
from musr_tomography.dynamics.hamiltonian import HamiltonianFamily, HamiltonianSpec, build_hamiltonian
from musr_tomography.errors import UntabulatedOrientationError
from musr_tomography.linalg.matrix_ops import ComplexMatrix, propagator

logger = logging.getLogger(__name__)

AXIS_TOL = 1e-12
AXES = {"x": np.array([1.0, 0.0, 0.0]), "y": np.array([0.0, 1.0, 0.0]), "z": np.array([0.0, 0.0, 1.0])}

# entry-wise factors taking U_Mu,x to U_Mu,y (conjugation by diag(-i, 1, 1, i))
Y_PATTERN = np.array(
    [
        [1, -1j, -1j, -1],
        [1j, 1, 1, -1j],
        [1j, 1, 1, -1j],
        [-1, 1j, 1j, 1],
    ]
)


class ClosedFormVariant(Enum):
    HF = "hf"
    MU_Z = "Mu z"
    MU_X = "Mu x"
    MU_Y = "Mu y"
    MU_STAR_ZZ = "Mu* zz"
    MU_STAR_XZ = "Mu* xz"
    MU_STAR_YZ = "Mu* yz"
    MU_LIKE_HF = "hf Mu-like"


class PropagatorMethod(Enum):
    CLOSED_FORM = "closed-form"
    NUMERIC = "numeric"


def _field_axis(B: np.ndarray) -> tuple[str | None, float]:
    """Name of the Cartesian axis B lies along and the signed magnitude, or (None, |B|)."""
    norm = float(np.linalg.norm(B))
    if norm == 0:
        return "z", 0.0
    for name, axis in AXES.items():
        along = float(B @ axis)
        if np.linalg.norm(B - along * axis) <= AXIS_TOL * max(norm, 1.0):
            return name, along
    return None, norm


def _anisotropy_axis(spec: HamiltonianSpec) -> str | None:
    v = spec.anisotropy_axis.vector
    for name, axis in AXES.items():
        if abs(abs(v @ axis) - 1.0) <= AXIS_TOL:
            return name
    return None


def detect_variant(spec: HamiltonianSpec) -> ClosedFormVariant:
    """Tabulated closed form matching the Hamiltonian's orientation.

    Raises:
        UntabulatedOrientationError: If no closed form covers the field and axis.
    """
    axis, _ = _field_axis(spec.B)
    zero_field = not np.any(spec.B)
    isotropic = spec.family is not HamiltonianFamily.ANISOTROPIC_MU_STAR or spec.delta_A == 0
    if spec.j_e == 1.0 and zero_field and isotropic:
        return ClosedFormVariant.MU_LIKE_HF
    if spec.j_e != 0.5:
        raise UntabulatedOrientationError(f"no closed form for electron spin {spec.j_e} in this field")
    if spec.family is HamiltonianFamily.HYPERFINE_ONLY:
        return ClosedFormVariant.HF
    if spec.family is HamiltonianFamily.ISOTROPIC_MU or spec.delta_A == 0:
        if axis is None:
            raise UntabulatedOrientationError("field is not along a Cartesian axis")
        return {"x": ClosedFormVariant.MU_X, "y": ClosedFormVariant.MU_Y, "z": ClosedFormVariant.MU_Z}[axis]
    aniso = _anisotropy_axis(spec)
    if axis != "z" or aniso is None:
        raise UntabulatedOrientationError("Mu* closed forms need B along z and the anisotropy axis along x, y or z")
    return {
        "x": ClosedFormVariant.MU_STAR_XZ,
        "y": ClosedFormVariant.MU_STAR_YZ,
        "z": ClosedFormVariant.MU_STAR_ZZ,
    }[aniso]


@dataclass(frozen=True)
class PropagatorScalars:
    """Abbreviations a, b+, b-, c, d, f, h of the closed forms, in rad/ns."""

    a: float
    b_plus: float
    b_minus: float
    c: float
    d: float
    f: float
    h: float

    @classmethod
    def from_spec(cls, spec: HamiltonianSpec, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> "PropagatorScalars":
        _, B = _field_axis(spec.B)
        A, dA = spec.hyperfine, spec.delta_A
        g_sum = constants.gamma_mu + constants.gamma_e
        g_diff = constants.gamma_mu - constants.gamma_e
        return cls(
            a=A / 4,
            b_plus=B * g_sum / 2,
            b_minus=B * g_diff / 2,
            c=np.sqrt(A**2 + B**2 * g_sum**2) / 2,
            d=dA / 4,
            f=np.sqrt(dA**2 + 4 * B**2 * g_diff**2) / 4,
            h=np.sqrt((A + dA / 2) ** 2 + B**2 * g_sum**2) / 2,
        )


def _sin_over(x: float, t: float) -> float:
    """sin(x t) / x, continuous at x = 0."""
    return t * np.sinc(x * t / np.pi)


def u_hf(omega0: float, t: float) -> ComplexMatrix:
    e = np.exp(1j * omega0 * t)
    U = np.array(
        [
            [2, 0, 0, 0],
            [0, 1 + e, 1 - e, 0],
            [0, 1 - e, 1 + e, 0],
            [0, 0, 0, 2],
        ],
        dtype=np.complex128,
    )
    return 0.5 * np.exp(-1j * omega0 * t / 4) * U


def u_mu_z(s: PropagatorScalars, t: float, shift: float = 0.0) -> ComplexMatrix:
    """Longitudinal field; `shift` adds d to a in the phases for Mu* zz."""
    a, c, bp, bm = s.a, s.c, s.b_plus, s.b_minus
    ap = a + shift
    cos, sin_c = np.cos(c * t), _sin_over(c, t)
    U = np.zeros((4, 4), dtype=np.complex128)
    U[0, 0] = np.exp(-1j * (2 * ap - bm) * t)
    U[1, 1] = cos + 1j * bp * sin_c
    U[1, 2] = U[2, 1] = -1j * 2 * a * sin_c
    U[2, 2] = cos - 1j * bp * sin_c
    U[3, 3] = np.exp(-1j * (2 * ap + bm) * t)
    return np.exp(1j * ap * t) * U


def u_mu_x(s: PropagatorScalars, t: float) -> ComplexMatrix:
    a, c, bp, bm = s.a, s.c, s.b_plus, s.b_minus
    slow, fast = np.exp(-1j * a * t), np.exp(1j * a * t)
    sin_c = _sin_over(c, t)
    minus = fast * (np.cos(c * t) - 1j * 2 * a * sin_c)
    plus = fast * (np.cos(c * t) + 1j * 2 * a * sin_c)
    cos_b, sin_b = slow * np.cos(bm * t), slow * np.sin(bm * t)
    U = np.empty((4, 4), dtype=np.complex128)
    U[0, 0] = U[3, 3] = (cos_b + minus) / 2
    U[1, 1] = U[2, 2] = (cos_b + plus) / 2
    U[0, 1] = U[1, 0] = U[2, 3] = U[3, 2] = 0.5j * (sin_b - bp * fast * sin_c)
    U[0, 2] = U[2, 0] = U[1, 3] = U[3, 1] = 0.5j * (sin_b + bp * fast * sin_c)
    U[0, 3] = U[3, 0] = (cos_b - minus) / 2
    U[1, 2] = U[2, 1] = (cos_b - plus) / 2
    return U


def u_mu_y(s: PropagatorScalars, t: float) -> ComplexMatrix:
    return Y_PATTERN * u_mu_x(s, t)


def u_mu_star_xz(s: PropagatorScalars, t: float, axis_sign: float = 1.0) -> ComplexMatrix:
    """N along x (axis_sign 1) or y (axis_sign -1), B along z."""
    a, d, f, h, bp, bm = s.a, s.d, s.f, s.h, s.b_plus, s.b_minus
    slow, fast = np.exp(-1j * a * t), np.exp(1j * a * t)
    sin_f, sin_h = _sin_over(f, t), _sin_over(h, t)
    U = np.zeros((4, 4), dtype=np.complex128)
    U[0, 0] = slow * (np.cos(f * t) + 1j * bm * sin_f)
    U[3, 3] = slow * (np.cos(f * t) - 1j * bm * sin_f)
    U[0, 3] = U[3, 0] = -1j * axis_sign * slow * d * sin_f
    U[1, 1] = fast * (np.cos(h * t) + 1j * bp * sin_h)
    U[2, 2] = fast * (np.cos(h * t) - 1j * bp * sin_h)
    U[1, 2] = U[2, 1] = -1j * fast * (2 * a + d) * sin_h
    return U


def u_mu_like_hf(A: float, t: float) -> ComplexMatrix:
    """Hyperfine propagator of a muon coupled to an electron shell of spin 1."""
    phase = np.exp(1j * A * t / 4)
    angle = 3 * A * t / 4
    v1 = np.exp(-1j * A * t / 2)
    v2 = -1j * phase * (2 * np.sqrt(2) / 3) * np.sin(angle)
    v_plus = phase * (np.cos(angle) + 1j / 3 * np.sin(angle))
    v_minus = phase * (np.cos(angle) - 1j / 3 * np.sin(angle))
    U = np.zeros((6, 6), dtype=np.complex128)
    U[0, 0] = U[5, 5] = v1
    U[1, 1] = U[4, 4] = v_minus
    U[2, 2] = U[3, 3] = v_plus
    U[1, 3] = U[3, 1] = U[2, 4] = U[4, 2] = v2
    return U


@dataclass(frozen=True)
class PropagatorSpec:
    """A Hamiltonian together with the way its propagator is evaluated.

    Args:
        hamiltonian (HamiltonianSpec): The static Hamiltonian.
        method (PropagatorMethod): Closed form or numeric exponential.
        variant (ClosedFormVariant | None): Required for the closed form.
        constants (PhysicalConstants): Gyromagnetic constants.
    """

    hamiltonian: HamiltonianSpec
    method: PropagatorMethod = PropagatorMethod.NUMERIC
    variant: ClosedFormVariant | None = None
    constants: PhysicalConstants = DEFAULT_CONSTANTS
    scalars: PropagatorScalars = field(init=False, repr=False, compare=False)
    matrix: ComplexMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.method is PropagatorMethod.CLOSED_FORM:
            detected = detect_variant(self.hamiltonian)
            if self.variant is None:
                object.__setattr__(self, "variant", detected)
            elif self.variant is not detected:
                raise UntabulatedOrientationError(
                    f"variant {self.variant.value} does not match the orientation ({detected.value})"
                )
        object.__setattr__(self, "scalars", PropagatorScalars.from_spec(self.hamiltonian, self.constants))
        object.__setattr__(self, "matrix", build_hamiltonian(self.hamiltonian, self.constants))

    @classmethod
    def resolve(
        cls,
        hamiltonian: HamiltonianSpec,
        constants: PhysicalConstants = DEFAULT_CONSTANTS,
        prefer_closed_form: bool = True,
    ) -> "PropagatorSpec":
        """Closed form where one is tabulated, numeric exponential otherwise."""
        if prefer_closed_form:
            try:
                return cls(hamiltonian, PropagatorMethod.CLOSED_FORM, constants=constants)
            except UntabulatedOrientationError as e:
                logger.info(f"[Propagator]: falling back to the numeric exponential: {e}")
        return cls(hamiltonian, PropagatorMethod.NUMERIC, constants=constants)

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    def unitary(self, t: float) -> ComplexMatrix:
        if self.method is PropagatorMethod.NUMERIC:
            return propagator(self.matrix, t)
        return propagator_closed_form(self, t)

    def unitaries(self, times) -> np.ndarray:
        return np.array([self.unitary(float(t)) for t in times])

    def eigenfrequency_gaps(self) -> np.ndarray:
        """Distinct positive differences of the Hamiltonian's eigenvalues, ascending."""
        energies = np.linalg.eigvalsh(self.matrix)
        gaps = np.abs(energies[:, None] - energies[None, :])[np.triu_indices(len(energies), 1)]
        gaps = np.sort(gaps[gaps > 1e-9 * max(np.max(np.abs(energies)), 1.0)])
        if len(gaps) == 0:
            return gaps
        keep = np.concatenate([[True], np.diff(gaps) > 1e-9 * gaps[-1]])
        return gaps[keep]


def propagator_closed_form(spec: PropagatorSpec, t: float) -> ComplexMatrix:
    """Tabulated closed-form propagator of `spec` at time t (ns)."""
    if spec.variant is None:
        raise UntabulatedOrientationError("propagator spec carries no closed-form variant")
    s = spec.scalars
    variant = spec.variant
    if variant is ClosedFormVariant.HF:
        return u_hf(spec.hamiltonian.hyperfine, t)
    if variant is ClosedFormVariant.MU_Z:
        return u_mu_z(s, t)
    if variant is ClosedFormVariant.MU_X:
        return u_mu_x(s, t)
    if variant is ClosedFormVariant.MU_Y:
        return u_mu_y(s, t)
    if variant is ClosedFormVariant.MU_STAR_ZZ:
        return u_mu_z(s, t, shift=s.d)
    if variant is ClosedFormVariant.MU_STAR_XZ:
        return u_mu_star_xz(s, t)
    if variant is ClosedFormVariant.MU_STAR_YZ:
        return u_mu_star_xz(s, t, axis_sign=-1.0)
    return u_mu_like_hf(spec.hamiltonian.hyperfine, t)


def propagator_numeric(
    spec: HamiltonianSpec,
    t: float,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> ComplexMatrix:
    """exp(-i H t) for any static Hamiltonian of the three families."""
    return propagator(build_hamiltonian(spec, constants), t)
