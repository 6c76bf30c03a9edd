import numpy as np
from dataclasses import dataclass
from enum import Enum

from musr_tomography.dynamics.constants import MUON_LIFETIME_NS
from musr_tomography.errors import ConfigError, PolarizationRangeError, ProbabilityRangeError
from musr_tomography.spin_tomography.direction import Direction

# energy-averaged asymmetry of the decay positrons
MEAN_ASYMMETRY = 1 / 3
PROBABILITY_SLACK = 1e-6


class Species(Enum):
    MU_PLUS = "mu_plus"
    MU_MINUS = "mu_minus"


@dataclass(frozen=True)
class DecayModel:
    """Angular asymmetry and lifetime of the decaying muon.

    Asymmetries down to 0 are accepted so that an isotropic emitter can be simulated;
    physical values lie in [1/3, 1].
    """

    asymmetry: float = MEAN_ASYMMETRY
    lifetime_ns: float = MUON_LIFETIME_NS
    species: Species = Species.MU_PLUS

    def __post_init__(self):
        if not 0.0 <= self.asymmetry <= 1.0:
            raise ConfigError(f"asymmetry {self.asymmetry} outside [0, 1]")
        if self.lifetime_ns <= 0:
            raise ConfigError("lifetime must be positive")
        object.__setattr__(self, "species", Species(self.species))

    @property
    def signed_asymmetry(self) -> float:
        """Asymmetry with the sign of the emitting particle; negative for mu-minus."""
        return self.asymmetry if self.species is Species.MU_PLUS else -self.asymmetry


def gamma_distribution(P, n: Direction, a: float = MEAN_ASYMMETRY) -> float:
    """Positron angular distribution 1 + a (P . n), normalized to 1 over dn/4pi.

    Raises:
        PolarizationRangeError: If |P| > 1.
    """
    P = np.asarray(P, dtype=float)
    if np.linalg.norm(P) > 1 + 1e-12:
        raise PolarizationRangeError(f"polarization length {np.linalg.norm(P):.6g} exceeds 1")
    return float(1 + a * (P @ n.vector))


def histogram_to_tomogram(
    gamma_value,
    a: float = MEAN_ASYMMETRY,
    species: Species = Species.MU_PLUS,
    strict: bool = True,
):
    """Spin tomogram (w(+1/2, n), w(-1/2, n)) from the distribution value along n.

    For mu-plus w(+-1/2) = 1/2 +- (Gamma - 1) / (2a); mu-minus exchanges the two. Arrays
    map elementwise. Estimates from counts pass strict=False, since noise may carry them
    outside [0, 1].

    Raises:
        ProbabilityRangeError: If a <= 0, or if strict and a value leaves [0, 1].
    """
    if a <= 0:
        raise ProbabilityRangeError("an isotropic emitter carries no spin information")
    shift = (np.asarray(gamma_value, dtype=float) - 1) / (2 * a)
    w_plus, w_minus = 0.5 + shift, 0.5 - shift
    lowest, highest = np.min(np.minimum(w_plus, w_minus)), np.max(np.maximum(w_plus, w_minus))
    if strict and (lowest < -PROBABILITY_SLACK or highest > 1 + PROBABILITY_SLACK):
        raise ProbabilityRangeError(f"Gamma = {gamma_value} is out of range for a = {a:.6g}")
    if Species(species) is Species.MU_MINUS:
        return w_minus, w_plus
    return w_plus, w_minus


def tomogram_to_gamma(w_plus: float, a: float = MEAN_ASYMMETRY, species: Species = Species.MU_PLUS) -> float:
    """Inverse of `histogram_to_tomogram`."""
    if Species(species) is Species.MU_MINUS:
        w_plus = 1 - w_plus
    return 1 + a * (2 * w_plus - 1)
