import numpy as np
from dataclasses import dataclass
from scipy import constants as codata

# 1 rad/s/T expressed in rad/ns/G
_PER_SECOND_TESLA_TO_PER_NS_GAUSS = 1e-9 * 1e-4

G_MU = 2.0
MU_MU_IN_PROTON_MAGNETONS = 3.18334
G_E = 2.0023193
MUON_LIFETIME_NS = 2197.0


@dataclass(frozen=True)
class PhysicalConstants:
    """Magnetic constants of the muon and the electron.

    Energies are expressed as hbar times an angular frequency in rad/ns, so the
    gyromagnetic frequencies below are in rad/ns per Gauss and hbar is 1.
    """

    g_mu: float = G_MU
    mu_mu: float = MU_MU_IN_PROTON_MAGNETONS * codata.physical_constants["proton mag. mom."][0]
    g_e: float = G_E
    mu_e: float = codata.physical_constants["Bohr magneton"][0]
    hbar: float = codata.hbar

    @property
    def gamma_mu(self) -> float:
        """g_mu mu_mu / hbar in rad/ns/G (about 2 pi x 13.554 kHz/G)."""
        return self.g_mu * self.mu_mu / self.hbar * _PER_SECOND_TESLA_TO_PER_NS_GAUSS

    @property
    def gamma_e(self) -> float:
        """g_e mu_e / hbar in rad/ns/G (about 2 pi x 2.8025 MHz/G)."""
        return self.g_e * self.mu_e / self.hbar * _PER_SECOND_TESLA_TO_PER_NS_GAUSS


DEFAULT_CONSTANTS = PhysicalConstants()


def critical_field_gauss(A: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Field at which the Zeeman splitting difference equals the hyperfine energy.

    Args:
        A (float): Hyperfine constant as an angular frequency in rad/ns.

    Returns:
        float: B_c in Gauss, from B (g_e mu_e - g_mu mu_mu) = A.
    """
    return abs(A) / (constants.gamma_e - constants.gamma_mu)


def mhz_to_rad_per_ns(value_mhz: float, is_angular: bool) -> float:
    """Convert a material frequency quoted in MHz to rad/ns.

    Linear frequencies (is_angular False) are multiplied by 2 pi on ingestion.
    """
    scale = 1e-3 if is_angular else 2 * np.pi * 1e-3
    return value_mhz * scale
