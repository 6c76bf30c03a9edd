import logging
from abc import ABC, abstractmethod
import numpy as np

from musr_tomography.errors import DimensionError, PolarizationRangeError
from musr_tomography.linalg.spin_operators import PAULI

logger = logging.getLogger(__name__)


def polarization_of(rho_mu) -> np.ndarray:
    """P = Tr[rho sigma] of a qubit density matrix, or a stack of them."""
    rho_mu = np.asarray(rho_mu, dtype=np.complex128)
    return np.real(np.stack([np.einsum("...ij,ji->...", rho_mu, s) for s in PAULI], axis=-1))


class PolarizationSource(ABC):
    """Muon polarization as a function of the decay time."""

    @abstractmethod
    def start(self):
        """Prepare the source before events are drawn."""
        pass

    @abstractmethod
    def polarization(self, t: np.ndarray) -> np.ndarray:
        """Polarization vectors at the times t (ns).

        Args:
            t (np.ndarray): Decay times, any shape.

        Returns:
            np.ndarray: Shape t.shape + (3,), each of length at most 1.
        """
        pass

    @abstractmethod
    def stop(self):
        """Release whatever `start` prepared."""
        pass

    def reduced_tomogram(self, t: np.ndarray, axis: np.ndarray) -> np.ndarray:
        """w(+1/2, axis, t) = (1 + P(t) . axis) / 2."""
        return 0.5 * (1 + self.polarization(np.asarray(t, dtype=float)) @ np.asarray(axis, dtype=float))


class StaticPolarization(PolarizationSource):
    def __init__(self, P=(0.0, 0.0, 1.0)):
        P = np.asarray(P, dtype=float)
        if P.shape != (3,):
            raise DimensionError("polarization must be a 3-vector")
        if np.linalg.norm(P) > 1 + 1e-12:
            raise PolarizationRangeError(f"polarization length {np.linalg.norm(P):.6g} exceeds 1")
        self.P = P

    def start(self):
        pass

    def polarization(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self.P, t.shape + (3,)).copy()

    def stop(self):
        pass


class TracePolarization(PolarizationSource):
    """Piecewise-linear interpolation of an evolved polarization trace.

    Beyond the last sample the trace is held constant, so the trace should cover
    every bin that is histogrammed.
    """

    def __init__(self, times, polarizations):
        self.times = np.asarray(times, dtype=float)
        self.polarizations = np.asarray(polarizations, dtype=float)
        if self.polarizations.shape != (len(self.times), 3):
            raise DimensionError("one polarization vector per time is required")
        if np.any(np.diff(self.times) <= 0):
            raise DimensionError("trace times must be strictly increasing")

    @classmethod
    def from_muon_states(cls, times, rho_mu) -> "TracePolarization":
        return cls(times, polarization_of(rho_mu))

    def start(self):
        logger.debug(f"[Polarization Source]: trace with {len(self.times)} samples up to {self.times[-1]:.4g} ns")

    def polarization(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        columns = [np.interp(flat, self.times, self.polarizations[:, i]) for i in range(3)]
        return np.stack(columns, axis=-1).reshape(t.shape + (3,))

    def stop(self):
        pass
