import logging
import math
import numpy as np
import pandas as pd
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from musr_tomography.dynamics.propagators import PropagatorSpec, u_hf
from musr_tomography.entanglement.bell import BellContraction
from musr_tomography.errors import ConfigError, DimensionError
from musr_tomography.linalg.matrix_ops import (
    ComplexMatrix,
    DensityMatrix,
    Subsystem,
    as_density_matrix,
    check_unitary,
    partial_trace,
)
from musr_tomography.linalg.spin_operators import two_j
from musr_tomography.spin_tomography.direction import Direction
from musr_tomography.spin_tomography.quadrature import QuadratureGrid
from musr_tomography.spin_tomography.spin_tomogram import dequantizer_stack, quantizer_stack
from musr_tomography.two_spin.two_spin_tomogram import (
    TwoSpinTomogram,
    infer_dims,
    reconstruct_two_spin,
    weighted_values,
)

logger = logging.getLogger(__name__)

POINTS_PER_BEAT = 512
SPIN_UP = np.array([[1, 0], [0, 0]], dtype=np.complex128)


class EvolutionPath(Enum):
    UNITARY = "unitary"  # tomogram of U rho0 U^dagger
    QUANTIZER = "quantizer"  # w0 contracted with conjugated dequantizers


def evolve_density(rho0, U) -> DensityMatrix:
    """U rho0 U^dagger."""
    rho0 = as_density_matrix(rho0)
    U = check_unitary(U)
    if U.shape != rho0.shape:
        raise DimensionError("unitary and state dimensions differ")
    return U @ rho0 @ U.conj().T


def muonium_initial_state(j_e: float = 0.5) -> DensityMatrix:
    """Polarized muon next to an unpolarized electron shell, |up><up| x I / (2 j_e + 1)."""
    d_e = two_j(j_e) + 1
    return np.kron(SPIN_UP, np.eye(d_e) / d_e)


@dataclass(frozen=True)
class TomogramSeries:
    times: np.ndarray
    tomograms: tuple[TwoSpinTomogram, ...]

    def __len__(self) -> int:
        return len(self.times)

    @property
    def values(self) -> np.ndarray:
        return np.array([w.values for w in self.tomograms])

    def to_frame(self) -> pd.DataFrame:
        frames = []
        for t, w in zip(self.times, self.tomograms):
            frame = w.to_frame()
            frame.insert(0, "t_ns", t)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)


def _conjugated_kernel(w0: TwoSpinTomogram, U: ComplexMatrix, grid_mu: QuadratureGrid, grid_e: QuadratureGrid) -> np.ndarray:
    """K[x0, x] = Tr[D(x0) U^dagger Pi(x) U] over source and evaluation points."""
    n = U.shape[0]
    D = np.einsum(
        "ikac,jlbd->ikjlabcd", quantizer_stack(w0.j_mu, w0.grid_mu), quantizer_stack(w0.j_e, w0.grid_e)
    ).reshape(-1, n, n)
    P = np.einsum(
        "ikac,jlbd->ikjlabcd", dequantizer_stack(w0.j_mu, grid_mu), dequantizer_stack(w0.j_e, grid_e)
    ).reshape(-1, n, n)
    P = np.einsum("ba,xbc,cd->xad", U.conj(), P, U, optimize=True)
    return np.real(np.einsum("yab,xba->yx", D, P, optimize=True))


def evolve_tomogram(
    w0: TwoSpinTomogram,
    unitaries: Sequence[ComplexMatrix],
    times: Sequence[float],
    grid_mu: QuadratureGrid | None = None,
    grid_e: QuadratureGrid | None = None,
    method: EvolutionPath = EvolutionPath.UNITARY,
) -> TomogramSeries:
    """Two-spin tomogram at every time of a propagator series.

    Args:
        w0 (TwoSpinTomogram): Initial tomogram on grids exact for reconstruction.
        unitaries (Sequence[ComplexMatrix]): U(t) for each time.
        times (Sequence[float]): Times in ns.
        grid_mu (QuadratureGrid, optional): Muon directions to evaluate at. Defaults to w0's.
        grid_e (QuadratureGrid, optional): Electron directions to evaluate at. Defaults to w0's.
        method (EvolutionPath): UNITARY evaluates the tomogram of U rho0 U^dagger, i.e.
            w0 read at the composed unitary R^dagger U. QUANTIZER contracts w0 with
            quantizers against dequantizers conjugated by U and never forms rho0.

    Returns:
        TomogramSeries: One tomogram per time.
    """
    grid_mu = grid_mu or w0.grid_mu
    grid_e = grid_e or w0.grid_e
    if len(unitaries) != len(times):
        raise DimensionError("one unitary per time is required")

    tomograms = []
    if method is EvolutionPath.UNITARY:
        rho0 = reconstruct_two_spin(w0)
        for U in unitaries:
            tomograms.append(TwoSpinTomogram.from_state(evolve_density(rho0, U), grid_mu, grid_e))
    else:
        weighted = weighted_values(w0).ravel()
        shape = (two_j(w0.j_mu) + 1, len(grid_mu), two_j(w0.j_e) + 1, len(grid_e))
        for U in unitaries:
            kernel = _conjugated_kernel(w0, check_unitary(U), grid_mu, grid_e)
            tomograms.append(TwoSpinTomogram(w0.j_e, grid_mu, grid_e, (weighted @ kernel).reshape(shape)))
    logger.debug(f"[Evolution]: {len(times)} tomograms via the {method.value} path")
    return TomogramSeries(np.asarray(times, dtype=float), tuple(tomograms))


def muon_states(prop: PropagatorSpec, rho0, times: Sequence[float]) -> np.ndarray:
    """Reduced muon density matrices Tr_e[U(t) rho0 U(t)^dagger], shape (T, 2, 2)."""
    rho0 = as_density_matrix(rho0, prop.dim)
    dims = infer_dims(rho0)
    return np.array(
        [partial_trace(evolve_density(rho0, prop.unitary(float(t))), dims, Subsystem.MUON) for t in times]
    )


def default_times(prop: PropagatorSpec, t_max: float, steps: int | None = None) -> np.ndarray:
    """Uniform grid on [0, t_max]; by default 512 points per longest beat period."""
    if t_max <= 0:
        raise ConfigError("time span must be positive")
    if steps is None:
        gaps = prop.eigenfrequency_gaps()
        if len(gaps) == 0:
            steps = POINTS_PER_BEAT
        else:
            period = 2 * np.pi / gaps[0]
            steps = max(2, math.ceil(POINTS_PER_BEAT * t_max / period) + 1)
    return np.linspace(0.0, t_max, steps)


def _check_omega0(omega0: float) -> None:
    if omega0 <= 0:
        raise ConfigError("omega0 must be positive")


def free_mu_state(t: float, omega0: float) -> DensityMatrix:
    _check_omega0(omega0)
    return evolve_density(muonium_initial_state(), u_hf(omega0, t))


def analytic_free_mu(m_mu: float, n_mu: Direction, m_e: float, n_e: Direction, t, omega0: float):
    """Joint tomogram of free muonium started from a polarized muon."""
    _check_omega0(omega0)
    a, b = n_mu.vector, n_e.vector
    cross_z = a[0] * b[1] - a[1] * b[0]
    phase = omega0 * np.asarray(t, dtype=float)
    return 0.25 * (
        1
        + m_mu * a[2]
        + m_e * b[2]
        + (m_mu * a[2] - m_e * b[2]) * np.cos(phase)
        + 2 * m_mu * m_e * cross_z * np.sin(phase)
    )


def analytic_free_mu_reduced(m: float, n: Direction, t, omega0: float):
    """Muon marginal of `analytic_free_mu`, (1 + m n_z (1 + cos w0 t)) / 2."""
    _check_omega0(omega0)
    return 0.5 * (1 + m * n.vector[2] * (1 + np.cos(omega0 * np.asarray(t, dtype=float))))


def free_mu_entanglement(t, omega0: float):
    """E(t) = sin^4(w0 t) / 128."""
    _check_omega0(omega0)
    return np.sin(omega0 * np.asarray(t, dtype=float)) ** 4 / 128


def free_mu_bell_max(t, omega0: float, contraction: BellContraction = BellContraction.ELEMENTWISE):
    """Largest |B| of free muonium: sqrt(2)|sin w0 t| for the trace, |sin w0 t| elementwise."""
    _check_omega0(omega0)
    s = np.abs(np.sin(omega0 * np.asarray(t, dtype=float)))
    return np.sqrt(2) * s if contraction is BellContraction.TRACE else s
