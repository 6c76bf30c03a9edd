import logging
import numpy as np
from dataclasses import dataclass
from pydantic import BaseModel

from musr_tomography.errors import PlanError, RankDeficientPlanError
from musr_tomography.reconstruction.design import PARAMETERS, DesignMatrix, state_from_parameters
from musr_tomography.reconstruction.plan import Plan

logger = logging.getLogger(__name__)

CLIP_SIGNIFICANCE = 3.0


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Least-squares estimate of the initial two-qubit state.

    Attributes:
        rho0 (np.ndarray): Estimate projected onto the physical states.
        rho0_unclipped (np.ndarray): Unit-trace Hermitian estimate before projection.
        parameters (np.ndarray): Pauli parameters of rho0_unclipped.
        covariance (np.ndarray): Parameter covariance (G_w^T G_w)^-1.
        residual_norm (float): Weighted residual of the unclipped fit.
        clipped (bool): Whether a negative eigenvalue was removed.
        clipping_significant (bool): Whether the eigenvalue shift exceeds three standard errors.
    """

    plan: Plan
    rho0: np.ndarray
    rho0_unclipped: np.ndarray
    parameters: np.ndarray
    covariance: np.ndarray
    rank: int
    condition_number: float
    residual_norm: float
    clipped: bool
    clipping_significant: bool

    @property
    def standard_error(self) -> float:
        """Frobenius-norm standard error of rho0_unclipped."""
        return float(np.sqrt(np.trace(self.covariance)))

    def to_report(self) -> "ReconstructionReport":
        return ReconstructionReport(
            plan=self.plan.to_dict(),
            rank=self.rank,
            condition_number=self.condition_number,
            rho0_real=np.real(self.rho0).tolist(),
            rho0_imag=np.imag(self.rho0).tolist(),
            residual_norm=self.residual_norm,
            clipped=self.clipped,
            clipping_significant=self.clipping_significant,
        )


class ReconstructionReport(BaseModel):
    plan: dict
    rank: int
    condition_number: float
    rho0_real: list[list[float]]
    rho0_imag: list[list[float]]
    residual_norm: float
    clipped: bool
    clipping_significant: bool


def clip_to_states(rho: np.ndarray) -> tuple[np.ndarray, float]:
    """Nearest-spectrum physical state: negative eigenvalues set to 0, trace restored.

    Returns:
        tuple[np.ndarray, float]: The projected state and the largest eigenvalue shift.
    """
    eigenvalues, vectors = np.linalg.eigh((rho + rho.conj().T) / 2)
    if eigenvalues.min() >= 0:
        return rho, 0.0
    clipped = np.clip(eigenvalues, 0.0, None)
    clipped = clipped / clipped.sum()
    shift = float(np.max(np.abs(clipped - eigenvalues)))
    return (vectors * clipped) @ vectors.conj().T, shift


def reconstruct_initial(values, plan: Plan, sigmas=None) -> ReconstructionResult:
    """Recover rho0 from reduced muon tomograms w(+1/2, n, t) at every plan point.

    Args:
        values: One measured w(+1/2) per plan point in plan order.
        plan (Plan): Where and when the values were taken, one or several fields.
        sigmas (optional): Standard errors of the values; unit weights when omitted.

    Raises:
        PlanError: If the number of values does not match the plan.
        RankDeficientPlanError: If the plan identifies fewer than fifteen parameters.
    """
    values = np.asarray(values, dtype=float).ravel()
    if len(values) != len(plan):
        raise PlanError(f"plan has {len(plan)} points but {len(values)} values were given")
    sigmas = np.ones_like(values) if sigmas is None else np.asarray(sigmas, dtype=float).ravel()
    if sigmas.shape != values.shape or np.any(sigmas <= 0):
        raise PlanError("one positive standard error per value is required")

    design = DesignMatrix.assemble(plan)
    rank = design.rank
    if rank < PARAMETERS:
        raise RankDeficientPlanError(rank, design.describe_null_space())

    weights = 1.0 / sigmas
    Gw = design.matrix * weights[:, None]
    yw = (values - design.offset) * weights
    x, *_ = np.linalg.lstsq(Gw, yw, rcond=None)
    covariance = np.linalg.inv(Gw.T @ Gw)
    residual = float(np.linalg.norm(Gw @ x - yw))

    unclipped = state_from_parameters(x)
    rho0, shift = clip_to_states(unclipped)
    sigma_eq = np.sqrt(np.trace(covariance))
    significant = shift > CLIP_SIGNIFICANCE * sigma_eq
    if significant:
        logger.warning(f"[Reconstruction]: eigenvalue clip of {shift:.3g} exceeds {CLIP_SIGNIFICANCE} standard errors")
    logger.info(f"[Reconstruction]: rank {rank}, condition {design.condition_number:.3g}, residual {residual:.3g}")
    return ReconstructionResult(
        plan=plan,
        rho0=rho0,
        rho0_unclipped=unclipped,
        parameters=x,
        covariance=covariance,
        rank=rank,
        condition_number=design.condition_number,
        residual_norm=residual,
        clipped=shift > 0,
        clipping_significant=bool(significant),
    )
