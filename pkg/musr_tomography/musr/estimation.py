import logging
import numpy as np
import pandas as pd

from musr_tomography.errors import ConfigError, InsufficientCountsError
from musr_tomography.musr.decay import DecayModel, histogram_to_tomogram
from musr_tomography.musr.geometry import DetectorGeometry
from musr_tomography.musr.histogram import HistogramSeries
from musr_tomography.musr.polarization import PolarizationSource

logger = logging.getLogger(__name__)

DEFAULT_COUNT_FLOOR = 100
ESTIMATE_COLUMNS = [
    "axis_theta", "axis_phi", "bin_start_ns", "bin_end_ns",
    "w_plus", "sigma", "counts", "low_confidence",
]


def decay_integrals(edges: np.ndarray, lifetime_ns: float) -> np.ndarray:
    """Integral of exp(-t / tau) over each bin."""
    return lifetime_ns * (np.exp(-edges[:-1] / lifetime_ns) - np.exp(-edges[1:] / lifetime_ns))


def fit_flat_background(pair_sum: np.ndarray, edges: np.ndarray, lifetime_ns: float) -> float:
    """Flat background rate per ns in a summed pair histogram.

    Fits pair_sum = alpha * E_bin + beta * width_bin by weighted least squares with
    Poisson weights and returns beta, clipped at zero.
    """
    design = np.column_stack([decay_integrals(edges, lifetime_ns), np.diff(edges)])
    weights = 1 / np.sqrt(np.maximum(pair_sum, 1.0))
    (alpha, beta), *_ = np.linalg.lstsq(design * weights[:, None], pair_sum * weights, rcond=None)
    return max(float(beta), 0.0)


def estimate_tomogram(
    hist: HistogramSeries,
    geometry: DetectorGeometry | None = None,
    model: DecayModel | None = None,
    count_floor: int = DEFAULT_COUNT_FLOOR,
) -> pd.DataFrame:
    """Estimated w(+1/2, n, t) with binomial errors for each opposite detector pair.

    The asymmetry (F - B) / (F + B) of background-subtracted, efficiency-corrected counts
    equals a c P . n, c being the cone's mean cosine, so 1 + A is Gamma for the effective
    asymmetry a c and histogram_to_tomogram turns it into w. Bins with fewer than
    `count_floor` pair counts are flagged low-confidence.

    Raises:
        InsufficientCountsError: If every bin of every pair is below the floor.
    """
    geometry = geometry or hist.geometry
    model = model or hist.model
    pairs = geometry.opposite_pairs()
    if not pairs:
        raise ConfigError("the geometry has no opposite detector pairs")
    if model.asymmetry <= 0:
        raise ConfigError("an isotropic emitter carries no spin information")

    frames = []
    for forward, backward in pairs:
        det_f, det_b = geometry.detectors[forward], geometry.detectors[backward]
        F = hist.counts[forward].astype(float)
        B = hist.counts[backward].astype(float)
        rate = fit_flat_background(F + B, hist.edges, model.lifetime_ns) if hist.background_fraction > 0 else 0.0
        per_detector = rate * hist.widths / 2
        Fc = (F - per_detector) / det_f.efficiency
        Bc = (B - per_detector) / det_b.efficiency
        total = Fc + Bc
        with np.errstate(divide="ignore", invalid="ignore"):
            A = (Fc - Bc) / total
            var_F, var_B = F / det_f.efficiency**2, B / det_b.efficiency**2
            sigma_A = np.sqrt(4 * (Bc**2 * var_F + Fc**2 * var_B)) / total**2
        scale = model.asymmetry * det_f.mean_cosine
        w_plus, _ = histogram_to_tomogram(1 + A, scale, model.species, strict=False)
        sigma = sigma_A / (2 * scale)
        counts = (F + B).astype(np.int64)
        frames.append(
            pd.DataFrame(
                {
                    "axis_theta": det_f.axis.theta,
                    "axis_phi": det_f.axis.phi,
                    "bin_start_ns": hist.edges[:-1],
                    "bin_end_ns": hist.edges[1:],
                    "w_plus": w_plus,
                    "sigma": sigma,
                    "counts": counts,
                    "low_confidence": counts < count_floor,
                }
            )
        )
    estimate = pd.concat(frames, ignore_index=True)[ESTIMATE_COLUMNS]
    if estimate["low_confidence"].all():
        raise InsufficientCountsError(f"no bin reaches {count_floor} counts")
    logger.info(
        f"[Estimator]: {len(pairs)} axes, {int((~estimate['low_confidence']).sum())} confident bins"
    )
    return estimate


def expected_reduced_tomogram(
    source: PolarizationSource,
    edges,
    axis,
    lifetime_ns: float,
    samples_per_bin: int = 64,
) -> np.ndarray:
    """Bin average of w(+1/2, axis, t) weighted by the decay law, the truth a histogram estimates."""
    edges = np.asarray(edges, dtype=float)
    expected = np.empty(len(edges) - 1)
    x, wx = np.polynomial.legendre.leggauss(samples_per_bin)
    source.start()
    try:
        for b, (t0, t1) in enumerate(zip(edges[:-1], edges[1:])):
            t = t0 + (x + 1) * (t1 - t0) / 2
            weight = wx * np.exp(-t / lifetime_ns)
            expected[b] = np.sum(weight * source.reduced_tomogram(t, axis)) / np.sum(weight)
    finally:
        source.stop()
    return expected
