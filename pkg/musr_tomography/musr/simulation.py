import logging
import numpy as np

from musr_tomography.errors import ConfigError
from musr_tomography.musr.decay import DecayModel
from musr_tomography.musr.geometry import DetectorGeometry
from musr_tomography.musr.histogram import HistogramSeries
from musr_tomography.musr.polarization import PolarizationSource

logger = logging.getLogger(__name__)

DEFAULT_BACKGROUND_FRACTION = 0.01
DEFAULT_STREAMS = 4
# below this k the emission law is treated as isotropic
ISOTROPIC_K = 1e-12


def sample_cosines(k: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Inverse CDF of the density (1 + k u) / 2 on u in [-1, 1]."""
    k = np.asarray(k, dtype=float)
    u = 2 * r - 1
    tilted = np.abs(k) > ISOTROPIC_K
    kt = k[tilted]
    u[tilted] = (-1 + np.sqrt(1 - kt * (2 - kt - 4 * r[tilted]))) / kt
    return np.clip(u, -1.0, 1.0)


def sample_emission(P: np.ndarray, a: float, rng: np.random.Generator) -> np.ndarray:
    """Positron directions for polarizations P (shape (N, 3)) under 1 + a (P . n)."""
    norm = np.linalg.norm(P, axis=1)
    axis = np.zeros_like(P)
    axis[:, 2] = 1.0
    polarized = norm > 0
    axis[polarized] = P[polarized] / norm[polarized, None]

    u = sample_cosines(a * norm, rng.random(len(P)))
    phi = rng.uniform(0, 2 * np.pi, len(P))

    reference = np.where(np.abs(axis[:, [0]]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    e1 = np.cross(axis, reference)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(axis, e1)
    s = np.sqrt(1 - u**2)
    return u[:, None] * axis + s[:, None] * (np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2)


def _detect(vectors: np.ndarray, geometry: DetectorGeometry, rng: np.random.Generator) -> np.ndarray:
    """Detector index hit by each direction, -1 when nothing registers it."""
    hit = np.full(len(vectors), -1)
    for index, detector in enumerate(geometry):
        free = hit < 0
        inside = free & detector.contains(vectors)
        accepted = inside & (rng.random(len(vectors)) < detector.efficiency)
        hit[accepted] = index
    return hit


def _simulate_stream(
    source: PolarizationSource,
    geometry: DetectorGeometry,
    model: DecayModel,
    n: int,
    edges: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    times = rng.exponential(model.lifetime_ns, n)
    P = source.polarization(times)
    vectors = sample_emission(P, model.signed_asymmetry, rng)
    hit = _detect(vectors, geometry, rng)
    counts = np.zeros((len(geometry), len(edges) - 1), dtype=np.int64)
    for index in range(len(geometry)):
        counts[index], _ = np.histogram(times[hit == index], bins=edges)
    return counts


def simulate_events(
    source: PolarizationSource,
    geometry: DetectorGeometry,
    model: DecayModel,
    n_muons: int,
    edges,
    seed: int = 0,
    background_fraction: float = DEFAULT_BACKGROUND_FRACTION,
    streams: int = DEFAULT_STREAMS,
) -> HistogramSeries:
    """Monte Carlo decay histograms.

    Each muon decays after an exponential lifetime, emits its positron along a direction
    drawn from 1 + a (P(t) . n) and is counted by the first detector whose cone contains
    it and whose efficiency accepts it. Muons are split into independent streams seeded
    from `seed`, and a flat Poisson background of `background_fraction` times the signal
    is spread evenly over detectors and time.

    Args:
        source (PolarizationSource): Muon polarization P(t).
        geometry (DetectorGeometry): Detector cones.
        model (DecayModel): Asymmetry, lifetime and species.
        n_muons (int): Number of muons launched.
        edges: Time-bin edges in ns.
        seed (int): Master seed; identical seeds give identical histograms.
        background_fraction (float): Background counts relative to the signal total.
        streams (int): Number of independent event streams.

    Returns:
        HistogramSeries: Counts per detector and bin.
    """
    if n_muons < 1:
        raise ConfigError("at least one muon is required")
    if not 0 <= background_fraction < 1:
        raise ConfigError("background fraction must lie in [0, 1)")
    edges = np.asarray(edges, dtype=float)
    seeds = np.random.SeedSequence(seed).spawn(streams + 1)
    chunks = np.array_split(np.arange(n_muons), streams)

    source.start()
    try:
        counts = np.zeros((len(geometry), len(edges) - 1), dtype=np.int64)
        for i, (chunk, stream_seed) in enumerate(zip(chunks, seeds[:streams])):
            counts += _simulate_stream(source, geometry, model, len(chunk), edges, np.random.default_rng(stream_seed))
            logger.debug(f"[Event Generator]: stream {i + 1}/{streams} done")
    finally:
        source.stop()

    if background_fraction > 0:
        rng = np.random.default_rng(seeds[streams])
        share = np.diff(edges) / (edges[-1] - edges[0])
        rate = background_fraction * counts.sum() * share / len(geometry)
        counts += rng.poisson(np.broadcast_to(rate, counts.shape))

    logger.info(f"[Event Generator]: {counts.sum()} counts from {n_muons} muons")
    return HistogramSeries(edges, counts, geometry, n_muons, background_fraction, seed, model)
