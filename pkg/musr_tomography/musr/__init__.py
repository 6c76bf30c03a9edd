from musr_tomography.musr.decay import (
    MEAN_ASYMMETRY,
    DecayModel,
    Species,
    gamma_distribution,
    histogram_to_tomogram,
    tomogram_to_gamma,
)
from musr_tomography.musr.estimation import (
    DEFAULT_COUNT_FLOOR,
    estimate_tomogram,
    expected_reduced_tomogram,
    fit_flat_background,
)
from musr_tomography.musr.geometry import Detector, DetectorGeometry
from musr_tomography.musr.histogram import HistogramSeries
from musr_tomography.musr.polarization import (
    PolarizationSource,
    StaticPolarization,
    TracePolarization,
    polarization_of,
)
from musr_tomography.musr.simulation import DEFAULT_BACKGROUND_FRACTION, sample_emission, simulate_events
