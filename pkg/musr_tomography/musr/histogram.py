import json
import numpy as np
import pandas as pd
from dataclasses import dataclass
from pathlib import Path

from musr_tomography.errors import ConfigError
from musr_tomography.musr.decay import DecayModel, Species
from musr_tomography.musr.geometry import Detector, DetectorGeometry
from musr_tomography.spin_tomography.direction import Direction

HISTOGRAM_COLUMNS = ["detector_id", "axis_theta", "axis_phi", "bin_start_ns", "bin_end_ns", "counts"]


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_suffix(".json")


@dataclass(frozen=True, eq=False)
class HistogramSeries:
    """Positron counts per detector and time bin.

    `counts[d, b]` holds the hits of detector d between `edges[b]` and `edges[b + 1]`.
    """

    edges: np.ndarray
    counts: np.ndarray
    geometry: DetectorGeometry
    n_muons: int
    background_fraction: float = 0.0
    seed: int | None = None
    model: DecayModel = DecayModel()

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts)
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ConfigError("bin edges must be strictly increasing")
        if counts.shape != (len(self.geometry), len(edges) - 1):
            raise ConfigError(f"counts of shape {counts.shape} do not match detectors and bins")
        if np.any(counts < 0) or not np.all(np.equal(np.mod(counts, 1), 0)):
            raise ConfigError("counts must be nonnegative integers")
        if not 0 <= self.background_fraction < 1:
            raise ConfigError("background fraction must lie in [0, 1)")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts.astype(np.int64))

    @property
    def bin_centers(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (d, det.axis.theta, det.axis.phi, self.edges[b], self.edges[b + 1], int(self.counts[d, b]))
            for d, det in enumerate(self.geometry)
            for b in range(len(self.edges) - 1)
        ]
        return pd.DataFrame(rows, columns=HISTOGRAM_COLUMNS)

    def metadata(self) -> dict:
        return {
            "n_muons": int(self.n_muons),
            "seed": self.seed,
            "background_fraction": self.background_fraction,
            "asymmetry": self.model.asymmetry,
            "lifetime_ns": self.model.lifetime_ns,
            "species": self.model.species.value,
            "detectors": [
                {"half_angle": d.half_angle, "efficiency": d.efficiency} for d in self.geometry
            ],
        }

    def to_csv(self, path: str | Path) -> None:
        """Write the counts table and its JSON metadata sidecar next to it."""
        self.to_frame().to_csv(path, index=False, float_format="%.12g")
        sidecar_path(path).write_text(json.dumps(self.metadata(), indent=2))

    @classmethod
    def from_csv(cls, path: str | Path) -> "HistogramSeries":
        try:
            frame = pd.read_csv(path)
            meta = json.loads(sidecar_path(path).read_text())
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read histogram {path}: {e}") from e
        missing = set(HISTOGRAM_COLUMNS) - set(frame.columns)
        if missing:
            raise ConfigError(f"histogram {path} lacks columns {sorted(missing)}")

        frame = frame.sort_values(["detector_id", "bin_start_ns"])
        detector_ids = sorted(frame["detector_id"].unique())
        first = frame[frame["detector_id"] == detector_ids[0]]
        edges = np.append(first["bin_start_ns"].to_numpy(), first["bin_end_ns"].to_numpy()[-1])
        detectors, counts = [], []
        for d in detector_ids:
            rows = frame[frame["detector_id"] == d]
            spec = meta["detectors"][int(d)]
            axis = Direction(rows["axis_theta"].iloc[0], rows["axis_phi"].iloc[0])
            detectors.append(Detector(axis, spec["half_angle"], spec["efficiency"]))
            counts.append(rows["counts"].to_numpy())
        model = DecayModel(meta["asymmetry"], meta["lifetime_ns"], Species(meta.get("species", "mu_plus")))
        return cls(
            edges,
            np.array(counts),
            DetectorGeometry(tuple(detectors)),
            meta["n_muons"],
            meta["background_fraction"],
            meta.get("seed"),
            model,
        )
