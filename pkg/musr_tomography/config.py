"""Validated configuration: material presets, run settings, detector geometries and plans.

Presets ship as TOML files in `dynamics/presets/`. Directories listed in the
`MUSR_TOMO_PRESET_PATH` environment variable are searched as well, and a user preset
shadows a shipped one of the same name.
"""

import json
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import numpy as np
import pandas as pd
from pathlib import Path
from pydantic import BaseModel, Field, ValidationError, field_validator

from musr_tomography.dynamics.constants import mhz_to_rad_per_ns
from musr_tomography.dynamics.evolution import muonium_initial_state
from musr_tomography.dynamics.hamiltonian import HamiltonianFamily, HamiltonianSpec
from musr_tomography.dynamics.propagators import PropagatorSpec
from musr_tomography.errors import ConfigError
from musr_tomography.linalg.matrix_ops import as_density_matrix
from musr_tomography.musr.geometry import Detector, DetectorGeometry
from musr_tomography.reconstruction.plan import CompositePlan, MeasurementPlan, Plan
from musr_tomography.spin_tomography.direction import Direction

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).parent / "dynamics" / "presets"
PRESET_PATH_ENV = "MUSR_TOMO_PRESET_PATH"
PRESET_SUFFIXES = (".toml", ".json")
DEFAULT_HALF_ANGLE = np.pi / 4
DEFAULT_N_MUONS = 1_000_000
INIT_DEFAULT = "default"

AXIS_VECTORS = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
    "-x": (-1.0, 0.0, 0.0),
    "-y": (0.0, -1.0, 0.0),
    "-z": (0.0, 0.0, -1.0),
}


def parse_axis(text: str) -> Direction:
    """Direction from "x", "-z" and the like, or from "theta,phi" in radians."""
    key = str(text).strip().lower()
    if key in AXIS_VECTORS:
        return Direction.from_vector(AXIS_VECTORS[key])
    try:
        theta, phi = (float(part) for part in key.split(","))
        return Direction(theta, phi)
    except ValueError as e:
        raise ConfigError(f"cannot parse axis {text!r}; use x, y, z, -x, -y, -z or 'theta,phi'") from e


def _check_axis(value: str | None) -> str | None:
    if value is not None:
        try:
            parse_axis(value)
        except ConfigError as e:
            raise ValueError(str(e)) from e
    return value


class MaterialPreset(BaseModel):
    """Hamiltonian parameters of one material as quoted in the literature (MHz)."""

    name: str
    family: HamiltonianFamily
    A_MHz: float = Field(gt=0.0)
    A_is_angular: bool = False
    deltaA_MHz: float = 0.0
    deltaA_is_angular: bool = False
    j_e: float = 0.5
    default_fields_gauss: list[float] = Field(default_factory=lambda: [0.0], min_length=1)
    default_field_axis: str = "z"
    default_aniso_axis: str | None = None
    default_t_max_ns: float = Field(default=10.0, gt=0.0)
    notes: str = ""

    @field_validator("default_field_axis", "default_aniso_axis")
    @classmethod
    def check_axes(cls, value):
        return _check_axis(value)

    @property
    def A(self) -> float:
        return mhz_to_rad_per_ns(self.A_MHz, self.A_is_angular)

    @property
    def delta_A(self) -> float:
        return mhz_to_rad_per_ns(self.deltaA_MHz, self.deltaA_is_angular)

    def hamiltonian(self, B_gauss: float = 0.0, field_axis: str | None = None, aniso_axis: str | None = None) -> HamiltonianSpec:
        """HamiltonianSpec of this material in a static field of B_gauss along field_axis."""
        axis = parse_axis(field_axis or self.default_field_axis)
        B = tuple(float(B_gauss) * axis.vector)
        if self.family is HamiltonianFamily.HYPERFINE_ONLY:
            if B_gauss != 0:
                raise ConfigError(f"preset {self.name} describes field-free muonium")
            return HamiltonianSpec(self.family, omega0=self.A, j_e=self.j_e)
        if self.family is HamiltonianFamily.ISOTROPIC_MU:
            return HamiltonianSpec(self.family, A=self.A, B_field=B, j_e=self.j_e)
        aniso = aniso_axis or self.default_aniso_axis
        if aniso is None:
            raise ConfigError(f"preset {self.name} needs an anisotropy axis")
        return HamiltonianSpec(
            self.family,
            A=self.A,
            delta_A=self.delta_A,
            B_field=B,
            anisotropy_axis=parse_axis(aniso),
            j_e=self.j_e,
        )


def load_preset_file(path: str | Path) -> MaterialPreset:
    path = Path(path)
    try:
        if path.suffix == ".toml":
            with path.open("rb") as f:
                data = tomllib.load(f)
        else:
            data = json.loads(path.read_text())
        return MaterialPreset.model_validate(data)
    except (OSError, ValueError, tomllib.TOMLDecodeError, ValidationError) as e:
        raise ConfigError(f"cannot load preset {path}: {e}") from e


def preset_dirs() -> list[Path]:
    """Shipped preset directory followed by the user directories from the environment."""
    extra = os.environ.get(PRESET_PATH_ENV, "")
    return [PRESET_DIR] + [Path(p) for p in extra.split(os.pathsep) if p]


def load_presets() -> dict[str, MaterialPreset]:
    """Every preset found on the search path, keyed by name; later directories win."""
    catalog = {}
    for directory in preset_dirs():
        if not directory.is_dir():
            logger.warning(f"[Config]: preset directory {directory} does not exist")
            continue
        for path in sorted(directory.iterdir()):
            if path.suffix in PRESET_SUFFIXES:
                preset = load_preset_file(path)
                if preset.name in catalog:
                    logger.info(f"[Config]: {path} shadows preset {preset.name}")
                catalog[preset.name] = preset
    return catalog


def resolve_preset(material: str, catalog: dict[str, MaterialPreset] | None = None) -> MaterialPreset:
    """Preset by name, or loaded from a .toml/.json file path."""
    path = Path(material)
    if path.suffix in PRESET_SUFFIXES and path.is_file():
        return load_preset_file(path)
    catalog = load_presets() if catalog is None else catalog
    if material not in catalog:
        raise ConfigError(f"unknown material {material!r}; known: {sorted(catalog)}")
    return catalog[material]


def load_matrix(path: str | Path) -> np.ndarray:
    """Density matrix from a JSON file with "real" and "imag" (or "rho0_real"/"rho0_imag") lists."""
    try:
        data = json.loads(Path(path).read_text())
        real = np.asarray(data.get("real", data.get("rho0_real")), dtype=float)
        imag = data.get("imag", data.get("rho0_imag"))
        imag = np.zeros_like(real) if imag is None else np.asarray(imag, dtype=float)
        return as_density_matrix(real + 1j * imag)
    except (OSError, ValueError, TypeError) as e:
        raise ConfigError(f"cannot read density matrix {path}: {e}") from e


class RunConfig(BaseModel):
    """Settings shared by the evolve, report, bell and simulate verbs."""

    material: str
    fields_gauss: list[float] | None = None
    field_axis: str | None = None
    aniso_axis: str | None = None
    t_max_ns: float | None = Field(default=None, gt=0.0)
    steps: int | None = Field(default=None, ge=2)
    init: str = INIT_DEFAULT
    out: Path = Path("out")
    seed: int = 0

    @field_validator("field_axis", "aniso_axis")
    @classmethod
    def check_axes(cls, value):
        return _check_axis(value)

    def preset(self, catalog: dict[str, MaterialPreset] | None = None) -> MaterialPreset:
        return resolve_preset(self.material, catalog)

    def sweep(self, catalog: dict[str, MaterialPreset] | None = None) -> list[tuple[float, HamiltonianSpec]]:
        """(B in Gauss, Hamiltonian) for every field of the sweep."""
        preset = self.preset(catalog)
        fields = self.fields_gauss if self.fields_gauss else preset.default_fields_gauss
        return [(B, preset.hamiltonian(B, self.field_axis, self.aniso_axis)) for B in fields]

    def time_span(self, catalog: dict[str, MaterialPreset] | None = None) -> float:
        return self.t_max_ns if self.t_max_ns is not None else self.preset(catalog).default_t_max_ns

    def initial_state(self, dim: int) -> np.ndarray:
        if self.init == INIT_DEFAULT:
            return muonium_initial_state((dim // 2 - 1) / 2)
        rho = load_matrix(self.init)
        if rho.shape != (dim, dim):
            raise ConfigError(f"initial state of shape {rho.shape} does not fit dimension {dim}")
        return rho


class DetectorSpec(BaseModel):
    theta: float = Field(ge=0.0, le=np.pi)
    phi: float = 0.0
    half_angle: float = Field(default=DEFAULT_HALF_ANGLE, gt=0.0, le=np.pi)
    efficiency: float = Field(default=1.0, gt=0.0, le=1.0)

    def to_detector(self) -> Detector:
        return Detector(Direction(self.theta, self.phi), self.half_angle, self.efficiency)


class GeometryConfig(BaseModel):
    detectors: list[DetectorSpec] = Field(min_length=1)

    def to_geometry(self) -> DetectorGeometry:
        return DetectorGeometry(tuple(d.to_detector() for d in self.detectors))


def parse_geometry(text: str | None) -> DetectorGeometry:
    """`cartesian[:half_angle_deg]` or a JSON file holding a GeometryConfig."""
    text = text or "cartesian"
    if text.startswith("cartesian"):
        _, _, degrees = text.partition(":")
        try:
            half_angle = np.radians(float(degrees)) if degrees else DEFAULT_HALF_ANGLE
        except ValueError as e:
            raise ConfigError(f"cannot parse detector half-angle {degrees!r}") from e
        return DetectorGeometry.cartesian(half_angle)
    try:
        return GeometryConfig.model_validate_json(Path(text).read_text()).to_geometry()
    except (OSError, ValidationError) as e:
        raise ConfigError(f"cannot load detector geometry {text}: {e}") from e


class PlanField(BaseModel):
    B_gauss: float
    field_axis: str | None = None

    @field_validator("field_axis")
    @classmethod
    def check_axis(cls, value):
        return _check_axis(value)


class PlanConfig(BaseModel):
    """A measurement plan together with the Hamiltonian it is taken under.

    When `fields` is given, the same directions are measured under each field in turn and
    `B_gauss`/`field_axis` are ignored.
    """

    material: str
    B_gauss: float = 0.0
    field_axis: str | None = None
    aniso_axis: str | None = None
    directions: list[str] | None = None
    times_ns: list[float] | None = None
    closed_form: bool = True
    fields: list[PlanField] | None = Field(default=None, min_length=1)

    @field_validator("field_axis", "aniso_axis")
    @classmethod
    def check_axes(cls, value):
        return _check_axis(value)

    @field_validator("directions")
    @classmethod
    def check_directions(cls, value):
        for axis in value or []:
            _check_axis(axis)
        return value

    @classmethod
    def from_file(cls, path: str | Path) -> "PlanConfig":
        try:
            return cls.model_validate_json(Path(path).read_text())
        except (OSError, ValidationError) as e:
            raise ConfigError(f"cannot load plan {path}: {e}") from e

    def to_plan(self, catalog: dict[str, MaterialPreset] | None = None) -> Plan:
        preset = resolve_preset(self.material, catalog)
        directions = None if self.directions is None else [parse_axis(a) for a in self.directions]

        def single(B_gauss, field_axis):
            h = preset.hamiltonian(B_gauss, field_axis, self.aniso_axis)
            prop = PropagatorSpec.resolve(h, prefer_closed_form=self.closed_form)
            return MeasurementPlan.with_defaults(prop, directions, self.times_ns)

        if self.fields is None:
            return single(self.B_gauss, self.field_axis)
        return CompositePlan(tuple(single(f.B_gauss, f.field_axis) for f in self.fields))


MEASUREMENT_COLUMNS = ("axis_theta", "axis_phi", "t_ns", "w_plus")


def load_measurements(path: str | Path, plan: Plan, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray | None]:
    """Measured w(+1/2) and optional sigma, one row per plan point in plan order."""
    try:
        frame = pd.read_csv(path, comment="#")
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read measurements {path}: {e}") from e
    missing = set(MEASUREMENT_COLUMNS) - set(frame.columns)
    if missing:
        raise ConfigError(f"measurements {path} lack columns {sorted(missing)}")
    if len(frame) == len(plan):
        for (n, t), row in zip(plan.points, frame.itertuples()):
            if abs(Direction(row.axis_theta, row.axis_phi).dot(n) - 1) > tol or abs(row.t_ns - t) > tol:
                raise ConfigError(f"measurement row {row.Index} does not match the plan point ({n}, {t})")
    sigma = frame["sigma"].to_numpy(dtype=float) if "sigma" in frame.columns else None
    return frame["w_plus"].to_numpy(dtype=float), sigma
