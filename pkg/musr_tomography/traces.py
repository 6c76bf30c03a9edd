"""Plot-ready records shared by the command line and the HTTP surface."""

import numpy as np
import pandas as pd
from pathlib import Path

from musr_tomography import __version__
from musr_tomography.dynamics.evolution import evolve_density
from musr_tomography.dynamics.propagators import PropagatorSpec
from musr_tomography.entanglement.bell import BellContraction, elementwise_bound, max_bell
from musr_tomography.entanglement.ppt import NEGATIVITY_DIMS, entanglement_E, negativity
from musr_tomography.entanglement.report import entanglement_report
from musr_tomography.two_spin.two_spin_tomogram import infer_dims, reduced_tomogram
from musr_tomography.config import parse_axis

SCHEMA_VERSION = 1
EVOLVE_COLUMNS = ["t_ns", "axis", "w_reduced", "E", "negativity", "max_bell"]
TRACE_AXES = ("x", "y", "z")


def schema_header(verb: str) -> str:
    return f"# musr-tomography {verb} schema v{SCHEMA_VERSION} (package {__version__})\n"


def evolve_frame(prop: PropagatorSpec, rho0, times) -> pd.DataFrame:
    """Long-format trace: one row per time and muon axis.

    E and max_bell are NaN unless both spins are qubits; negativity is NaN beyond 2x3.
    """
    dims = infer_dims(np.asarray(rho0))
    qubits = tuple(dims) == (2, 2)
    rows = []
    for t in times:
        rho = evolve_density(rho0, prop.unitary(float(t)))
        E = entanglement_E(rho) if qubits else np.nan
        neg = negativity(rho, dims) if tuple(dims) in NEGATIVITY_DIMS else np.nan
        bell = elementwise_bound(rho) if qubits else np.nan
        for name in TRACE_AXES:
            w = float(np.clip(reduced_tomogram(rho, parse_axis(name))[0], 0.0, 1.0))
            rows.append((float(t), name, w, E, neg, bell))
    return pd.DataFrame(rows, columns=EVOLVE_COLUMNS)


def write_csv(frame: pd.DataFrame, path: str | Path, verb: str) -> None:
    with open(path, "w", newline="") as f:
        f.write(schema_header(verb))
        frame.to_csv(f, index=False, float_format="%.12g")


def report_records(rho0, prop: PropagatorSpec, times, B_gauss: float, starts: int, seed: int) -> list[dict]:
    records = []
    for t in times:
        report = entanglement_report(evolve_density(rho0, prop.unitary(float(t))), float(t), starts=starts, seed=seed)
        records.append({"B_gauss": B_gauss, **report.model_dump()})
    return records


def bell_records(rho0, prop: PropagatorSpec, times, B_gauss: float, starts: int, seed: int) -> list[dict]:
    records = []
    for t in times:
        rho = evolve_density(rho0, prop.unitary(float(t)))
        for contraction in BellContraction:
            result = max_bell(rho, contraction, starts, seed)
            records.append(
                {
                    "B_gauss": B_gauss,
                    "t_ns": float(t),
                    "contraction": contraction.value,
                    "max_bell": result.value,
                    "setting": result.setting.to_dict(),
                }
            )
    return records
