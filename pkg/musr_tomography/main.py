import logging
import numpy as np
from contextlib import asynccontextmanager
from fastapi import Depends, FastAPI, HTTPException, Request
from pydantic import BaseModel, Field

from musr_tomography import __version__
from musr_tomography.config import MaterialPreset, load_presets, resolve_preset
from musr_tomography.dynamics.evolution import default_times, muonium_initial_state
from musr_tomography.dynamics.propagators import PropagatorSpec
from musr_tomography.entanglement.bell import DEFAULT_STARTS
from musr_tomography.errors import ConfigError, NumericError
from musr_tomography.traces import bell_records, evolve_frame, report_records

logger = logging.getLogger(__name__)

# cap on time points per request
MAX_STEPS = 4096
DEFAULT_RECORD_STEPS = 11


@asynccontextmanager
async def lifespan(app: FastAPI):
    app.state.presets = load_presets()
    logger.info(f"[API]: loaded {len(app.state.presets)} presets")
    try:
        yield
    finally:
        logger.info("[API]: shutdown complete")


app = FastAPI(title="musr-tomography", version=__version__, lifespan=lifespan)


def get_presets(request: Request) -> dict[str, MaterialPreset]:
    return request.app.state.presets


class TraceRequest(BaseModel):
    material: str
    B_gauss: float = 0.0
    field_axis: str | None = None
    aniso_axis: str | None = None
    t_max_ns: float | None = Field(default=None, gt=0.0)
    steps: int | None = Field(default=None, ge=2, le=MAX_STEPS)


class RecordRequest(TraceRequest):
    starts: int = Field(default=DEFAULT_STARTS, ge=1, le=256)
    seed: int = 0


def _resolve(req: TraceRequest, presets: dict[str, MaterialPreset]):
    try:
        preset = resolve_preset(req.material, presets)
        h = preset.hamiltonian(req.B_gauss, req.field_axis, req.aniso_axis)
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=str(e))
    t_max = req.t_max_ns if req.t_max_ns is not None else preset.default_t_max_ns
    return PropagatorSpec.resolve(h), muonium_initial_state(h.j_e), t_max


def _run(fn, *args):
    try:
        return fn(*args)
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except NumericError as e:
        raise HTTPException(status_code=422, detail=str(e))


@app.get("/")
async def root():
    return {"message": "musr-tomography API", "version": __version__}


@app.get("/presets")
async def presets(catalog: dict[str, MaterialPreset] = Depends(get_presets)):
    return {name: preset.model_dump(mode="json") for name, preset in sorted(catalog.items())}


@app.post("/evolve")
def evolve(req: TraceRequest, catalog: dict[str, MaterialPreset] = Depends(get_presets)):
    prop, rho0, t_max = _resolve(req, catalog)
    times = _run(default_times, prop, t_max, req.steps)
    if len(times) > MAX_STEPS:
        raise HTTPException(status_code=400, detail=f"{len(times)} time points exceed {MAX_STEPS}; pass steps")
    frame = _run(evolve_frame, prop, rho0, times)
    return {"B_gauss": req.B_gauss, "records": frame.astype(object).where(frame.notna(), None).to_dict(orient="records")}


def _require_qubits(prop: PropagatorSpec) -> None:
    if prop.dim != 4:
        raise HTTPException(status_code=400, detail="entanglement records are defined for an electron of spin 1/2")


@app.post("/report")
def report(req: RecordRequest, catalog: dict[str, MaterialPreset] = Depends(get_presets)):
    prop, rho0, t_max = _resolve(req, catalog)
    _require_qubits(prop)
    times = np.linspace(0.0, t_max, req.steps or DEFAULT_RECORD_STEPS)
    return {"records": _run(report_records, rho0, prop, times, req.B_gauss, req.starts, req.seed)}


@app.post("/bell")
def bell(req: RecordRequest, catalog: dict[str, MaterialPreset] = Depends(get_presets)):
    prop, rho0, t_max = _resolve(req, catalog)
    _require_qubits(prop)
    times = np.linspace(0.0, t_max, req.steps or DEFAULT_RECORD_STEPS)
    return {"records": _run(bell_records, rho0, prop, times, req.B_gauss, req.starts, req.seed)}


# start using uvicorn musr_tomography.main:app --reload
