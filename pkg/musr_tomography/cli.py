import functools
import json
import logging
import click
import numpy as np
from pathlib import Path

from musr_tomography import __version__
from musr_tomography.config import (
    DEFAULT_N_MUONS,
    PlanConfig,
    RunConfig,
    load_measurements,
    parse_geometry,
)
from musr_tomography.dynamics.evolution import default_times, muon_states
from musr_tomography.dynamics.propagators import PropagatorSpec
from musr_tomography.entanglement.bell import DEFAULT_STARTS
from musr_tomography.errors import ConfigError, NumericError, RankDeficientPlanError
from musr_tomography.linalg.matrix_ops import Subsystem, partial_trace
from musr_tomography.logs import configure_logging
from musr_tomography.musr.decay import DecayModel
from musr_tomography.musr.estimation import estimate_tomogram, expected_reduced_tomogram
from musr_tomography.musr.polarization import StaticPolarization, TracePolarization, polarization_of
from musr_tomography.musr.simulation import DEFAULT_BACKGROUND_FRACTION, simulate_events
from musr_tomography.reconstruction.reconstruct import reconstruct_initial
from musr_tomography.spin_tomography.direction import Direction
from musr_tomography.sweep_manager import DEFAULT_TIMEOUT, SweepEntry, SweepManager, first_failure
from musr_tomography.traces import bell_records, evolve_frame, report_records, schema_header, write_csv
from musr_tomography.two_spin.two_spin_tomogram import infer_dims

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
DEFAULT_RECORD_STEPS = 11
DEFAULT_BINS = 50
PULL_LIMIT = 3.0


def handle_errors(command):
    """Map ConfigError to exit code 2 and NumericError to exit code 3."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except ConfigError as e:
            click.echo(f"configuration error: {e}", err=True)
            ctx.exit(EXIT_CONFIG)
        except RankDeficientPlanError as e:
            click.echo(f"rank-deficient plan: rank {e.rank}; unobservable: {e.null_space}", err=True)
            ctx.exit(EXIT_NUMERIC)
        except NumericError as e:
            click.echo(f"numeric failure: {e}", err=True)
            ctx.exit(EXIT_NUMERIC)

    return wrapper


def run_options(command):
    options = [
        click.option("--material", required=True, help="Preset name or path to a .toml/.json preset."),
        click.option("--B", "fields", type=float, multiple=True, help="Field magnitude in Gauss; repeat for a sweep."),
        click.option("--B-axis", "field_axis", default=None, help="x, y, z, -z or 'theta,phi'."),
        click.option("--aniso-axis", default=None, help="Anisotropy axis of Mu*."),
        click.option("--t-max-ns", type=float, default=None, help="End of the time span."),
        click.option("--steps", type=int, default=None, help="Number of time points."),
        click.option("--init", default="default", help="'default' or a JSON density-matrix file."),
        click.option("--seed", type=int, default=0),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def build_config(out, **kwargs) -> RunConfig:
    try:
        return RunConfig(
            material=kwargs["material"],
            fields_gauss=list(kwargs["fields"]) or None,
            field_axis=kwargs["field_axis"],
            aniso_axis=kwargs["aniso_axis"],
            t_max_ns=kwargs["t_max_ns"],
            steps=kwargs["steps"],
            init=kwargs["init"],
            out=out or Path("out"),
            seed=kwargs["seed"],
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def entry_label(material: str, B: float) -> str:
    return f"{Path(material).stem}_B{B:g}G"


def run_sweep(entries: list[SweepEntry], timeout: float = DEFAULT_TIMEOUT) -> list:
    """Values of every entry in order; any entry that did not finish fails the sweep."""
    results = SweepManager(timeout).run_sync(entries)
    error = first_failure(results)
    if error is not None:
        raise error
    return [r.value for r in results]


def write_manifest(out: Path, verb: str, config: RunConfig, entries: list[dict]) -> None:
    manifest = {
        "schema": schema_header(verb).strip("# \n"),
        "version": __version__,
        "verb": verb,
        "config": json.loads(config.model_dump_json()),
        "entries": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _emit(records: list[dict], out: Path | None, name: str) -> None:
    text = "\n".join(json.dumps(r, sort_keys=True) for r in records)
    if out is None:
        click.echo(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")


def _require_qubits(dim: int) -> None:
    if dim != 4:
        raise ConfigError("entanglement records are defined for an electron of spin 1/2")


def _record_times(config: RunConfig, t_max: float) -> np.ndarray:
    return np.linspace(0.0, t_max, config.steps or DEFAULT_RECORD_STEPS)


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug logging.")
def cli(verbose):
    """Spin tomography of muons and muonium."""
    configure_logging(verbose)


@cli.command()
@run_options
@click.option("--out", type=click.Path(path_type=Path), default=Path("out"), help="Output directory.")
@handle_errors
def evolve(out, **kwargs):
    """Reduced-tomogram, E, negativity and max-Bell traces, one CSV per field."""
    config = build_config(out, **kwargs)
    t_max = config.time_span()
    out.mkdir(parents=True, exist_ok=True)

    def job(B, h):
        prop = PropagatorSpec.resolve(h)
        times = default_times(prop, t_max, config.steps)
        frame = evolve_frame(prop, config.initial_state(h.dim), times)
        path = out / f"evolve_{entry_label(config.material, B)}.csv"
        write_csv(frame, path, "evolve")
        variant = None if prop.variant is None else prop.variant.value
        return {"B_gauss": B, "file": path.name, "method": prop.method.value, "variant": variant, "rows": len(frame)}

    entries = [SweepEntry(entry_label(config.material, B), functools.partial(job, B, h)) for B, h in config.sweep()]
    manifest = run_sweep(entries)
    write_manifest(out, "evolve", config, manifest)
    click.echo(f"wrote {len(manifest)} traces to {out}")


@cli.command()
@run_options
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Directory for a JSON-lines file.")
@click.option("--starts", type=int, default=DEFAULT_STARTS, help="Random starts of the Bell search.")
@handle_errors
def report(out, starts, **kwargs):
    """Entanglement report records at evenly spaced times."""
    config = build_config(out, **kwargs)
    t_max = config.time_span()

    def job(B, h):
        _require_qubits(h.dim)
        prop = PropagatorSpec.resolve(h)
        return report_records(config.initial_state(h.dim), prop, _record_times(config, t_max), B, starts, config.seed)

    entries = [SweepEntry(entry_label(config.material, B), functools.partial(job, B, h)) for B, h in config.sweep()]
    records = [r for chunk in run_sweep(entries) for r in chunk]
    _emit(records, out, f"report_{Path(config.material).stem}.jsonl")


@cli.command()
@run_options
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Directory for a JSON-lines file.")
@click.option("--starts", type=int, default=DEFAULT_STARTS, help="Random starts of the Bell search.")
@handle_errors
def bell(out, starts, **kwargs):
    """Largest Bell number under both contractions with the maximizing axes."""
    config = build_config(out, **kwargs)
    t_max = config.time_span()

    def job(B, h):
        _require_qubits(h.dim)
        prop = PropagatorSpec.resolve(h)
        return bell_records(config.initial_state(h.dim), prop, _record_times(config, t_max), B, starts, config.seed)

    entries = [SweepEntry(entry_label(config.material, B), functools.partial(job, B, h)) for B, h in config.sweep()]
    records = [r for chunk in run_sweep(entries) for r in chunk]
    _emit(records, out, f"bell_{Path(config.material).stem}.jsonl")


@cli.command()
@run_options
@click.option("--out", type=click.Path(path_type=Path), default=Path("out"), help="Output directory.")
@click.option("--detectors", default="cartesian", help="cartesian[:half_angle_deg] or a geometry JSON file.")
@click.option("--n-muons", type=int, default=DEFAULT_N_MUONS)
@click.option("--bins", type=int, default=DEFAULT_BINS)
@click.option("--background", type=float, default=DEFAULT_BACKGROUND_FRACTION, help="Flat background fraction.")
@click.option("--static", is_flag=True, help="Hold the initial muon polarization fixed.")
@handle_errors
def simulate(out, detectors, n_muons, bins, background, static, **kwargs):
    """Monte Carlo decay histograms, the estimated tomogram and its comparison to truth."""
    config = build_config(out, **kwargs)
    geometry = parse_geometry(detectors)
    B, h = config.sweep()[0]
    t_max = config.time_span()
    if bins < 1:
        raise ConfigError("at least one bin is required")
    out.mkdir(parents=True, exist_ok=True)

    prop = PropagatorSpec.resolve(h)
    rho0 = config.initial_state(h.dim)
    if static:
        rho_mu = partial_trace(rho0, infer_dims(rho0), Subsystem.MUON)
        source = StaticPolarization(polarization_of(rho_mu))
    else:
        times = default_times(prop, t_max, config.steps)
        source = TracePolarization.from_muon_states(times, muon_states(prop, rho0, times))

    model = DecayModel()
    edges = np.linspace(0.0, t_max, bins + 1)
    hist = simulate_events(source, geometry, model, n_muons, edges, config.seed, background)
    hist.to_csv(out / "histogram.csv")

    estimate = estimate_tomogram(hist)
    truth = np.empty(len(estimate))
    for (theta, phi), rows in estimate.groupby(["axis_theta", "axis_phi"], sort=False).groups.items():
        expected = expected_reduced_tomogram(source, edges, Direction(theta, phi).vector, model.lifetime_ns)
        truth[rows] = expected
    estimate["truth"] = truth
    estimate["pull"] = (estimate["w_plus"] - truth) / estimate["sigma"]
    write_csv(estimate, out / "estimate.csv", "simulate")

    confident = estimate[~estimate["low_confidence"]]
    comparison = {
        "B_gauss": B,
        "n_muons": n_muons,
        "confident_bins": int(len(confident)),
        "within_3_sigma": float((confident["pull"].abs() <= PULL_LIMIT).mean()) if len(confident) else None,
        "max_abs_pull": float(confident["pull"].abs().max()) if len(confident) else None,
    }
    (out / "comparison.json").write_text(json.dumps(comparison, indent=2, sort_keys=True))
    write_manifest(out, "simulate", config, [{"histogram": "histogram.csv", "estimate": "estimate.csv", **comparison}])
    click.echo(json.dumps(comparison, sort_keys=True))


@cli.command()
@click.argument("measurements", type=click.Path(path_type=Path))
@click.argument("plan_file", type=click.Path(path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Report JSON file.")
@handle_errors
def reconstruct(measurements, plan_file, out):
    """Initial two-spin state from measured reduced tomograms under a known plan."""
    plan = PlanConfig.from_file(plan_file).to_plan()
    values, sigmas = load_measurements(measurements, plan)
    result = reconstruct_initial(values, plan, sigmas)
    text = result.to_report().model_dump_json(indent=2)
    if out is None:
        click.echo(text)
    else:
        Path(out).write_text(text)


def main():
    cli(prog_name="musr-tomography")
