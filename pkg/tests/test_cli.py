import json
import time
import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from musr_tomography.cli import EXIT_CONFIG, EXIT_NUMERIC, cli, run_sweep
from musr_tomography.config import PlanConfig
from musr_tomography.dynamics import muonium_initial_state
from musr_tomography.errors import NumericError
from musr_tomography.reconstruction import forward_model
from musr_tomography.sweep_manager import SweepEntry

QUARTZ_A = 2 * np.pi * 4.404
# (1, 1, 1) / sqrt(3)
OBLIQUE = f"{float(np.arccos(1 / np.sqrt(3)))!r},{np.pi / 4!r}"


@pytest.fixture
def runner():
    return CliRunner()


def write_plan(path, **fields):
    path.write_text(json.dumps(fields))
    return path


def write_measurements(path, plan, values):
    rows = [
        {"axis_theta": n.theta, "axis_phi": n.phi, "t_ns": t, "w_plus": w}
        for (n, t), w in zip(plan.points, values)
    ]
    with open(path, "w") as f:
        f.write("# synthetic reduced tomograms\n")
        pd.DataFrame(rows).to_csv(f, index=False, float_format="%.17g")
    return path


def test_evolve_free_field_trace(runner, tmp_path):
    result = runner.invoke(
        cli, ["evolve", "--material", "quartz", "--B", "0", "--t-max-ns", "0.5", "--steps", "51", "--out", str(tmp_path)]
    )
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "evolve_quartz_B0G.csv", comment="#")
    assert list(frame.columns) == ["t_ns", "axis", "w_reduced", "E", "negativity", "max_bell"]
    z = frame[frame["axis"] == "z"]
    assert len(z) == 51
    assert np.allclose(z["w_reduced"], (3 + np.cos(QUARTZ_A * z["t_ns"])) / 4, atol=1e-9)
    assert np.allclose(z["max_bell"], np.abs(np.sin(QUARTZ_A * z["t_ns"])), atol=1e-9)
    assert frame["max_bell"].max() <= 1 + 1e-9
    assert np.allclose(frame[frame["axis"] == "x"]["w_reduced"], 0.5, atol=1e-9)
    assert (tmp_path / "evolve_quartz_B0G.csv").read_text().startswith("# musr-tomography evolve schema")


def test_evolve_sweeps_preset_fields(runner, tmp_path):
    result = runner.invoke(cli, ["evolve", "--material", "quartz", "--steps", "11", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    written = sorted(p.name for p in tmp_path.glob("evolve_*.csv"))
    assert written == sorted(f"evolve_quartz_B{B}G.csv" for B in ("0", "790", "1580", "3160"))
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["verb"] == "evolve"
    assert [entry["B_gauss"] for entry in manifest["entries"]] == [0.0, 790.0, 1580.0, 3160.0]


def test_report_writes_json_lines(runner):
    result = runner.invoke(
        cli, ["report", "--material", "vacuum-mu", "--t-max-ns", "0.3", "--steps", "2", "--starts", "2"]
    )
    assert result.exit_code == 0, result.output
    records = [json.loads(line) for line in result.stdout.strip().splitlines()]
    assert len(records) == 2
    assert records[0]["t"] == 0.0
    assert records[0]["E"] == pytest.approx(0.0, abs=1e-12)
    assert {"M2", "M3", "M4", "max_bell", "negativity", "B_gauss"} <= set(records[1])


def test_bell_reports_both_contractions(runner, tmp_path):
    result = runner.invoke(
        cli,
        ["bell", "--material", "vacuum-mu", "--t-max-ns", "0.3", "--steps", "2", "--starts", "2", "--out", str(tmp_path)],
    )
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "bell_vacuum-mu.jsonl").read_text().strip().splitlines()
    records = [json.loads(line) for line in lines]
    assert [r["contraction"] for r in records] == ["trace", "elementwise"] * 2
    assert set(records[0]["setting"]) == {"n1_mu", "n2_mu", "n1_e", "n2_e"}


def test_simulate_static_source(runner, tmp_path):
    result = runner.invoke(
        cli,
        [
            "simulate", "--material", "quartz", "--B", "0", "--static", "--n-muons", "20000",
            "--bins", "4", "--t-max-ns", "4000", "--out", str(tmp_path),
        ],
    )
    assert result.exit_code == 0, result.output
    for name in ("histogram.csv", "histogram.json", "estimate.csv", "comparison.json", "manifest.json"):
        assert (tmp_path / name).exists()
    comparison = json.loads(result.stdout.strip().splitlines()[-1])
    assert comparison["n_muons"] == 20000
    assert comparison["confident_bins"] > 0
    estimate = pd.read_csv(tmp_path / "estimate.csv", comment="#")
    assert {"truth", "pull", "w_plus", "sigma"} <= set(estimate.columns)


@pytest.mark.parametrize(
    "args",
    [
        ["evolve", "--material", "unobtainium"],
        ["evolve", "--material", "quartz", "--B-axis", "w"],
        ["evolve", "--material", "vacuum-mu", "--B", "10"],
        ["simulate", "--material", "quartz", "--detectors", "cartesian:wide"],
    ],
)
def test_configuration_errors_exit_with_two(runner, tmp_path, args):
    result = runner.invoke(cli, args + ["--out", str(tmp_path)])
    assert result.exit_code == EXIT_CONFIG


def test_reconstruct_from_measurements(runner, tmp_path):
    fields = {
        "material": "si-mu-star",
        "aniso_axis": OBLIQUE,
        "closed_form": False,
        "fields": [{"B_gauss": 33.0}, {"B_gauss": 100.0}, {"B_gauss": 33.0, "field_axis": "x"}],
    }
    plan_file = write_plan(tmp_path / "plan.json", **fields)
    plan = PlanConfig(**fields).to_plan()
    rho0 = muonium_initial_state()
    measurements = write_measurements(tmp_path / "w.csv", plan, forward_model(rho0, plan))

    result = runner.invoke(cli, ["reconstruct", str(measurements), str(plan_file)])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["rank"] == 15
    assert np.allclose(report["rho0_real"], np.real(rho0), atol=1e-6)
    assert np.allclose(report["rho0_imag"], 0.0, atol=1e-6)


def test_reconstruct_with_rank_deficient_plan(runner, tmp_path):
    plan_file = write_plan(tmp_path / "plan.json", material="vacuum-mu")
    plan = PlanConfig(material="vacuum-mu").to_plan()
    measurements = write_measurements(tmp_path / "w.csv", plan, np.full(len(plan), 0.5))
    result = runner.invoke(cli, ["reconstruct", str(measurements), str(plan_file)])
    assert result.exit_code == EXIT_NUMERIC
    assert "rank-deficient plan" in result.output


def test_reconstruct_with_missing_plan(runner, tmp_path):
    result = runner.invoke(cli, ["reconstruct", str(tmp_path / "w.csv"), str(tmp_path / "none.json")])
    assert result.exit_code == EXIT_CONFIG


def test_sweep_that_times_out_is_a_numeric_failure():
    entries = [SweepEntry("fast", lambda: 1), SweepEntry("slow", lambda: time.sleep(1.0))]
    with pytest.raises(NumericError, match="slow"):
        run_sweep(entries, timeout=0.05)


def test_evolve_mu_like_spin_one_shell(runner, tmp_path):
    result = runner.invoke(
        cli, ["evolve", "--material", "mu-like", "--t-max-ns", "0.5", "--steps", "101", "--out", str(tmp_path)]
    )
    assert result.exit_code == 0, result.output
    written = sorted(p.name for p in tmp_path.glob("evolve_*.csv"))
    assert written == sorted(f"evolve_mu-like_B{B}G.csv" for B in ("0", "790", "1580", "3160"))
    frame = pd.read_csv(tmp_path / "evolve_mu-like_B0G.csv", comment="#")
    z = frame[frame["axis"] == "z"]
    assert z["w_reduced"].iloc[0] == pytest.approx(1.0, abs=1e-9)
    # polarization 5/9 + 4/9 cos(wt) dips to 1/9
    assert z["w_reduced"].min() < 0.6
    assert np.allclose(frame[frame["axis"] == "x"]["w_reduced"], 0.5, atol=1e-9)
    assert frame["E"].isna().all()
    assert frame["max_bell"].isna().all()
    assert (frame["negativity"] >= -1e-12).all()
