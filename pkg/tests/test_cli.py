"""Command-line interface, end to end in a temporary directory."""

import csv
import json

import pytest

from atombench import bench
from atombench.bench import BenchmarkSpec
from atombench.cli import main


def test_run_command(tmp_path):
    cfg = {
        "noise": "noiseless",
        "kinds": ["Ghz"],
        "widths": [2, 3],
        "topologies": ["all_to_all", "grid"],
        "samples_per_point": {"Ghz": 1},
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = main(["run", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    records = json.loads((out / "results.json").read_text())
    assert len(records) == 4
    assert all(abs(r["f"] - 1.0) < 1e-6 for r in records)
    with open(out / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert {r["topology"] for r in rows} == {"all_to_all", "grid"}
    assert (out / "heatmap.csv").exists()


def test_run_command_with_overrides(tmp_path):
    out = tmp_path / "out"
    rc = main(["run", "--set", "kinds=[\"Ghz\"]", "--set", "widths=[2]",
               "--set", "noise.cz_phaseflip=0.2", "--out", str(out)])
    assert rc == 0
    records = json.loads((out / "results.json").read_text())
    assert all(r["f"] < 0.99 for r in records)


def test_run_command_bad_config(tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps({"noise": {"cz_phaseflip": 7.0}}))
    rc = main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
    assert rc == 2


def test_fit_command(tmp_path):
    # one tiny reference generated at slightly perturbed noise
    from atombench.channels import NoiseParams
    from atombench.runner import run_reference
    circuit, _ = bench.generate(BenchmarkSpec("Ghz", 2))
    planted = NoiseParams(cz_phaseflip=0.05)
    measured = run_reference(circuit, planted)
    refs = tmp_path / "refs"
    refs.mkdir()
    (refs / "ghz2.json").write_text(json.dumps({
        "n_qubits": 2,
        "ops": [g.to_record() for g in circuit.ops],
        "measured": measured.entries,
        "metadata": circuit.metadata,
    }))
    cfg = {"fit": {"free_params": ["cz_phaseflip"], "n_starts": 1,
                   "max_evals": 60}}
    cfg_path = tmp_path / "fit.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = main(["fit", str(refs), "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    fitted = json.loads((out / "fitted_params.json").read_text())
    report = json.loads((out / "fit_report.json").read_text())
    assert report["achieved_fidelity"] > 0.999
    assert fitted["cz_phaseflip"] == pytest.approx(0.05, rel=0.25)


def test_gatefid_command(capsys):
    rc = main(["gatefid", "--samples", "25", "--seed", "3"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert any("cz" in l for l in lines)
    assert any("global_rotation" in l for l in lines)
