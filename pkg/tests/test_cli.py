import csv
import json

import numpy as np
import pytest

from regshift.cli import main
from regshift.data import load_csv


def run(args):
    return main([str(a) for a in args])


@pytest.fixture
def sim_csv(tmp_path):
    out = tmp_path / "data.csv"
    assert run(["simulate", "--n", 80, "--seed", 5, "--output", out]) == 0
    return out


def test_simulate_writes_loadable_csv(sim_csv):
    ds = load_csv(sim_csv)
    assert ds.n == 80
    assert ds.d == 2
    assert np.all(np.abs(ds.x) <= 2.0)


def test_simulate_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["simulate", "--n", 40, "--seed", 3, "--output", a])
    run(["simulate", "--n", 40, "--seed", 3, "--output", b])
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    run(["simulate", "--n", 40, "--seed", 4, "--output", c])
    assert a.read_bytes() != c.read_bytes()


def test_partition_fixed_bandwidth(sim_csv, tmp_path, capsys):
    outdir = tmp_path / "out"
    rc = run(["partition", "--input", sim_csv, "--h", 1.6, "--output-dir", outdir,
              "--kernel", "biweight", "--transform", "t1"])
    assert rc == 0
    payload = json.loads((outdir / "partition.json").read_text())
    assert set(payload) == {"labels", "modes", "counts", "config"}
    assert len(payload["labels"]) == 80
    assert len(payload["modes"]) == len(payload["counts"])
    assert sum(payload["counts"]) == sum(1 for l in payload["labels"] if l >= 0)
    assert payload["config"]["merge_radius"] == pytest.approx(0.4)

    with open(outdir / "modes.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["mode_index", "x1", "x2", "count"]
    assert len(rows) - 1 == len(payload["modes"])
    assert "basin" in capsys.readouterr().out


def test_partition_deterministic_bytes(sim_csv, tmp_path):
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    for d in (d1, d2):
        run(["partition", "--input", sim_csv, "--h", 1.4, "--output-dir", d])
    assert (d1 / "partition.json").read_bytes() == (d2 / "partition.json").read_bytes()
    assert (d1 / "modes.csv").read_bytes() == (d2 / "modes.csv").read_bytes()


def test_partition_trajectories(sim_csv, tmp_path):
    outdir = tmp_path / "out"
    run(["partition", "--input", sim_csv, "--h", 1.6, "--output-dir", outdir, "--trajectories"])
    with open(outdir / "trajectories.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["start_index", "step", "x1", "x2"]
    starts = {int(r[0]) for r in rows[1:]}
    assert starts == set(range(80))
    first = [r for r in rows[1:] if r[0] == "0"]
    assert [int(r[1]) for r in first] == list(range(len(first)))


def test_partition_requires_bandwidth(sim_csv, tmp_path, capsys):
    rc = run(["partition", "--input", sim_csv, "--output-dir", tmp_path])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_partition_auto_h_writes_bandwidth_json(sim_csv, tmp_path):
    outdir = tmp_path / "out"
    rc = run(["partition", "--input", sim_csv, "--auto-h", "--output-dir", outdir,
              "--h-grid", "0.8:2.5:6:log"])
    assert rc == 0
    bw = json.loads((outdir / "bandwidth.json").read_text())
    assert set(bw) == {"values", "cv_scores", "selected", "pilot_bandwidth"}
    assert bw["selected"] in bw["values"]
    assert len(bw["values"]) == 6


def test_modes_subcommand(sim_csv, tmp_path, capsys):
    outdir = tmp_path / "out"
    rc = run(["modes", "--input", sim_csv, "--h", 1.6, "--output-dir", outdir])
    assert rc == 0
    assert (outdir / "modes.csv").exists()
    assert not (outdir / "partition.json").exists()
    assert "mode 0" in capsys.readouterr().out


def test_bandwidth_subcommand(sim_csv, tmp_path, capsys):
    outdir = tmp_path / "out"
    rc = run(["bandwidth", "--input", sim_csv, "--output-dir", outdir,
              "--h-grid", "0.9:2.2:5", "--pilot-grid", "0.5:1.5:4"])
    assert rc == 0
    bw = json.loads((outdir / "bandwidth.json").read_text())
    assert len(bw["values"]) == 5
    assert "selected" in capsys.readouterr().out


def test_ridge_subcommand(tmp_path):
    # filament data: grid design, response decays transverse to the x1 axis
    g1 = np.linspace(-2, 2, 24)
    g2 = np.linspace(-1.5, 1.5, 12)
    X = np.array(np.meshgrid(g1, g2)).reshape(2, -1).T
    src = tmp_path / "fil.csv"
    with open(src, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "y"])
        for xi in X:
            w.writerow([format(v, ".17g") for v in (xi[0], xi[1], float(np.exp(-xi[1] ** 2)))])
    outdir = tmp_path / "out"
    rc = run(["ridge", "--input", src, "--h", 0.5, "--kernel", "gaussian",
              "--transform", "t2", "--s", 2, "--output-dir", outdir])
    assert rc == 0
    with open(outdir / "ridge.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["start_index", "x1", "x2", "converged", "projected_step_norm",
                       "iterations", "eig1", "eig2"]
    assert len(rows) - 1 == len(X)
    conv = [r for r in rows[1:] if r[3] == "1"]
    assert len(conv) > len(X) * 0.5


def test_ridge_rejects_bad_subspace(sim_csv, tmp_path, capsys):
    rc = run(["ridge", "--input", sim_csv, "--h", 1.0, "--s", 5, "--output-dir", tmp_path])
    assert rc == 2
    assert "subspace" in capsys.readouterr().err


def test_experiment_modecount_fixed_h(tmp_path, capsys):
    outdir = tmp_path / "exp"
    rc = run(["experiment", "modecount", "--n", 60, "--reps", 3, "--seed", 11,
              "--h", 1.6, "--output-dir", outdir])
    assert rc == 0
    payload = json.loads((outdir / "modecount.json").read_text())
    counts = payload["mode_counts"]
    assert len(counts) == 3
    assert payload["frequency_two"] == sum(1 for c in counts if c == 2) / 3
    assert payload["bandwidths"] == [1.6, 1.6, 1.6]
    assert payload["config"]["transform"] == "t1"
    out = capsys.readouterr().out
    assert f"{payload['frequency_two']:.4f}" in out


def test_experiment_modecount_deterministic_bytes(tmp_path):
    d1, d2 = tmp_path / "e1", tmp_path / "e2"
    for d in (d1, d2):
        run(["experiment", "modecount", "--n", 50, "--reps", 2, "--seed", 7,
             "--h", 1.5, "--output-dir", d])
    assert (d1 / "modecount.json").read_bytes() == (d2 / "modecount.json").read_bytes()


def test_experiment_modecount_jobs_match_sequential(tmp_path):
    d1, d2 = tmp_path / "s", tmp_path / "p"
    run(["experiment", "modecount", "--n", 50, "--reps", 2, "--seed", 7,
         "--h", 1.5, "--output-dir", d1, "--jobs", 1])
    run(["experiment", "modecount", "--n", 50, "--reps", 2, "--seed", 7,
         "--h", 1.5, "--output-dir", d2, "--jobs", 2])
    assert (d1 / "modecount.json").read_bytes() == (d2 / "modecount.json").read_bytes()


def test_experiment_modecount_sweep(tmp_path):
    outdir = tmp_path / "exp"
    rc = run(["experiment", "modecount", "--n", 50, "--reps", 2, "--seed", 3,
              "--h", 1.6, "--sweep", "1.0,2.5", "--output-dir", outdir])
    assert rc == 0
    payload = json.loads((outdir / "modecount.json").read_text())
    assert set(payload["sweep"]) == {"1.0", "2.5"}
    assert all(len(v) == 2 for v in payload["sweep"].values())


def test_experiment_modecount_auto_h(tmp_path):
    outdir = tmp_path / "exp"
    rc = run(["experiment", "modecount", "--n", 60, "--reps", 2, "--seed", 2,
              "--auto-h", "--h-grid", "1.0:2.5:4:log", "--output-dir", outdir])
    assert rc == 0
    payload = json.loads((outdir / "modecount.json").read_text())
    assert payload["config"]["bandwidth_policy"] == "auto"
    assert all(1.0 <= h <= 2.5 for h in payload["bandwidths"])


def test_experiment_rate(tmp_path, capsys):
    outdir = tmp_path / "rate"
    rc = run(["experiment", "rate", "--n-list", "60,120", "--reps", 2, "--seed", 1,
              "--output-dir", outdir])
    assert rc == 0
    with open(outdir / "rate.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "h", "median_dh"]
    assert [r[0] for r in rows[1:]] == ["60", "120"]
    for r in rows[1:]:
        assert float(r[2]) >= 0.0
    assert "median distance" in capsys.readouterr().out


def test_experiment_rate_single_size_single_row(tmp_path):
    outdir = tmp_path / "rate1"
    assert run(["experiment", "rate", "--n-list", "60", "--reps", 2, "--seed", 1,
                "--output-dir", outdir]) == 0
    with open(outdir / "rate.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 2  # header + one size


def test_malformed_csv_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,y\n1,2\nmuch,wow\n", encoding="utf-8")
    rc = run(["partition", "--input", bad, "--h", 1.0, "--output-dir", tmp_path])
    assert rc == 2
    assert "row 2" in capsys.readouterr().err
