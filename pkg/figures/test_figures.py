"""Rendering tests for the standalone figure scripts.

The input CSVs are produced by the simulation CLI itself (small, seeded
runs) so these tests exercise the real file contract end to end: the only
thing the figure layer knows about the simulator is the column layout of
its outputs.
"""

import subprocess
import sys
from pathlib import Path

import pandas as pd
import pytest

import plot

PLOT_SCRIPT = Path(__file__).with_name("plot.py")


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "contagionsim", *map(str, args)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


def run_plot(*args):
    return subprocess.run(
        [sys.executable, str(PLOT_SCRIPT), *map(str, args)],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def result_csvs(tmp_path_factory):
    """Generate one CSV of each experiment kind through the CLI."""
    root = tmp_path_factory.mktemp("results")
    run_cli(
        "experiment", "asymmetry-grid", "--out-dir", root,
        "--n", 20, "--outdegree", 1,
        "--sender-rewires", "0,10", "--receiver-rewires", "0,10",
        "--networks-per-cell", 2, "--outcomes-per-network", 5,
        "--seed", 90, "--out", "grid.csv",
    )
    nets = []
    for w in range(2):
        name = f"net{w}.csv"
        run_cli(
            "gen-net", "--out-dir", root, "--n", 30, "--outdegree", 1,
            "--receiver-rewires", 10, "--seed", 40 + w, "--out", name,
        )
        nets.append(str(root / name))
    run_cli(
        "experiment", "wave-asymmetry", "--out-dir", root,
        "--networks", ",".join(nets), "--outcomes", 5,
        "--seed", 7, "--out", "waves.csv",
    )
    run_cli(
        "experiment", "threshold-sweep", "--out-dir", root,
        "--n", 40, "--outdegree", 2, "--waves", 3,
        "--thresholds=-0.5,0,0.5", "--models", "M1,M3",
        "--seed", 11, "--out", "sweep.csv",
    )
    return {
        "asymmetry-grid": root / "grid.csv",
        "fraction-table": root / "waves.csv",
        "threshold-sweep": root / "sweep.csv",
    }


@pytest.fixture
def verdict(capfd):
    def _report(num, label, ok, detail):
        status = "PASS" if ok else "FAIL"
        with capfd.disabled():
            print(f"acceptance {num}: {status} - {label} ({detail})", flush=True)
        assert ok, f"{label}: {detail}"

    return _report


def test_all_kinds_render_from_cli_outputs(result_csvs, tmp_path, verdict):
    outputs = {
        "asymmetry-grid": tmp_path / "fig_grid.png",
        "threshold-sweep": tmp_path / "fig_sweep.png",
        "fraction-table": tmp_path / "fractions.md",
    }
    rendered = []
    for kind, out in outputs.items():
        proc = run_plot("--kind", kind, "--in", result_csvs[kind], "--out", out)
        rendered.append(proc.returncode == 0 and out.exists() and out.stat().st_size > 0)

    # feeding a sweep file to the grid renderer must fail by naming the
    # columns it expected, and must not leave a file behind
    bad_out = tmp_path / "bad.png"
    proc = run_plot(
        "--kind", "asymmetry-grid", "--in", result_csvs["threshold-sweep"],
        "--out", bad_out,
    )
    diagnostic = (
        proc.returncode == 1
        and "sender_rewires" in proc.stderr
        and "mean_difference" in proc.stderr
        and not bad_out.exists()
    )
    verdict(
        9,
        "all figure kinds render from experiment outputs",
        all(rendered) and diagnostic,
        f"rendered {sum(bool(r) for r in rendered)}/3 kinds, "
        f"schema mismatch names missing columns: {diagnostic}",
    )


def test_empty_input_errors_without_output(tmp_path, capsys):
    src = tmp_path / "empty.csv"
    src.write_text(",".join(plot.GRID_COLUMNS) + "\n")
    out = tmp_path / "fig.png"
    code = plot.main(["--kind", "asymmetry-grid", "--in", str(src), "--out", str(out)])
    err = capsys.readouterr().err
    assert code == 1
    assert "no data rows" in err
    assert not out.exists()


def test_missing_input_file_errors(tmp_path, capsys):
    out = tmp_path / "fig.png"
    code = plot.main(
        ["--kind", "threshold-sweep", "--in", str(tmp_path / "nope.csv"), "--out", str(out)]
    )
    assert code == 1
    assert "does not exist" in capsys.readouterr().err
    assert not out.exists()


def test_grid_missing_combination_listed(result_csvs, tmp_path, capsys):
    frame = pd.read_csv(result_csvs["asymmetry-grid"])
    src = tmp_path / "partial.csv"
    frame[frame.family == "linear"].to_csv(src, index=False)
    out = tmp_path / "fig.png"
    code = plot.main(["--kind", "asymmetry-grid", "--in", str(src), "--out", str(out)])
    err = capsys.readouterr().err
    assert code == 1
    assert "('logistic', 'asymmetric')" in err
    assert "('logistic', 'symmetric')" in err
    assert not out.exists()


def test_sweep_single_threshold_renders(result_csvs, tmp_path):
    frame = pd.read_csv(result_csvs["threshold-sweep"])
    single = frame[frame.threshold == frame.threshold.min()]
    src = tmp_path / "single.csv"
    single.to_csv(src, index=False)
    out = tmp_path / "fig.png"
    assert plot.main(["--kind", "threshold-sweep", "--in", str(src), "--out", str(out)]) == 0
    assert out.stat().st_size > 0


def test_sweep_without_fitted_rows_errors(tmp_path, capsys):
    src = tmp_path / "failed.csv"
    pd.DataFrame(
        {
            "threshold": [0.0],
            "model": ["M1"],
            "term": [""],
            "estimate": [float("nan")],
            "std_error": [float("nan")],
            "status": ["failed: nobody moved"],
        }
    ).to_csv(src, index=False)
    out = tmp_path / "fig.png"
    code = plot.main(["--kind", "threshold-sweep", "--in", str(src), "--out", str(out)])
    assert code == 1
    assert "no successfully fitted rows" in capsys.readouterr().err
    assert not out.exists()


def test_fraction_table_layout(result_csvs, tmp_path):
    out = tmp_path / "fractions.md"
    assert (
        plot.main(
            ["--kind", "fraction-table", "--in", str(result_csvs["fraction-table"]),
             "--out", str(out)]
        )
        == 0
    )
    lines = out.read_text().strip().splitlines()
    frame = pd.read_csv(result_csvs["fraction-table"])
    n_waves = frame.wave.nunique()
    assert lines[0].startswith("| P(difference > 0) |")
    assert lines[0].count("Wave") == n_waves
    labels = [line.split("|")[1].strip() for line in lines[2:]]
    assert labels == [
        "Asymmetric, continuous",
        "Symmetric, continuous",
        "Asymmetric, binary",
        "Symmetric, binary",
    ]
    # spot-check one cell against the source data
    want = frame[
        (frame.family == "linear") & (frame.process == "asymmetric") & (frame.wave == 1)
    ].frac_positive.iloc[0]
    assert f"{want:.3f}" in lines[2]


def test_fraction_table_missing_process_listed(result_csvs, tmp_path, capsys):
    frame = pd.read_csv(result_csvs["fraction-table"])
    src = tmp_path / "partial.csv"
    frame[frame.process == "asymmetric"].to_csv(src, index=False)
    out = tmp_path / "t.md"
    code = plot.main(["--kind", "fraction-table", "--in", str(src), "--out", str(out)])
    err = capsys.readouterr().err
    assert code == 1
    assert "('linear', 'symmetric')" in err
    assert "('logistic', 'symmetric')" in err


def test_caption_appears_in_table(result_csvs, tmp_path):
    out = tmp_path / "cap.md"
    plot.main(
        ["--kind", "fraction-table", "--in", str(result_csvs["fraction-table"]),
         "--out", str(out), "--caption", "Share of replicates with a positive difference"]
    )
    assert out.read_text().splitlines()[0] == "Share of replicates with a positive difference"


def test_svg_output(result_csvs, tmp_path):
    out = tmp_path / "fig.svg"
    assert (
        plot.main(
            ["--kind", "asymmetry-grid", "--in", str(result_csvs["asymmetry-grid"]),
             "--out", str(out)]
        )
        == 0
    )
    assert b"<svg" in out.read_bytes()[:500]


def test_png_render_is_deterministic(result_csvs, tmp_path):
    paths = [tmp_path / "a.png", tmp_path / "b.png"]
    for p in paths:
        plot.main(
            ["--kind", "threshold-sweep", "--in", str(result_csvs["threshold-sweep"]),
             "--out", str(p)]
        )
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_unknown_kind_rejected():
    proc = run_plot("--kind", "pie-chart", "--in", "x.csv", "--out", "y.png")
    assert proc.returncode == 2
    assert "invalid choice" in proc.stderr


def test_spec_validates_kind(tmp_path):
    with pytest.raises(ValueError, match="unknown figure kind"):
        plot.FigureSpec(tmp_path / "a.csv", "scatter", tmp_path / "b.png")
