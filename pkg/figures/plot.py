#!/usr/bin/env python3
"""Render figures and summary tables from simulation result CSVs.

Standalone companion to the contagionsim CLI: it reads the delimited
experiment outputs and draws one artifact per invocation. Three kinds are
supported:

  asymmetry-grid   small-multiples panels of the mean forward-minus-reverse
                   coefficient difference over the rewiring grid, one row
                   per (regression family, generating process) combination
  threshold-sweep  coefficient estimates traced across dichotomization
                   thresholds, one line per (model, term)
  fraction-table   markdown table of the positive-difference fractions by
                   wave, continuous rows above binary rows

Images are written in the format implied by the output extension (.png or
.svg); the table kind writes plain text. Nothing is computed here beyond
layout: every number comes from the input CSV, and the same CSV always
renders the same artifact.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

KINDS = ("asymmetry-grid", "threshold-sweep", "fraction-table")

# expected column contracts for each input kind, as produced by
# `contagionsim experiment ...`
GRID_COLUMNS = [
    "sender_rewires",
    "receiver_rewires",
    "family",
    "process",
    "mean_difference",
    "frac_positive",
    "replicates",
    "failures",
]
SWEEP_COLUMNS = ["threshold", "model", "term", "estimate", "std_error", "status"]
WAVE_COLUMNS = [
    "wave",
    "family",
    "process",
    "mean_difference",
    "frac_positive",
    "replicates",
    "failures",
]

# row order shared by the grid figure and the fraction table: continuous
# (linear-fit) rows first, binary (logistic-fit) rows below, asymmetric
# process before symmetric within each pair
PANEL_ROWS = [
    ("linear", "asymmetric"),
    ("linear", "symmetric"),
    ("logistic", "asymmetric"),
    ("logistic", "symmetric"),
]
FAMILY_LABEL = {"linear": "continuous", "logistic": "binary"}


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: where to read, what to draw, where to write."""

    input_path: Path
    kind: str
    output_path: Path
    caption: str = ""

    def __post_init__(self):
        object.__setattr__(self, "input_path", Path(self.input_path))
        object.__setattr__(self, "output_path", Path(self.output_path))
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def load_frame(spec: FigureSpec, required) -> pd.DataFrame:
    """Read the input CSV and check it carries the columns the kind needs."""
    try:
        frame = pd.read_csv(spec.input_path)
    except FileNotFoundError:
        raise ValueError(f"input file {spec.input_path} does not exist") from None
    except pd.errors.EmptyDataError:
        raise ValueError(f"input file {spec.input_path} is empty") from None
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise ValueError(
            f"{spec.input_path} does not look like {spec.kind} input: "
            f"missing columns {missing} (found {list(frame.columns)})"
        )
    if frame.empty:
        raise ValueError(f"{spec.input_path} has a header but no data rows")
    return frame


def _missing_combos(frame, combos):
    present = set(zip(frame["family"], frame["process"]))
    return [c for c in combos if c not in present]


def plot_asymmetry_grid(spec: FigureSpec) -> None:
    frame = load_frame(spec, GRID_COLUMNS)
    absent = _missing_combos(frame, PANEL_ROWS)
    if absent:
        raise ValueError(
            "asymmetry-grid input is missing (family, process) combinations: "
            f"{absent}"
        )
    senders = sorted(frame["sender_rewires"].unique())
    fig, axes = plt.subplots(
        len(PANEL_ROWS),
        len(senders),
        figsize=(2.1 * len(senders) + 1.5, 8.0),
        sharex=True,
        sharey="row",
        squeeze=False,
    )
    for r, (family, process) in enumerate(PANEL_ROWS):
        rows = frame[(frame["family"] == family) & (frame["process"] == process)]
        for c, sender in enumerate(senders):
            ax = axes[r][c]
            cell = rows[rows["sender_rewires"] == sender].sort_values("receiver_rewires")
            ax.axhline(0.0, color="0.6", linewidth=0.8, linestyle="--")
            ax.plot(
                cell["receiver_rewires"],
                cell["mean_difference"],
                marker="o",
                markersize=3.5,
                color="C0" if family == "linear" else "C3",
            )
            if r == 0:
                ax.set_title(f"sender rewires = {sender}", fontsize=9)
            if c == 0:
                ax.set_ylabel(
                    f"{process},\n{FAMILY_LABEL[family]}", fontsize=9
                )
            if r == len(PANEL_ROWS) - 1:
                ax.set_xlabel("receiver rewires", fontsize=9)
            ax.tick_params(labelsize=8)
    if spec.caption:
        fig.suptitle(spec.caption, fontsize=11)
        fig.tight_layout(rect=(0, 0, 1, 0.96))
    else:
        fig.tight_layout()
    fig.savefig(spec.output_path)
    plt.close(fig)


def plot_threshold_sweep(spec: FigureSpec) -> None:
    frame = load_frame(spec, SWEEP_COLUMNS)
    fitted = frame[(frame["status"] == "ok") & (frame["term"] != "")]
    if fitted.empty:
        raise ValueError(
            f"{spec.input_path} contains no successfully fitted rows to plot"
        )
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.axhline(0.0, color="0.6", linewidth=0.8, linestyle="--")
    for (model, term), rows in fitted.groupby(["model", "term"], sort=True):
        rows = rows.sort_values("threshold")
        ax.plot(
            rows["threshold"],
            rows["estimate"],
            marker="o",
            markersize=4,
            label=f"{model}: {term}",
        )
    ax.set_xlabel("dichotomization threshold")
    ax.set_ylabel("coefficient estimate")
    ax.legend(fontsize=8, loc="center left", bbox_to_anchor=(1.01, 0.5))
    if spec.caption:
        ax.set_title(spec.caption, fontsize=11)
    fig.tight_layout()
    fig.savefig(spec.output_path)
    plt.close(fig)


def render_fraction_table(spec: FigureSpec) -> None:
    frame = load_frame(spec, WAVE_COLUMNS)
    absent = _missing_combos(frame, PANEL_ROWS)
    if absent:
        raise ValueError(
            "fraction-table input is missing (family, process) combinations: "
            f"{absent}"
        )
    waves = sorted(frame["wave"].unique())
    header = ["P(difference > 0)"] + [f"Wave {w}" for w in waves]
    lines = []
    if spec.caption:
        lines.append(spec.caption)
        lines.append("")
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join(["---"] * len(header)) + "|")
    for family, process in PANEL_ROWS:
        rows = frame[(frame["family"] == family) & (frame["process"] == process)]
        by_wave = rows.set_index("wave")["frac_positive"]
        label = f"{process.capitalize()}, {FAMILY_LABEL[family]}"
        cells = [f"{by_wave[w]:.3f}" if w in by_wave.index else "" for w in waves]
        lines.append("| " + " | ".join([label] + cells) + " |")
    spec.output_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


RENDERERS = {
    "asymmetry-grid": plot_asymmetry_grid,
    "threshold-sweep": plot_threshold_sweep,
    "fraction-table": render_fraction_table,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot.py",
        description="Render one figure or table from a simulation result CSV.",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument(
        "--in", dest="input", required=True, metavar="CSV", help="input result CSV"
    )
    parser.add_argument(
        "--out", required=True, metavar="PATH", help="output image or text file"
    )
    parser.add_argument("--caption", default="", help="optional title text")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_path=Path(args.input),
        kind=args.kind,
        output_path=Path(args.out),
        caption=args.caption,
    )
    try:
        RENDERERS[spec.kind](spec)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {spec.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
