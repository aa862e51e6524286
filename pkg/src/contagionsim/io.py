"""CSV readers/writers and the metadata sidecar convention.

Every write_* helper that lands on disk gets a JSON sidecar at
``<path>.meta.json`` carrying the seed, the resolved configuration and
library versions, written before the data file itself.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .network import DirectedNetwork
from .outcomes import PanelDataset, Wave


def sidecar_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def write_sidecar(path, payload: dict) -> Path:
    """Write the metadata sidecar for an output file; returns the sidecar path."""
    meta = {
        "versions": {
            "contagionsim": __version__,
            "numpy": np.__version__,
            "pandas": pd.__version__,
        }
    }
    meta.update(payload)
    side = sidecar_path(path)
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return side


def write_edgelist(net: DirectedNetwork, path, meta: dict | None = None) -> None:
    if meta is not None:
        write_sidecar(path, {**meta, "n": net.n})
    frame = pd.DataFrame({"src": net.src, "dst": net.dst, "weight": net.weight})
    frame.to_csv(path, index=False)


def read_edgelist(path, n: int | None = None) -> DirectedNetwork:
    """Read a src,dst,weight edge CSV; node count inferred as max index + 1
    unless given explicitly."""
    frame = pd.read_csv(path)
    missing = {"src", "dst", "weight"} - set(frame.columns)
    if missing:
        raise ValueError(f"edge list {path} lacks columns {sorted(missing)}")
    if n is None:
        n = int(max(frame["src"].max(), frame["dst"].max())) + 1 if len(frame) else 1
    return DirectedNetwork(
        n,
        frame["src"].to_numpy(np.int64),
        frame["dst"].to_numpy(np.int64),
        frame["weight"].to_numpy(np.float64),
    )


def write_outcomes(values, path, binary: bool, meta: dict | None = None) -> None:
    values = np.asarray(values)
    if meta is not None:
        write_sidecar(path, meta)
    col = "y" if binary else "value"
    data = values.astype(np.int64) if binary else values.astype(np.float64)
    pd.DataFrame({"node": np.arange(values.shape[0]), col: data}).to_csv(path, index=False)


def read_outcomes(path) -> tuple[np.ndarray, bool]:
    """Read an outcome CSV; returns (values, is_binary) keyed off the header."""
    frame = pd.read_csv(path)
    if "y" in frame.columns:
        col, binary = "y", True
    elif "value" in frame.columns:
        col, binary = "value", False
    else:
        raise ValueError(f"outcome file {path} needs a 'y' or 'value' column")
    if "node" not in frame.columns:
        raise ValueError(f"outcome file {path} needs a 'node' column")
    frame = frame.sort_values("node")
    values = frame[col].to_numpy()
    return (values.astype(np.int64) if binary else values.astype(np.float64)), binary


def write_panel(panel: PanelDataset, path, meta: dict | None = None) -> None:
    """Long-format panel CSV: wave (1-based), node, y, then x1..xp."""
    if meta is not None:
        write_sidecar(path, meta)
    rows = []
    for t, wave in enumerate(panel.waves, start=1):
        block = {"wave": t, "node": np.arange(panel.n), "y": wave.outcomes}
        for j in range(panel.n_covariates):
            block[f"x{j + 1}"] = wave.covariates[:, j]
        rows.append(pd.DataFrame(block))
    pd.concat(rows, ignore_index=True).to_csv(path, index=False)


def read_panel(path, networks) -> PanelDataset:
    """Rebuild a panel from CSV plus its per-wave networks.

    networks may be one network (reused for every wave) or a sequence with
    one entry per wave.
    """
    frame = pd.read_csv(path)
    needed = {"wave", "node", "y"}
    missing = needed - set(frame.columns)
    if missing:
        raise ValueError(f"panel file {path} lacks columns {sorted(missing)}")
    cov_cols = sorted(
        (c for c in frame.columns if c.startswith("x") and c[1:].isdigit()),
        key=lambda c: int(c[1:]),
    )
    wave_ids = sorted(frame["wave"].unique())
    if isinstance(networks, DirectedNetwork):
        networks = [networks] * len(wave_ids)
    networks = list(networks)
    if len(networks) != len(wave_ids):
        raise ValueError(
            f"got {len(networks)} networks for {len(wave_ids)} panel waves"
        )
    waves = []
    for t, net in zip(wave_ids, networks):
        block = frame[frame["wave"] == t].sort_values("node")
        if len(block) != net.n:
            raise ValueError(
                f"wave {t} has {len(block)} rows but the network has {net.n} nodes"
            )
        cov = block[cov_cols].to_numpy(np.float64) if cov_cols else np.zeros((net.n, 0))
        waves.append(Wave(net, block["y"].to_numpy(np.int64), cov))
    return PanelDataset(tuple(waves))


def write_fit_result(fit, path, meta: dict | None = None) -> None:
    """FitResult CSV: term,estimate,std_error rows in term order."""
    if meta is not None:
        write_sidecar(path, meta)
    frame = pd.DataFrame(
        {
            "term": [t.name for t in fit.terms],
            "estimate": [t.estimate for t in fit.terms],
            "std_error": [t.std_error for t in fit.terms],
        }
    )
    frame.to_csv(path, index=False)


def write_qad_result(result, path, meta: dict | None = None) -> None:
    if meta is not None:
        write_sidecar(path, meta)
    frame = pd.DataFrame(
        [
            {
                "family": result.family,
                "forward": result.forward,
                "reverse": result.reverse,
                "difference": result.difference,
            }
        ]
    )
    frame.to_csv(path, index=False)


def write_table(frame: pd.DataFrame, path, meta: dict | None = None) -> None:
    """Write an experiment result table with its sidecar."""
    if meta is not None:
        write_sidecar(path, meta)
    frame.to_csv(path, index=False)
