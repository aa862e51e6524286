"""Experiment protocols: rewiring grids, per-wave fraction tables, threshold sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np
import pandas as pd

from .estimators import (
    CfModelSpec,
    CollinearityError,
    SeparationError,
    StratumError,
    fit_cf_model,
    qad_fit,
)
from .network import DirectedNetwork, make_regular_network, rewire_receivers, rewire_senders
from .outcomes import (
    PanelDataset,
    SarParams,
    StabilityError,
    Wave,
    dichotomize,
    sar_generate,
)
from .rng import substream

ASYMMETRY_GRID_COLUMNS = [
    "sender_rewires",
    "receiver_rewires",
    "family",
    "process",
    "mean_difference",
    "frac_positive",
    "replicates",
    "failures",
]

WAVE_ASYMMETRY_COLUMNS = [
    "wave",
    "family",
    "process",
    "mean_difference",
    "frac_positive",
    "replicates",
    "failures",
]

THRESHOLD_SWEEP_COLUMNS = ["threshold", "model", "term", "estimate", "std_error", "status"]

MODEL_SPECS = {
    "M1": CfModelSpec(("contemporaneous", "lag1")),
    "M2": CfModelSpec(("lag1", "lag2")),
    "M3": CfModelSpec(("sum", "difference")),
}

_FIT_FAILURES = (CollinearityError, SeparationError, StabilityError)


@dataclass(frozen=True)
class AsymmetryGridConfig:
    """Grid of rewiring intensities crossed with two generating processes."""

    n: int = 200
    outdegree: int = 1
    sender_rewires: tuple[int, ...] = (0, 50, 100, 150, 200)
    receiver_rewires: tuple[int, ...] = (0, 50, 100, 150, 200)
    networks_per_cell: int = 10
    outcomes_per_network: int = 100
    sar_asymmetric: SarParams = field(default_factory=lambda: SarParams(0.4, 0.0))
    sar_symmetric: SarParams = field(default_factory=lambda: SarParams(0.2, 0.2))
    threshold: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sender_rewires", tuple(int(k) for k in self.sender_rewires))
        object.__setattr__(self, "receiver_rewires", tuple(int(k) for k in self.receiver_rewires))
        if not self.sender_rewires or not self.receiver_rewires:
            raise ValueError("rewiring grids must be non-empty")
        if self.networks_per_cell < 1 or self.outcomes_per_network < 1:
            raise ValueError("networks_per_cell and outcomes_per_network must be >= 1")


@dataclass(frozen=True)
class WaveAsymmetryConfig:
    """Per-network fraction table settings."""

    outcomes_per_network: int = 1000
    sar_asymmetric: SarParams = field(default_factory=lambda: SarParams(0.4, 0.0))
    sar_symmetric: SarParams = field(default_factory=lambda: SarParams(0.2, 0.2))
    threshold: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.outcomes_per_network < 1:
            raise ValueError("outcomes_per_network must be >= 1")


def _qad_differences(net, z_matrix, threshold):
    """Per-family difference lists and failure counts over outcome columns."""
    diffs = {"linear": [], "logistic": []}
    failures = {"linear": 0, "logistic": 0}
    for col in range(z_matrix.shape[1]):
        z = z_matrix[:, col]
        try:
            diffs["linear"].append(qad_fit(net, z, "linear").difference)
        except _FIT_FAILURES:
            failures["linear"] += 1
        y = dichotomize(z, threshold)
        try:
            diffs["logistic"].append(qad_fit(net, y, "logistic").difference)
        except _FIT_FAILURES:
            failures["logistic"] += 1
    return diffs, failures


def _summary_row(base, family, process, diffs, failed, total):
    arr = np.asarray(diffs, dtype=np.float64)
    row = dict(base)
    row.update(
        family=family,
        process=process,
        mean_difference=float(arr.mean()) if arr.size else float("nan"),
        frac_positive=float((arr > 0).mean()) if arr.size else float("nan"),
        replicates=int(arr.size),
        failures=int(failed),
    )
    assert row["replicates"] + row["failures"] == total
    return row


def run_asymmetry_grid(config: AsymmetryGridConfig) -> pd.DataFrame:
    """QAD difference summaries over a sender-by-receiver rewiring grid.

    Every cell draws fresh networks (regular, then receiver and sender
    rewiring) and simulates both processes on each; the linear family uses
    the continuous outcomes, the logistic family their dichotomized
    version. Failed fits are excluded from the summaries and counted.
    """
    processes = (("asymmetric", config.sar_asymmetric), ("symmetric", config.sar_symmetric))
    rows = []
    cells = list(product(config.sender_rewires, config.receiver_rewires))
    for ci, (ks, kr) in enumerate(cells):
        diffs = {(f, p): [] for f in ("linear", "logistic") for p, _ in processes}
        fails = {key: 0 for key in diffs}
        for j in range(config.networks_per_cell):
            rng_net = substream(config.seed, "grid-net", ci, j)
            net = make_regular_network(config.n, config.outdegree, rng_net)
            net = rewire_receivers(net, min(kr, net.m), rng_net)
            net = rewire_senders(net, min(ks, net.m), rng_net)
            for process, params in processes:
                rng_out = substream(config.seed, "grid-out", ci, j, process)
                try:
                    z = sar_generate(net, params, rng_out, size=config.outcomes_per_network)
                except StabilityError:
                    fails[("linear", process)] += config.outcomes_per_network
                    fails[("logistic", process)] += config.outcomes_per_network
                    continue
                d, f = _qad_differences(net, z, config.threshold)
                for family in ("linear", "logistic"):
                    diffs[(family, process)].extend(d[family])
                    fails[(family, process)] += f[family]
        total = config.networks_per_cell * config.outcomes_per_network
        base = {"sender_rewires": ks, "receiver_rewires": kr}
        for family in ("linear", "logistic"):
            for process, _ in processes:
                rows.append(
                    _summary_row(base, family, process, diffs[(family, process)],
                                 fails[(family, process)], total)
                )
    return pd.DataFrame(rows, columns=ASYMMETRY_GRID_COLUMNS)


def run_wave_asymmetry(networks, config: WaveAsymmetryConfig) -> pd.DataFrame:
    """Fraction tables over a sequence of observed networks (pseudo-waves).

    For every network, simulates both processes outcomes_per_network times
    and reports the mean difference and the fraction of positive
    differences for all four family-by-process combinations.
    """
    networks = list(networks)
    if not networks:
        raise ValueError("at least one network is required")
    processes = (("asymmetric", config.sar_asymmetric), ("symmetric", config.sar_symmetric))
    rows = []
    for w, net in enumerate(networks, start=1):
        for process, params in processes:
            rng_out = substream(config.seed, "wave-out", w, process)
            try:
                z = sar_generate(net, params, rng_out, size=config.outcomes_per_network)
            except StabilityError:
                for family in ("linear", "logistic"):
                    rows.append(
                        _summary_row({"wave": w}, family, process, [],
                                     config.outcomes_per_network,
                                     config.outcomes_per_network)
                    )
                continue
            d, f = _qad_differences(net, z, config.threshold)
            for family in ("linear", "logistic"):
                rows.append(
                    _summary_row({"wave": w}, family, process, d[family], f[family],
                                 config.outcomes_per_network)
                )
    return pd.DataFrame(rows, columns=WAVE_ASYMMETRY_COLUMNS)


def generate_continuous_panel(
    net: DirectedNetwork,
    waves: int,
    sar_params: SarParams,
    persistence: float,
    rng: np.random.Generator,
) -> tuple[PanelDataset, np.ndarray]:
    """Continuous panel trajectories: autoregressive innovations plus ego persistence.

    Wave 1 is one process draw; each later wave is persistence times the
    previous wave plus a fresh draw. Returns a panel whose binary outcomes
    are the values dichotomized at the pooled median (callers typically
    re-dichotomize at other thresholds) together with the (waves, n) value
    matrix.
    """
    if waves < 2:
        raise ValueError("a panel needs at least 2 waves")
    if not 0.0 <= persistence < 1.0:
        raise ValueError("persistence must be in [0, 1)")
    values = np.empty((waves, net.n))
    values[0] = sar_generate(net, sar_params, rng)
    for t in range(1, waves):
        values[t] = persistence * values[t - 1] + sar_generate(net, sar_params, rng)
    median = float(np.median(values))
    panel = PanelDataset(
        tuple(
            Wave(net, dichotomize(values[t], median), np.zeros((net.n, 0)))
            for t in range(waves)
        )
    )
    return panel, values


def run_threshold_sweep(
    panel: PanelDataset,
    underlying: np.ndarray,
    thresholds,
    models=("M1", "M2", "M3"),
) -> pd.DataFrame:
    """Refit the transition models after dichotomizing at each threshold.

    underlying holds the continuous per-wave values, shape (waves, n). One
    row per (threshold, model, term); a model that cannot be fit at a
    threshold yields a single flagged row instead of raising.
    """
    thresholds = [float(c) for c in thresholds]
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly increasing")
    underlying = np.asarray(underlying, dtype=np.float64)
    if underlying.shape != (panel.n_waves, panel.n):
        raise ValueError(
            f"underlying values must have shape ({panel.n_waves}, {panel.n}), "
            f"got {underlying.shape}"
        )
    lo, hi = underlying.min(), underlying.max()
    outside = [c for c in thresholds if not lo < c < hi]
    if outside:
        raise ValueError(
            f"thresholds {outside} fall outside the observed value range "
            f"({lo:.3f}, {hi:.3f})"
        )
    unknown = [m for m in models if m not in MODEL_SPECS]
    if unknown:
        raise ValueError(f"unknown models {unknown}; valid: {sorted(MODEL_SPECS)}")

    rows = []
    for c in thresholds:
        binary = PanelDataset(
            tuple(
                Wave(w.network, dichotomize(underlying[t], c), w.covariates)
                for t, w in enumerate(panel.waves)
            )
        )
        for model in models:
            try:
                fit = fit_cf_model(binary, MODEL_SPECS[model])
            except (CollinearityError, SeparationError, StratumError) as err:
                rows.append(
                    {
                        "threshold": c,
                        "model": model,
                        "term": "",
                        "estimate": float("nan"),
                        "std_error": float("nan"),
                        "status": f"failed: {err}",
                    }
                )
                continue
            for term in fit.terms:
                rows.append(
                    {
                        "threshold": c,
                        "model": model,
                        "term": term.name,
                        "estimate": term.estimate,
                        "std_error": term.std_error,
                        "status": "ok",
                    }
                )
    return pd.DataFrame(rows, columns=THRESHOLD_SWEEP_COLUMNS)
