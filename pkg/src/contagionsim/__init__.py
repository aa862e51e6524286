"""Simulation and estimation toolkit for directional peer effects on networks."""

__version__ = "0.1.0"

from .estimators import (
    BoundaryWarning,
    CfModelSpec,
    CollinearityError,
    FitResult,
    QadResult,
    SeparationError,
    StratumError,
    Term,
    fit_cf_model,
    fit_logistic,
    fit_ols,
    qad_fit,
    sar_loglik,
    sar_mle,
    sum_peer_effects,
)
from .experiments import (
    ASYMMETRY_GRID_COLUMNS,
    MODEL_SPECS,
    THRESHOLD_SWEEP_COLUMNS,
    WAVE_ASYMMETRY_COLUMNS,
    AsymmetryGridConfig,
    WaveAsymmetryConfig,
    generate_continuous_panel,
    run_asymmetry_grid,
    run_threshold_sweep,
    run_wave_asymmetry,
)
from .network import (
    DegreeSequences,
    DirectedNetwork,
    RewireWarning,
    degree_sequences,
    exposure,
    make_regular_network,
    rewire_receivers,
    rewire_senders,
    row_normalize,
    transpose,
)
from .outcomes import (
    ConvergenceWarning,
    IsingParams,
    PanelDataset,
    PanelGenSpec,
    SarParams,
    StabilityError,
    Wave,
    check_sar_stability,
    dichotomize,
    enumerate_states,
    generate_panel,
    ising_exact_distribution,
    ising_gibbs_sample,
    ising_gibbs_states,
    ising_node_energy,
    ising_total_energy,
    sar_generate,
    sar_power_series,
    sar_solve,
    state_index,
)
from .rng import substream

__all__ = [
    "ASYMMETRY_GRID_COLUMNS",
    "MODEL_SPECS",
    "THRESHOLD_SWEEP_COLUMNS",
    "WAVE_ASYMMETRY_COLUMNS",
    "AsymmetryGridConfig",
    "BoundaryWarning",
    "CfModelSpec",
    "CollinearityError",
    "ConvergenceWarning",
    "DegreeSequences",
    "DirectedNetwork",
    "FitResult",
    "IsingParams",
    "PanelDataset",
    "PanelGenSpec",
    "QadResult",
    "RewireWarning",
    "SarParams",
    "SeparationError",
    "StabilityError",
    "StratumError",
    "Term",
    "Wave",
    "WaveAsymmetryConfig",
    "check_sar_stability",
    "degree_sequences",
    "dichotomize",
    "enumerate_states",
    "exposure",
    "fit_cf_model",
    "fit_logistic",
    "fit_ols",
    "generate_continuous_panel",
    "generate_panel",
    "ising_exact_distribution",
    "ising_gibbs_sample",
    "ising_gibbs_states",
    "ising_node_energy",
    "ising_total_energy",
    "make_regular_network",
    "qad_fit",
    "rewire_receivers",
    "rewire_senders",
    "row_normalize",
    "run_asymmetry_grid",
    "run_threshold_sweep",
    "run_wave_asymmetry",
    "sar_generate",
    "sar_loglik",
    "sar_mle",
    "sar_power_series",
    "sar_solve",
    "state_index",
    "substream",
    "sum_peer_effects",
    "transpose",
]
