"""Binary panel generator tests."""
import numpy as np
import pytest

from contagionsim import (
    DirectedNetwork,
    PanelDataset,
    PanelGenSpec,
    Wave,
    generate_panel,
    make_regular_network,
    substream,
)


def test_structure_and_covariates():
    net = make_regular_network(40, 2, substream(31, "pnet"))
    spec = PanelGenSpec(mu=0.0, alpha_ego=0.5, beta_lag=0.2, gamma_contemp=0.3,
                        delta=(0.5, -1.0), waves=4)
    panel = generate_panel(net, spec, substream(31, "pdraw"))
    assert panel.n_waves == 4
    assert panel.n == 40
    assert panel.n_covariates == 2
    for wave in panel.waves:
        assert wave.network is net
        assert set(np.unique(wave.outcomes)).issubset({0, 1})
        assert wave.covariates.shape == (40, 2)


def test_deterministic_given_stream():
    net = make_regular_network(30, 2, substream(32, "pnet"))
    spec = PanelGenSpec(mu=-0.5, alpha_ego=1.0, beta_lag=0.3, gamma_contemp=0.4, waves=3)
    a = generate_panel(net, spec, substream(32, "pd"))
    b = generate_panel(net, spec, substream(32, "pd"))
    for wa, wb in zip(a.waves, b.waves):
        np.testing.assert_array_equal(wa.outcomes, wb.outcomes)


def test_initial_prevalence_extremes():
    net = make_regular_network(25, 2, substream(33, "pnet"))
    spec0 = PanelGenSpec(mu=0.0, alpha_ego=0.0, beta_lag=0.0, gamma_contemp=0.0,
                         initial_prevalence=0.0)
    spec1 = PanelGenSpec(mu=0.0, alpha_ego=0.0, beta_lag=0.0, gamma_contemp=0.0,
                         initial_prevalence=1.0)
    assert generate_panel(net, spec0, substream(33, "a")).waves[0].outcomes.sum() == 0
    assert generate_panel(net, spec1, substream(33, "b")).waves[0].outcomes.sum() == 25


def test_null_model_marginals():
    # with every coefficient zero each wave is iid Bernoulli(1/2)
    net = make_regular_network(4000, 2, substream(34, "pnet"))
    spec = PanelGenSpec(mu=0.0, alpha_ego=0.0, beta_lag=0.0, gamma_contemp=0.0, waves=3)
    panel = generate_panel(net, spec, substream(34, "pd"))
    for wave in panel.waves:
        assert abs(wave.outcomes.mean() - 0.5) < 0.03


def test_own_lag_persistence():
    # mu=-2, alpha=4: stay probability sigmoid(2) ~ .881, entry sigmoid(-2) ~ .119
    net = make_regular_network(5000, 2, substream(35, "pnet"))
    spec = PanelGenSpec(mu=-2.0, alpha_ego=4.0, beta_lag=0.0, gamma_contemp=0.0, waves=2)
    panel = generate_panel(net, spec, substream(35, "pd"))
    prev, cur = panel.waves[0].outcomes, panel.waves[1].outcomes
    stay = cur[prev == 1].mean()
    enter = cur[prev == 0].mean()
    assert abs(stay - 0.8808) < 0.03
    assert abs(enter - 0.1192) < 0.03


def test_positive_contagion_raises_prevalence():
    net = make_regular_network(3000, 2, substream(36, "pnet"))
    base = dict(mu=-1.0, alpha_ego=0.0, beta_lag=0.0, waves=2)
    off = generate_panel(net, PanelGenSpec(gamma_contemp=0.0, **base), substream(36, "pd"))
    on = generate_panel(net, PanelGenSpec(gamma_contemp=1.5, **base), substream(36, "pd"))
    assert on.waves[1].outcomes.mean() > off.waves[1].outcomes.mean() + 0.05


def test_spec_validation():
    with pytest.raises(ValueError):
        PanelGenSpec(mu=0, alpha_ego=0, beta_lag=0, gamma_contemp=0, waves=1)
    with pytest.raises(ValueError):
        PanelGenSpec(mu=0, alpha_ego=0, beta_lag=0, gamma_contemp=0, initial_prevalence=1.5)
    with pytest.raises(ValueError):
        PanelGenSpec(mu=0, alpha_ego=0, beta_lag=0, gamma_contemp=0,
                     delta=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        PanelGenSpec(mu=float("inf"), alpha_ego=0, beta_lag=0, gamma_contemp=0)


def test_wave_and_dataset_validation():
    net = DirectedNetwork.from_edges(3, [(0, 1, 1.0)])
    with pytest.raises(ValueError):
        Wave(net, [0, 1], np.zeros((3, 0)))
    with pytest.raises(ValueError):
        Wave(net, [0, 1, 1], np.zeros((2, 1)))
    other = DirectedNetwork.from_edges(4, [(0, 1, 1.0)])
    w3 = Wave(net, [0, 1, 1], np.zeros((3, 0)))
    w4 = Wave(other, [0, 1, 1, 0], np.zeros((4, 0)))
    with pytest.raises(ValueError):
        PanelDataset((w3, w4))
    with pytest.raises(ValueError):
        PanelDataset(())
