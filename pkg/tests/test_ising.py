"""Binary pairwise-energy model tests: energies, exact law, sampler."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contagionsim import (
    DirectedNetwork,
    IsingParams,
    enumerate_states,
    ising_exact_distribution,
    ising_gibbs_sample,
    ising_gibbs_states,
    ising_node_energy,
    ising_total_energy,
    make_regular_network,
    state_index,
    substream,
    transpose,
)


def edge01():
    return DirectedNetwork.from_edges(2, [(0, 1, 1.0)])


PARAMS = IsingParams(alpha=1.0, beta=1.0, gamma=2.0)


def test_two_node_energies_by_hand():
    # Oracle, by hand: node 0 owns the single edge.
    #   y=(1,1): E0 = 1 + 1*(1-1)^2 + 2*1*1 = 3, E1 = 1, total 4
    #   y=(1,0): E0 = 1 + 1*(1-0)^2 + 0    = 2, E1 = 0, total 2
    #   y=(0,1): E0 = 0 + 1*(0-1)^2 + 0    = 1, E1 = 1, total 2
    #   y=(0,0): total 0
    net = edge01()
    assert ising_node_energy(net, [1, 1], PARAMS, 0) == 3.0
    assert ising_node_energy(net, [1, 1], PARAMS, 1) == 1.0
    assert ising_total_energy(net, [1, 1], PARAMS) == 4.0
    assert ising_total_energy(net, [1, 0], PARAMS) == 2.0
    assert ising_total_energy(net, [0, 1], PARAMS) == 2.0
    assert ising_total_energy(net, [0, 0], PARAMS) == 0.0


def test_two_node_exact_distribution_by_hand():
    # weights e^4, e^2, e^2, e^0; P((1,1)) = e^4 / (1 + e^2)^2
    p = ising_exact_distribution(edge01(), PARAMS)
    denom = (1.0 + math.e**2) ** 2
    assert p[state_index([1, 1])] == pytest.approx(math.e**4 / denom, rel=1e-12)
    assert p[state_index([1, 0])] == pytest.approx(math.e**2 / denom, rel=1e-12)
    assert p[state_index([0, 0])] == pytest.approx(1.0 / denom, rel=1e-12)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_exact_distribution_matches_per_state_energies():
    # Independent oracle: brute-force the normalizing constant from
    # per-node energies summed one state at a time.
    net = make_regular_network(6, 2, substream(21, "ising-net"))
    params = IsingParams(-0.3, 0.4, 0.8)
    states = enumerate_states(6)
    logw = np.array(
        [
            sum(ising_node_energy(net, s, params, i) for i in range(6))
            for s in states
        ]
    )
    expected = np.exp(logw - logw.max())
    expected /= expected.sum()
    np.testing.assert_allclose(ising_exact_distribution(net, params), expected, atol=1e-12)


def test_total_energy_sums_node_energies():
    net = make_regular_network(8, 2, substream(22, "sum"))
    y = substream(22, "sum-y").integers(0, 2, size=8)
    total = sum(ising_node_energy(net, y, PARAMS, i) for i in range(8))
    assert ising_total_energy(net, y, PARAMS) == pytest.approx(total, rel=1e-12)


def test_energy_direction_blind_bitwise():
    # (a-b)^2 and a*b are symmetric in (a, b), and transpose keeps storage
    # order, so the energy of every state is the same float exactly.
    net = make_regular_network(10, 3, substream(23, "dir"))
    rev = transpose(net)
    rng = substream(23, "dir-y")
    for params in (PARAMS, IsingParams(0.5, -0.7, 1.3)):
        for _ in range(50):
            y = rng.integers(0, 2, size=10)
            assert ising_total_energy(net, y, params) == ising_total_energy(rev, y, params)


def test_exact_distribution_direction_blind():
    net = make_regular_network(7, 2, substream(24, "dirp"))
    p_fwd = ising_exact_distribution(net, PARAMS)
    p_rev = ising_exact_distribution(transpose(net), PARAMS)
    assert np.array_equal(p_fwd, p_rev)


def test_state_encoding_roundtrip():
    states = enumerate_states(5)
    for i in (0, 1, 7, 19, 31):
        assert state_index(states[i]) == i


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=12))
def test_state_index_bit_encoding(bits):
    expected = sum(b << j for j, b in enumerate(bits))
    assert state_index(np.array(bits)) == expected


def test_enumeration_size_limit():
    with pytest.raises(ValueError):
        enumerate_states(15)


def test_binary_validation():
    net = edge01()
    with pytest.raises(ValueError):
        ising_total_energy(net, [0, 2], PARAMS)
    with pytest.raises(ValueError):
        ising_total_energy(net, [0, 1, 0], PARAMS)


def test_gibbs_deterministic_given_stream():
    net = make_regular_network(12, 2, substream(25, "gdet"))
    a = ising_gibbs_sample(net, PARAMS, 20, substream(25, "gdraw"))
    b = ising_gibbs_sample(net, PARAMS, 20, substream(25, "gdraw"))
    np.testing.assert_array_equal(a, b)
    assert set(np.unique(a)).issubset({0, 1})


def test_gibbs_states_shape_and_values():
    net = make_regular_network(9, 2, substream(26, "gst"))
    states = ising_gibbs_states(net, PARAMS, 40, substream(26, "gst-d"), burn_in=10, chains=4)
    assert states.shape == (40, 9)
    assert set(np.unique(states)).issubset({0, 1})


def test_gibbs_tracks_exact_distribution():
    # total-variation agreement on a small network; the strict acceptance
    # version runs a larger budget.
    net = make_regular_network(5, 1, substream(27, "gtv"))
    params = IsingParams(0.2, 0.3, 0.6)
    exact = ising_exact_distribution(net, params)
    states = ising_gibbs_states(
        net, params, 40_000, substream(27, "gtv-d"), burn_in=300, chains=20
    )
    idx = states @ (1 << np.arange(5))
    emp = np.bincount(idx, minlength=32) / states.shape[0]
    tv = 0.5 * np.abs(emp - exact).sum()
    assert tv < 0.03


def test_positive_gamma_increases_concordance():
    net = make_regular_network(8, 2, substream(28, "conc"))
    states = enumerate_states(8)
    concordance = (states[:, net.src] * states[:, net.dst]) @ net.weight
    lo = ising_exact_distribution(net, IsingParams(0.0, 0.2, 0.0)) @ concordance
    hi = ising_exact_distribution(net, IsingParams(0.0, 0.2, 1.5)) @ concordance
    assert hi > lo


def test_gibbs_sweeps_validation():
    with pytest.raises(ValueError):
        ising_gibbs_sample(edge01(), PARAMS, 0, substream(0, "bad"))
