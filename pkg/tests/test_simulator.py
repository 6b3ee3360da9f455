from dataclasses import replace

import numpy as np
import pytest

from consim.netmodel import generate_network
from consim.protocol import ConfigError, LivenessError, ProtocolConfig, custom, hbft, poa
from consim.simulator import (
    SimulationConfig,
    derive_round_seed,
    network_for,
    round_samples,
    run_round,
    simulate,
)


@pytest.fixture(scope="module")
def baseline_graph():
    return generate_network(101, 0.06, 0.1, 1e6, seed=0)


def test_run_round_without_committee(baseline_graph):
    cfg = SimulationConfig(poa(101))
    s = run_round(baseline_graph, cfg, round_seed=5)
    assert s.committee == ()
    assert s.cct == 0.0 and s.cc_edges == 0
    assert s.bbl > 0 and s.bc_edges == baseline_graph.edge_count


def test_run_round_full_committee(baseline_graph):
    cfg = SimulationConfig(hbft(101))
    s = run_round(baseline_graph, cfg, round_seed=5)
    assert sorted(s.committee + (s.leader,)) == list(range(101))
    assert s.leader not in s.committee
    assert s.cct > 0 and s.cc_edges > 2 * 100 - 1


def test_run_round_is_deterministic(baseline_graph):
    cfg = SimulationConfig(custom(101, 30, 10))
    a = run_round(baseline_graph, cfg, 99)
    b = run_round(baseline_graph, cfg, 99)
    assert a == b
    assert len(a.committee) == 30 and len(set(a.committee)) == 30


def test_run_round_checks_graph_size(baseline_graph):
    with pytest.raises(ConfigError):
        run_round(baseline_graph, SimulationConfig(poa(50), n=50), 1)


def test_round_samples_agree_with_run_round():
    cfg = SimulationConfig(custom(101, 40, 12), simulation_rounds=20, seed=3)
    graph = network_for(cfg)
    cached = round_samples(cfg)
    for i in (0, 7, 19):
        assert cached[i] == run_round(graph, cfg, derive_round_seed(cfg.seed, i))


def test_round_seeds_are_distinct():
    seeds = {derive_round_seed(1, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert derive_round_seed(1, 0) != derive_round_seed(2, 0)


def test_poa_baseline_has_k5():
    pt = simulate(SimulationConfig(poa(101, 0.1)))
    assert pt.rates.confirmation_number == 5
    assert pt.mean_committee_rate == 0.0


def test_hbft_baseline_rates():
    pt = simulate(SimulationConfig(hbft(101, 0.1)))
    assert pt.rates.fork_rate == 0.0
    assert pt.rates.bandwidth_efficiency == 1.0 - pt.rates.committee_rate
    assert 0 < pt.rates.committee_rate < 0.01


def test_no_adversary():
    pt = simulate(SimulationConfig(custom(101, 20, 0, alpha=0.0)))
    assert pt.rates.block_rate == 1.0 and pt.rates.fork_rate == 0.0
    assert pt.latency == pt.rates.confirmation_number * pt.mean_interval


def test_poa_interval_is_mean_of_bbt_and_bbl():
    cfg = SimulationConfig(poa(101, 0.1, block_size_tx=800), seed=4)
    samples = round_samples(cfg)
    expected = np.mean([max(s.bbt, s.bbl) for s in samples])
    pt = simulate(cfg)
    assert pt.mean_interval == pytest.approx(expected, rel=1e-14)
    assert pt.mean_committee_rate == 0.0


def test_simulate_is_deterministic():
    cfg = SimulationConfig(hbft(101, 0.2), d_factor=0.3, seed=17)
    assert simulate(cfg) == simulate(replace(cfg))


@pytest.mark.parametrize("preset", [hbft, poa])
def test_mean_interval_monotone_in_block_size(preset):
    intervals = [simulate(SimulationConfig(preset(101, 0.1, block_size_tx=b), seed=2)).mean_interval
                 for b in range(40, 4001, 160)]
    assert all(b >= a for a, b in zip(intervals, intervals[1:]))


@pytest.mark.parametrize("seed", range(10))
def test_hbft_beats_poa_at_baseline(seed):
    h = simulate(SimulationConfig(hbft(101, 0.1), seed=seed))
    p = simulate(SimulationConfig(poa(101, 0.1), seed=seed))
    assert h.latency < p.latency and h.throughput > p.throughput


def test_product_identity():
    pt = simulate(SimulationConfig(custom(101, 50, 17), seed=8))
    r = pt.rates
    assert pt.throughput * pt.latency == pytest.approx(
        r.confirmation_number * pt.config_echo[2] * r.bandwidth_efficiency, rel=1e-9)


def test_dead_liveness_raises():
    # every committee of 100 holds 10 malicious members, so 100 honest endorsements never happen
    with pytest.raises(LivenessError):
        simulate(SimulationConfig(ProtocolConfig(100, 100, byzantine_ratio=0.1)))


@pytest.mark.parametrize("kwargs", [dict(simulation_rounds=0), dict(n=1), dict(p=0.0), dict(d_factor=0)])
def test_simulation_config_validation(kwargs):
    with pytest.raises(ConfigError):
        SimulationConfig(poa(101), **kwargs)


def test_committee_larger_than_network_rejected():
    with pytest.raises(ConfigError):
        SimulationConfig(ProtocolConfig(100, 0), n=50)
