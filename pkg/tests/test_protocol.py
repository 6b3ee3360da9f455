import math

import pytest
from hypothesis import given, strategies as st

from consim.protocol import (
    FIXED,
    ConfigError,
    DegenerateSecurityError,
    LivenessError,
    ProtocolConfig,
    ZeroIntervalError,
    block_broadcast_time,
    block_interval,
    block_rate,
    byzantine_number,
    committee_rate,
    confirmation_number,
    custom,
    fork_rate,
    hbft,
    latency,
    poa,
    rate_bundle,
    throughput,
)
from oracles import monte_carlo_rates


@pytest.mark.parametrize("n, alpha, f", [(101, 0.1, 10), (101, 0.0, 0), (1001, 0.3, 300), (101, 0.7, 70)])
def test_byzantine_number(n, alpha, f):
    assert byzantine_number(n, alpha) == f


def test_fork_rate_examples():
    assert fork_rate(101, 0.1, 0, 0) == 0.1
    assert fork_rate(101, 0.1, 100, 20) == 0.0
    # Hyp(4, 1, 2): 3 of the 6 committees hold the one malicious non-leader
    assert fork_rate(5, 0.4, 2, 1) == pytest.approx(0.2, abs=1e-15)
    assert fork_rate(101, 0.1, 100, 20, override=0.001) == 0.001


def test_block_rate_examples():
    assert block_rate(101, 0.1, 0, 0) == 0.9
    assert block_rate(101, 0.1, 100, 20) == 0.9
    # Hyp(4, 2, 2): 1 of 6 committees is all-honest
    assert block_rate(5, 0.4, 2, 2) == pytest.approx(0.1, abs=1e-15)


@pytest.mark.parametrize("c, d", [(101, 0), (5, 6), (-1, 0)])
def test_rates_reject_bad_committee(c, d):
    with pytest.raises(ConfigError):
        fork_rate(101, 0.1, c, d)
    with pytest.raises(ConfigError):
        block_rate(101, 0.1, c, d)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.2, 0.3, 0.49])
def test_poa_boundary_rates_exact(alpha):
    assert fork_rate(101, alpha, 0, 0) == alpha
    assert block_rate(101, alpha, 0, 0) == 1 - alpha


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.2, 0.3, 0.33])
def test_hbft_boundary_rates_exact(alpha):
    p = hbft(101, alpha)
    assert fork_rate(101, alpha, p.committee_size, p.endorsement_size) == 0.0
    assert block_rate(101, alpha, p.committee_size, p.endorsement_size) == 1 - alpha


@pytest.mark.parametrize("n, alpha, c, d", [
    (5, 0.4, 2, 1), (5, 0.4, 2, 2), (10, 0.2, 5, 2), (12, 0.3, 6, 3),
    (16, 0.25, 8, 1), (20, 0.25, 10, 6), (20, 0.15, 19, 6), (15, 0.2, 7, 0),
])
def test_rates_match_committee_monte_carlo(n, alpha, c, d):
    f = byzantine_number(n, alpha)
    fr, fr_se, br, br_se = monte_carlo_rates(n, f, alpha, c, d, 1_000_000, seed=n * 100 + c * 10 + d)
    assert abs(fork_rate(n, alpha, c, d) - fr) <= 3 * fr_se + 1e-12
    assert abs(block_rate(n, alpha, c, d) - br) <= 3 * br_se + 1e-12


@given(st.integers(3, 60), st.floats(0.0, 0.49), st.data())
def test_rates_in_unit_interval_and_monotone_in_d(n, alpha, data):
    c = data.draw(st.integers(0, n - 1))
    prev_f, prev_b = 2.0, 2.0
    for d in range(c + 1):
        f_, b_ = fork_rate(n, alpha, c, d), block_rate(n, alpha, c, d)
        assert 0.0 <= f_ <= 1.0 and 0.0 <= b_ <= 1.0
        assert f_ <= prev_f + 1e-15 and b_ <= prev_b + 1e-15
        prev_f, prev_b = f_, b_


@given(st.integers(3, 60), st.data())
def test_block_rate_non_increasing_in_alpha(n, data):
    c = data.draw(st.integers(0, n - 1))
    d = data.draw(st.integers(0, c))
    alphas = sorted(data.draw(st.lists(st.floats(0.0, 0.9), min_size=2, max_size=6)))
    rates = [block_rate(n, a, c, d) for a in alphas]
    assert all(b <= a + 1e-15 for a, b in zip(rates, rates[1:]))


def test_confirmation_number_examples():
    prob = poa(101, 0.1)
    assert confirmation_number(prob, 0.1) == 5
    assert confirmation_number(hbft(101, 0.1), 0.1) == 3
    assert confirmation_number(prob, 0.001) == 2
    assert confirmation_number(prob, 0.0) == 1
    with pytest.raises(DegenerateSecurityError):
        confirmation_number(prob, 1.0)


@given(st.floats(1e-6, 0.999), st.floats(1e-12, 0.5))
def test_confirmation_number_is_least_power_below_eps(f_rate, eps):
    cfg = poa(101, 0.1, security_level=eps)
    k = confirmation_number(cfg, f_rate)
    # the 1e-9 slack in the ceiling admits powers within a relative 1e-9 * |log eps| of eps
    slack = math.exp(1e-8 * abs(math.log(eps)))
    assert f_rate ** k <= eps * slack
    assert k == 1 or f_rate ** (k - 1) > eps


def test_committee_rate_examples():
    assert committee_rate(0, 303, 100, 1e6) == 0.0
    assert committee_rate(100, 100, 5000, 5000) == 0.5
    assert committee_rate(300, 300, 100, 1e6) == pytest.approx(100 / (100 + 1e6), rel=1e-12)
    with pytest.raises(ValueError):
        committee_rate(1, 0, 100, 1e6)


def test_block_interval_examples():
    assert block_interval(1.0, 0.0, 3.0) == 3.0
    assert block_interval(4.0, 2.0, 3.0) == 4.0
    assert block_interval(0.0, 0.0, 0.0) == 0.0


def test_block_broadcast_time_examples():
    assert block_broadcast_time(2000, 500, 1e6) == 1.0
    assert block_broadcast_time(0, 500, 1e6) == 0.0
    assert block_broadcast_time(4000, 500, 1e6) == 2.0


def test_throughput_examples():
    assert throughput(2000, 2.0, 0.9, 1.0) == pytest.approx(900)
    assert throughput(2000, 2.0, 0.0, 1.0) == 0.0
    assert throughput(2000, 2.0, 0.9, 0.9) == pytest.approx(810)
    with pytest.raises(ZeroIntervalError):
        throughput(2000, 0.0, 0.9, 1.0)


def test_latency_examples():
    assert latency(3, 0.9, 2.0) == pytest.approx(6.666666666666667)
    assert latency(5, 0.9, 2.0) == pytest.approx(11.11111111111111)
    assert latency(1, 1.0, 1.0) == 1.0
    with pytest.raises(LivenessError):
        latency(3, 0.0, 2.0)


@given(st.integers(1, 10_000), st.floats(0.01, 100), st.floats(0.01, 1.0),
       st.floats(0.0, 0.99), st.floats(0.0, 0.99), st.integers(1, 20))
def test_throughput_latency_product_identity(b, interval, b_rate, f_rate, c_rate, k):
    b_eff = (1 - f_rate) * (1 - c_rate)
    t = throughput(b, interval, b_rate, b_eff)
    l = latency(k, b_rate, interval)
    assert t * l == pytest.approx(k * b * b_eff, rel=1e-12)


def test_rate_bundle():
    bundle = rate_bundle(poa(101, 0.1), 101, c_rate=0.0)
    assert (bundle.fork_rate, bundle.block_rate, bundle.confirmation_number) == (0.1, 0.9, 5)
    assert bundle.bandwidth_efficiency == (1 - bundle.fork_rate) * (1 - bundle.committee_rate)
    bundle = rate_bundle(hbft(101, 0.1), 101, c_rate=0.01)
    assert bundle.fork_rate == 0.0 and bundle.byzantine_number == 10
    assert bundle.bandwidth_efficiency == 0.99
    overridden = rate_bundle(poa(101, 0.1, fork_rate_override=0.001), 101)
    assert overridden.fork_rate == 0.001 and overridden.confirmation_number == 2


def test_presets():
    h = hbft(101, 0.1)
    assert (h.committee_size, h.endorsement_size, h.confirmation_rule, h.fixed_confirmations) == (100, 20, FIXED, 3)
    p = poa(101, 0.1)
    assert (p.committee_size, p.endorsement_size) == (0, 0)
    with pytest.raises(ConfigError):
        hbft(101, 0.5)
    assert custom(101, 25, 9).name == "C25d9"


@pytest.mark.parametrize("kwargs", [
    dict(byzantine_ratio=1.0), dict(byzantine_ratio=-0.1), dict(security_level=0.0),
    dict(block_size_tx=0), dict(tx_size_bytes=0), dict(endorsement_size=11),
    dict(confirmation_rule="fixed"), dict(confirmation_rule="vote"), dict(fork_rate_override=2.0),
])
def test_protocol_config_validation(kwargs):
    args = dict(committee_size=10, endorsement_size=5) | kwargs
    with pytest.raises(ConfigError):
        ProtocolConfig(**args)
