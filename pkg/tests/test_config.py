import json

import pytest

from consim.config import ConfigFileError, build_config, dump_config, load_config, parse_config
from consim.protocol import FIXED, custom, hbft, poa
from consim.simulator import SimulationConfig


def test_empty_file_gives_baseline(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    cfg = load_config(path)
    assert cfg == SimulationConfig(poa(101, 0.1))
    assert (cfg.n, cfg.p, cfg.d_factor, cfg.bandwidth) == (101, 0.06, 0.1, 1e6)
    pc = cfg.protocol
    assert (pc.byzantine_ratio, pc.security_level, pc.message_size_bytes, pc.block_size_tx) == (0.1, 1e-5, 100.0, 2000)


def test_only_n_changes_n(tmp_path):
    path = tmp_path / "big.cfg"
    path.write_text("# large network\nn = 1001\n")
    cfg = load_config(path)
    assert cfg.n == 1001
    assert cfg == SimulationConfig(poa(1001, 0.1), n=1001)


def test_alpha_out_of_range(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("alpha = 1.5\n")
    with pytest.raises(ConfigFileError, match="alpha"):
        load_config(path)


def test_unknown_key_names_line():
    with pytest.raises(ConfigFileError, match=r"cfg:2: unknown field 'bandwith'"):
        parse_config("n = 11\nbandwith = 3\n", "cfg")


@pytest.mark.parametrize("text, field", [("n = eleven", "n"), ("seed = 1.5", "seed"), ("p 0.3", None)])
def test_parse_errors(text, field):
    with pytest.raises(ConfigFileError, match=field or "expected"):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigFileError):
        load_config(tmp_path / "nope.cfg")


def test_json_input(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"preset": "hbft", "alpha": 0.2, "seed": 9}))
    cfg = load_config(path)
    assert cfg.protocol == hbft(101, 0.2) and cfg.seed == 9
    path.write_text(json.dumps({"colour": 1}))
    with pytest.raises(ConfigFileError, match="colour"):
        load_config(path)


def test_custom_preset_needs_committee():
    with pytest.raises(ConfigFileError):
        build_config({"preset": "custom"})
    cfg = build_config({"preset": "custom", "committee_size": 25, "endorsement_size": 9})
    assert cfg.protocol == custom(101, 25, 9)


def test_hbft_preset_rejects_high_alpha():
    with pytest.raises(ConfigFileError, match="3f"):
        build_config({"preset": "hbft", "alpha": 0.5})


@pytest.mark.parametrize("cfg", [
    SimulationConfig(poa(101, 0.1)),
    SimulationConfig(hbft(1001, 0.3, block_size_tx=40), n=1001, d_factor=0.5, seed=77, simulation_rounds=50),
    SimulationConfig(poa(101, 0.2, fork_rate_override=0.001, tx_size_bytes=512.0), p=0.1),
    SimulationConfig(custom(101, 50, 17, security_level=1e-7), bandwidth=2.5e6),
])
def test_dump_round_trip(tmp_path, cfg):
    path = tmp_path / "dump.cfg"
    path.write_text(dump_config(cfg))
    back = load_config(path)
    assert back == cfg
    assert back.protocol.confirmation_rule == cfg.protocol.confirmation_rule
    if cfg.protocol.confirmation_rule == FIXED:
        assert back.protocol.fixed_confirmations == 3
