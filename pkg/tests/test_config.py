# tests/test_config.py - Defaults, environment and explicit overrides
import pytest

from src.config import CensusConfig, IdemQuatConfig
from src.utils.errors import RingSpecError


def test_defaults():
    config = CensusConfig.from_env({})
    assert config.carrier_cap == IdemQuatConfig.CARRIER_CAP
    assert config.pair_cap == IdemQuatConfig.PAIR_CAP
    assert config.r_max == IdemQuatConfig.R_MAX


def test_environment_then_overrides():
    env = {'IDEMQUAT_CAP': '500', 'IDEMQUAT_PAIR_CAP': '7000'}
    config = CensusConfig.from_env(env)
    assert (config.carrier_cap, config.pair_cap) == (500, 7000)
    config = CensusConfig.from_env(env, carrier_cap=42, pair_cap=None)
    assert (config.carrier_cap, config.pair_cap) == (42, 7000)


def test_blank_environment_is_ignored():
    assert CensusConfig.from_env({'IDEMQUAT_CAP': '  '}).carrier_cap == IdemQuatConfig.CARRIER_CAP


def test_bad_environment():
    with pytest.raises(RingSpecError):
        CensusConfig.from_env({'IDEMQUAT_CAP': 'lots'})


@pytest.mark.parametrize("field", ['carrier_cap', 'pair_cap', 'r_max', 'workers', 'block_size'])
def test_invalid_values(field):
    with pytest.raises(RingSpecError):
        CensusConfig(**{field: 0})


def test_with_overrides():
    config = CensusConfig().with_overrides(workers=4, r_max=None)
    assert config.workers == 4
    assert config.r_max == IdemQuatConfig.R_MAX
