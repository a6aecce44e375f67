# src/config.py - Configuration for census sweeps and caps
import logging
import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from src.utils.errors import RingSpecError

logger = logging.getLogger(__name__)


class IdemQuatConfig:
    """Library-wide defaults"""

    # ========== CAPS ==========
    CARRIER_CAP = 2 ** 24       # elements of H(R) or M_2(R) held in a dense indicator
    PAIR_CAP = 2 ** 32          # pair products per closure round

    # ========== SWEEPS ==========
    R_MAX = 4                   # closure rounds S_1 .. S_rmax
    BLOCK_SIZE = 2 ** 20        # codes / pair products handled per numpy block
    WORKERS = 1

    # ========== ENVIRONMENT ==========
    ENV_CAP = 'IDEMQUAT_CAP'
    ENV_PAIR_CAP = 'IDEMQUAT_PAIR_CAP'

    # Largest ring whose operation tables are built from the exact arithmetic
    TABLE_SIZE_LIMIT = 4096


@dataclass(frozen=True)
class CensusConfig:
    """Caps and tuning knobs for brute-force sweeps"""
    carrier_cap: int = IdemQuatConfig.CARRIER_CAP
    pair_cap: int = IdemQuatConfig.PAIR_CAP
    r_max: int = IdemQuatConfig.R_MAX
    workers: int = IdemQuatConfig.WORKERS
    block_size: int = IdemQuatConfig.BLOCK_SIZE
    progress: bool = False

    def __post_init__(self):
        if self.carrier_cap < 1 or self.pair_cap < 1:
            raise RingSpecError("caps must be positive")
        if self.r_max < 1:
            raise RingSpecError("r_max must be at least 1")
        if self.workers < 1 or self.block_size < 1:
            raise RingSpecError("workers and block_size must be positive")

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **overrides) -> 'CensusConfig':
        """
        Build a config from defaults, then environment, then explicit overrides

        Args:
            environ: Mapping to read instead of os.environ
            overrides: Field values that win over the environment; None values are ignored

        Returns:
            CensusConfig
        """
        env = os.environ if environ is None else environ
        values = {}

        for field_name, var in (('carrier_cap', IdemQuatConfig.ENV_CAP),
                                ('pair_cap', IdemQuatConfig.ENV_PAIR_CAP)):
            raw = env.get(var)
            if raw is None or raw.strip() == '':
                continue
            try:
                values[field_name] = int(raw)
            except ValueError:
                raise RingSpecError(f"{var} must be an integer, got {raw!r}") from None
            logger.debug("%s=%s from environment", field_name, raw)

        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_overrides(self, **overrides) -> 'CensusConfig':
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
