"""Magic Square device-independent OT and bit commitment."""

import json
from fractions import Fraction

from . import _core
from ._core import ConfigError, LinearCode, auto_code, chernoff_trials, leftover_hash_ceiling, rate_interval

__all__ = [
    "ConfigError",
    "LinearCode",
    "auto_code",
    "chernoff_trials",
    "default_config",
    "leftover_hash_ceiling",
    "rate_interval",
    "run",
    "strong_extractor_distance",
]


def default_config():
    return json.loads(_core.default_config())


def run(command, config=None, *, expect="pass", corrupt="", **overrides):
    """Run a CLI subcommand in process. Returns {"claims", "points", "detail"}."""
    cfg = default_config()
    cfg.update(config or {})
    cfg.update(overrides)
    return json.loads(_core.command(command, json.dumps(cfg), expect, corrupt))


def strong_extractor_distance(support, n, m):
    return Fraction(_core.strong_extractor_distance(list(support), n, m))
