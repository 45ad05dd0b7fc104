"""TSCH slotframe scheduling simulator: Local Voting, LV-z, OTF and E-OTF."""

import json

from . import _lvsim
from ._lvsim import g_index, jain_index, lv_delta

__all__ = ["campaign", "default_config", "g_index", "jain_index", "lv_delta", "run_once"]


def default_config():
    """Reference configuration as a dict with the same keys the CLI config file accepts."""
    return json.loads(_lvsim.default_config())


def _config(config, overrides):
    merged = dict(config or {})
    merged.update(overrides)
    return json.dumps(merged)


def run_once(config=None, *, verify=False, **overrides):
    """One run. Keyword overrides are merged into `config`."""
    return json.loads(_lvsim.run_once(_config(config, overrides), verify))


def campaign(config=None, *, algorithms=(), packets_per_burst=(), interarrivals=(), runs=10, parallelism=1,
             paired=True, **overrides):
    """Runs `runs` seeds per grid point; returns per-run metrics and per-point summaries."""
    return json.loads(
        _lvsim.campaign(_config(config, overrides), list(algorithms), list(packets_per_burst), list(interarrivals),
                        runs, parallelism, paired))
