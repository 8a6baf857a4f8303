"""Python bindings for the mpgame engine."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import MpgameError, compare_dt as _compare_dt, equilibrium_report as _eq_report
from ._core import verify as _verify


def compare_dt(config, dt_list):
    """Discrete vs continuous scheme gaps, one dict per dt."""
    return _json.loads(_compare_dt(config, list(dt_list)))


def verify(config):
    """Run the oracle suite and return (all_pass, report dict)."""
    ok, text = _verify(config)
    return ok, _json.loads(text)


def equilibrium_report(config, n_max=5):
    """Printed closed forms against the solver for n = 1..n_max."""
    return _json.loads(_eq_report(config, n_max))
