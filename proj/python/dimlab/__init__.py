"""Slices and projections of random fractals."""

import json

from ._core import *  # noqa: F401,F403
from ._core import DimlabError, __version__, run_scenario as _run_scenario


def run(config):
    """Run a scenario from a dict (or JSON text) and return the report as a dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_run_scenario(text))
