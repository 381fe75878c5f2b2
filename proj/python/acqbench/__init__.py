"""Python bindings for the acqbench C++ core."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run as _run

__version__ = "0.1.0"


def run(config, jobs=1):
    """Run an experiment config given as a dict or JSON string."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run(config, jobs)
