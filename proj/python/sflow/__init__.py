"""Spectral flow of symmetric matrix paths, Maslov indices, gap metric and
linear Hamiltonian boundary value problems."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import InvalidInput, NumericalFailure, run_suite as _run_suite

__version__ = "0.1.0"


def suite_report(name, seed=1, samples=-1):
    """Runs one property suite and returns the report as a dict."""
    return _json.loads(_run_suite(name, seed, samples))
