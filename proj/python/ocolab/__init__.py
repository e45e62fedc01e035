"""Regret experiments for online convex optimization."""

import json

from . import _core
from ._core import BudgetError, Error, UnsupportedError, ValidationError, ct_sequence, fit_growth, solve_lp

__all__ = [
    "BudgetError",
    "Error",
    "UnsupportedError",
    "ValidationError",
    "check_trivial",
    "construct_alpha",
    "ct_sequence",
    "estimate_modulus",
    "fit_growth",
    "holder_check",
    "minimax",
    "run",
    "simulate",
    "solve_lp",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def simulate(config, threads=1, seed=None):
    """Run a sweep in memory; `config` is JSON text or a dict."""
    return _core.simulate(_text(config), threads, seed)


def run(config, threads=1, seed=None, out=None):
    """Run a sweep and write trials.csv and summary.json under the output directory."""
    return _core.run(_text(config), threads, seed, out)


def minimax(config, horizon, grid=0):
    return _core.minimax(_text(config), horizon, grid)


def check_trivial(config, seed=0):
    return _core.check_trivial(_text(config), seed)


def construct_alpha(config, p1=None):
    return _core.construct_alpha(_text(config), p1)


def estimate_modulus(decisions, eps, budget=1000, seed=0):
    return _core.estimate_modulus(_text(decisions), eps, budget, seed)


def holder_check(decisions, opponents, q=2.0, samples=1000, seed=0):
    return _core.holder_check(_text(decisions), _text(opponents), q, samples, seed)
