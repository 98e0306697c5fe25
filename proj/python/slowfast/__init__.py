"""Python bindings for the slowfast token pipeline."""

import json

from ._core import (
    BudgetTooSmallError,
    Error,
    GroundingParseError,
    InfeasibleMixtureError,
    InvalidConfigError,
    InvalidInputError,
    OversizeItemError,
    classify,
    fast_tokens_for,
    fit_grid,
    group_advantages,
    plan_mixture,
    run_cli,
    sequence_ratio,
)
from . import _core

__all__ = [
    "BudgetTooSmallError",
    "Error",
    "GroundingParseError",
    "InfeasibleMixtureError",
    "InvalidConfigError",
    "InvalidInputError",
    "OversizeItemError",
    "balance_workers",
    "classify",
    "emit_grounding",
    "fast_tokens_for",
    "fit_grid",
    "group_advantages",
    "gspo_objective",
    "pack_windows",
    "parse_grounding",
    "plan_mixture",
    "rope_index",
    "run_cli",
    "sequence_ratio",
    "solve_video_budget",
]


def solve_video_budget(slow, dims, budget=75000):
    """slow: list of bools (frame 0 is always Slow); dims: list of (w, h)."""
    return json.loads(_core._solve_budget(list(slow), [tuple(d) for d in dims], budget))


def rope_index(layout, timestamps=()):
    return json.loads(_core._rope_index(json.dumps(layout), list(timestamps)))


def parse_grounding(text, lenient=False):
    return json.loads(_core._parse_grounding(text, lenient))


def emit_grounding(item):
    return _core._emit_grounding(json.dumps(item))


def pack_windows(items, capacity):
    return json.loads(_core._pack(json.dumps(items), capacity))


def balance_workers(items, workers):
    return json.loads(_core._balance(json.dumps(items), workers))


def gspo_objective(group):
    return json.loads(_core._gspo(json.dumps(group)))
