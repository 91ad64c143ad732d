"""Grid traffic simulator with consensus auctions and per-vehicle MPC."""

import json

from ._core import (
    Error,
    InvalidConfiguration,
    ProtocolError,
    compare_turns,
    default_config,
    detect_collisions,
    normalize_config,
    rollout,
    run,
    run_auction,
    solve_qp,
    summarize,
)


def config(**sections):
    """Default configuration with section overrides, e.g. config(run={"seed": 3})."""
    merged = json.loads(default_config())
    for name, values in sections.items():
        merged.setdefault(name, {}).update(values)
    return normalize_config(json.dumps(merged))


__all__ = [
    "Error",
    "InvalidConfiguration",
    "ProtocolError",
    "compare_turns",
    "config",
    "default_config",
    "detect_collisions",
    "normalize_config",
    "rollout",
    "run",
    "run_auction",
    "solve_qp",
    "summarize",
]
