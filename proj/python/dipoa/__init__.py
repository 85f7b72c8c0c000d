"""Cardinality-constrained convex optimization over a network of nodes."""

import json as _json

from ._core import (
    DipoaError,
    binaries_from_support,
    enumerate_supports,
    event_triggered,
    gen_dslr,
    gen_sqcqp,
    project_sparsity,
    relative_gap,
    run_benchmark,
    topology_blocks,
    validate_instance,
)
from ._core import solve as _solve

__all__ = [
    "DipoaError",
    "binaries_from_support",
    "enumerate_supports",
    "event_triggered",
    "gen_dslr",
    "gen_sqcqp",
    "project_sparsity",
    "relative_gap",
    "run_benchmark",
    "solve",
    "topology_blocks",
    "validate_instance",
]


def _as_text(value):
    if value is None or isinstance(value, str):
        return value
    return _json.dumps(value)


def solve(instance, N=None, K=1, topology=None, config=None, include_timing=True):
    """Solve an instance (JSON text or dict) and return the report as a dict.

    `config` takes the same keys as the CLI's --config file.
    """
    report = _solve(
        _as_text(instance),
        N=N,
        K=K,
        topology_json=_as_text(topology),
        config_json=_as_text(config),
        include_timing=include_timing,
    )
    return _json.loads(report)
