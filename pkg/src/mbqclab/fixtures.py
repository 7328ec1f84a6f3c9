"""Ready-made instances wiring the engine to target families."""

from __future__ import annotations

import numpy as np

from .engine import (
    CLUSTER_STEPS,
    cluster_resource,
    cluster_strategy,
    cluster_target_circuit,
    tabulate_strategy,
)
from .universality import UnitaryFamily

# Four Euler triples on the pi/4 grid, one per two-bit witness.
DEFAULT_CLUSTER_ANGLES = {
    "00": (0.0, 0.0, 0.0),
    "01": (np.pi / 4, np.pi / 2, 0.0),
    "10": (np.pi / 2, np.pi / 4, np.pi / 4),
    "11": (3 * np.pi / 4, np.pi / 2, np.pi / 4),
}


def cluster_family(angles_by_y: dict) -> UnitaryFamily:
    w = len(next(iter(angles_by_y)))
    if sorted(angles_by_y) != sorted(format(i, f"0{w}b") if w else "" for i in range(1 << w)):
        raise ValueError("angle table must cover every witness exactly once")
    return UnitaryFamily(w, 1, lambda y: cluster_target_circuit(angles_by_y[y]))


def cluster_fixture(angles_by_y: dict | None = None):
    """Path-graph resource, its driving strategy, and the realized targets."""
    angles = DEFAULT_CLUSTER_ANGLES if angles_by_y is None else angles_by_y
    return cluster_resource(), cluster_strategy(angles), cluster_family(angles)


def cluster_fixture_table(angles_by_y: dict | None = None):
    """Same fixture with the strategy spelled out as a serializable table."""
    resource, strategy, family = cluster_fixture(angles_by_y)
    table = tabulate_strategy(strategy, family.w, CLUSTER_STEPS, 1)
    return resource, table, family
