"""Input validation helpers shared across the package."""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["check_bearings", "check_snapshot_array"]


def check_bearings(bearings_deg: Sequence[float]) -> tuple[float, ...]:
    """Validate bearings: at least one, each strictly inside (-90, 90) degrees."""
    bearings = tuple(float(b) for b in np.atleast_1d(np.asarray(bearings_deg, dtype=float)))
    if len(bearings) == 0:
        raise ValueError("at least one bearing is required")
    for b in bearings:
        if not -90.0 < b < 90.0:
            raise ValueError(f"bearing {b} deg is outside the open interval (-90, 90)")
    return bearings


def check_snapshot_array(X, n_sensors: int) -> np.ndarray:
    """Validate a (n_snapshots, n_sensors) complex snapshot array."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"snapshot array must be 2-D, got shape {X.shape}")
    if X.shape[1] != n_sensors:
        raise ValueError(
            f"snapshot array has {X.shape[1]} columns, expected one per sensor ({n_sensors})"
        )
    if X.shape[0] < 1:
        raise ValueError("snapshot array needs at least one snapshot row")
    return X.astype(complex, copy=False)
