"""Difference coarrays, weight functions, and uniform degrees of freedom.

The brute-force coarray of a generated geometry is the ground truth here;
the EMISC/IMISC closed forms are predictors checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .geometry import ArrayGeometry, _check_emisc_count, max_ies

__all__ = [
    "CoarrayTable",
    "RangeCheckReport",
    "difference_coarray",
    "udof",
    "closed_form_udof_emisc",
    "closed_form_udof_imisc",
    "closed_form_weights_emisc",
    "closed_form_weights_imisc",
    "emisc_hole_position",
    "verify_consecutive_ranges",
    "coarray_csv_rows",
    "coarray_summary",
]


@dataclass(frozen=True)
class CoarrayTable:
    """Weight function of a difference coarray.

    ``weights[l]`` counts ordered sensor pairs at lag ``l``; the table is
    stored over the full signed lag range so downstream lag selection never
    needs a sign branch.  ``consecutive_halfwidth`` is the largest Lc with
    every lag of [-Lc, Lc] present; ``holes`` lists the positive lags
    missing from [1, max_lag].
    """

    weights: Mapping[int, int]
    max_lag: int
    consecutive_halfwidth: int
    holes: tuple[int, ...]

    def weight(self, lag: int) -> int:
        """Pair count at ``lag`` (0 for unsupported lags)."""
        return self.weights.get(lag, 0)

    def first_weights(self, count: int = 3) -> tuple[int, ...]:
        """Weights at lags 1..count."""
        return tuple(self.weight(l) for l in range(1, count + 1))


@dataclass(frozen=True)
class RangeCheckReport:
    """Outcome of the three-range consecutive-coverage check for EMISC."""

    element_count: int
    ranges: tuple[tuple[int, int], ...]
    subset_ok: tuple[bool, ...]
    union_bounds: tuple[int, int]
    union_ok: bool
    hole_position: int
    hole_confirmed: bool

    @property
    def passed(self) -> bool:
        return all(self.subset_ok) and self.union_ok and self.hole_confirmed


def difference_coarray(geometry: ArrayGeometry) -> CoarrayTable:
    """Brute-force difference coarray of a geometry.

    Enumerates all K^2 ordered pairs, so weights are exact:
    w(-l) = w(l), w(0) = K, and sum_l w(l) = K^2.
    """
    pos = np.asarray(geometry.positions, dtype=np.int64)
    lags = (pos[:, None] - pos[None, :]).ravel()
    values, counts = np.unique(lags, return_counts=True)
    weights = {int(l): int(c) for l, c in zip(values, counts)}
    max_lag = int(values[-1])
    halfwidth = 0
    while weights.get(halfwidth + 1) is not None:
        halfwidth += 1
    holes = tuple(l for l in range(1, max_lag + 1) if l not in weights)
    return CoarrayTable(
        weights=weights,
        max_lag=max_lag,
        consecutive_halfwidth=halfwidth,
        holes=holes,
    )


def udof(table: CoarrayTable) -> int:
    """Uniform degrees of freedom: size of the central consecutive segment."""
    return 2 * table.consecutive_halfwidth + 1


def closed_form_udof_emisc(element_count: int) -> int:
    """Closed-form uDOF of the EMISC array: -3L^2/2 + (2K-1)L + 7."""
    K = _check_emisc_count(element_count)
    L = max_ies(K)
    return -3 * L * L // 2 + (2 * K - 1) * L + 7


def closed_form_udof_imisc(element_count: int) -> int:
    """Closed-form uDOF predictor for the IMISC array (4 below EMISC).

    Piecewise in K mod 6: (2K^2 - 2K + c)/3 with c = -3, 5, or 9.
    """
    K = _check_emisc_count(element_count)
    c = {0: 9, 1: 9, 2: 5, 3: -3, 4: -3, 5: 5}[K % 6]
    numerator = 2 * K * K - 2 * K + c
    if numerator % 3 != 0:
        raise AssertionError(f"IMISC uDOF numerator not divisible by 3 at K={K}")
    return numerator // 3


def closed_form_weights_emisc(element_count: int) -> tuple[int, int, int]:
    """Predicted (w(1), w(2), w(3)) for EMISC; branches at K = 16.

    The small-K branch disagrees with the brute-force coarray of the
    generated geometry (which gives (1, 3, 3) for 10 <= K < 16); callers
    comparing against measurements should treat this branch as a reported
    prediction, not ground truth.
    """
    K = _check_emisc_count(element_count)
    if K < 16:
        return (1, 2, 2)
    return (1, 2 * ((K - 4) // 6), 2)


def closed_form_weights_imisc(element_count: int) -> tuple[int, int, int]:
    """Predicted (w(1), w(2), w(3)) for IMISC; branches at K = 16."""
    K = _check_emisc_count(element_count)
    if K < 16:
        return (2, 5, 2)
    return (2, 2 * ((K + 2) // 6), 1)


def emisc_hole_position(element_count: int) -> int:
    """First positive lag missing from the EMISC coarray: -3L^2/4 + (K-1/2)L + 4."""
    K = _check_emisc_count(element_count)
    L = max_ies(K)
    return -3 * L * L // 4 + K * L - L // 2 + 4


def verify_consecutive_ranges(element_count: int) -> RangeCheckReport:
    """Numerically check the three-range decomposition of the EMISC coarray.

    The positive consecutive part [0, -3L^2/4 + (K-1/2)L + 3] splits into
    three abutting ranges; each must be a subset of the brute-force positive
    coarray, their union must equal the whole consecutive part, and the lag
    one past its end must be a hole.
    """
    from .geometry import emisc_positions

    K = _check_emisc_count(element_count)
    L = max_ies(K)
    r1 = (0, L * L // 8 - L // 4 + 1)
    r2 = (r1[1], -7 * L * L // 8 + K * L - L // 4)
    r3 = (r2[1] + 1, -3 * L * L // 4 + K * L - L // 2 + 3)
    table = difference_coarray(emisc_positions(K))
    supported = set(table.weights)
    subset_ok = tuple(
        all(l in supported for l in range(lo, hi + 1)) for lo, hi in (r1, r2, r3)
    )
    union_hi = r3[1]
    union_ok = (
        r1[0] == 0
        and r2[0] <= r1[1] + 1
        and r3[0] <= r2[1] + 1
        and table.consecutive_halfwidth == union_hi
    )
    hole = emisc_hole_position(K)
    return RangeCheckReport(
        element_count=K,
        ranges=(r1, r2, r3),
        subset_ok=subset_ok,
        union_bounds=(0, union_hi),
        union_ok=union_ok,
        hole_position=hole,
        hole_confirmed=hole not in supported,
    )


# --- serialization ---------------------------------------------------------

def coarray_csv_rows(table: CoarrayTable) -> list[str]:
    """``lag,weight`` rows over the full signed lag range, ascending."""
    return [f"{lag},{table.weights[lag]}" for lag in sorted(table.weights)]


def coarray_summary(geometry: ArrayGeometry, table: CoarrayTable) -> dict:
    """Compact record of the quantities a design comparison needs."""
    w1, w2, w3 = table.first_weights()
    return {
        "kind": geometry.kind,
        "element_count": geometry.element_count,
        "aperture": geometry.aperture,
        "consecutive_halfwidth": table.consecutive_halfwidth,
        "udof": udof(table),
        "w1": w1,
        "w2": w2,
        "w3": w3,
        "holes": list(table.holes[:20]),
        "hole_count": len(table.holes),
    }
