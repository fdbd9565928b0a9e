"""Integer sensor geometries for sparse linear arrays.

Positions are exact integers in units of the minimum inter-element spacing
d = lambda/2, normalized so the first sensor sits at 0.  Keeping the grid
integral makes every coarray quantity downstream exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

__all__ = [
    "ArrayGeometry",
    "ConstructionError",
    "KINDS",
    "max_ies",
    "emisc_positions",
    "ula_positions",
    "nested_positions",
    "coprime_positions",
    "custom_positions",
    "format_geometry_line",
    "parse_geometry",
    "parse_geometry_line",
    "parse_geometry_spec",
    "geometry_to_record",
    "geometry_from_record",
]

KINDS = ("emisc", "ula", "nested", "coprime", "custom")

# any other label marks a user-supplied position-list family; it must
# survive the line format and CSV columns unquoted
_KIND_PATTERN = re.compile(r"[a-z0-9][a-z0-9_\-]*\Z")

MIN_EMISC_ELEMENTS = 10


class ConstructionError(RuntimeError):
    """A closed-form construction produced an internally inconsistent set."""


@dataclass(frozen=True)
class ArrayGeometry:
    """A sorted set of integer sensor positions on the d = lambda/2 grid.

    Parameters
    ----------
    positions : tuple of int
        Strictly increasing, non-negative, first entry 0.
    kind : str
        ``emisc``, ``ula``, ``nested``, ``coprime``, ``custom``, or any
        other lowercase word naming an externally supplied family.
    """

    positions: tuple[int, ...]
    kind: str = "custom"

    def __post_init__(self):
        if not _KIND_PATTERN.match(self.kind):
            raise ValueError(
                f"geometry kind {self.kind!r} must be a lowercase word "
                f"(canonical kinds: {KINDS})"
            )
        pos = tuple(int(p) for p in self.positions)
        if len(pos) == 0:
            raise ValueError("geometry needs at least one sensor")
        if pos[0] != 0:
            raise ValueError("positions must be normalized to start at 0")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("positions must be strictly increasing with no duplicates")
        object.__setattr__(self, "positions", pos)

    @property
    def element_count(self) -> int:
        return len(self.positions)

    @property
    def aperture(self) -> int:
        """Largest position (positions start at 0)."""
        return self.positions[-1]


def max_ies(element_count: int) -> int:
    """Maximum inter-element spacing L for an EMISC array of K elements.

    L = 4*floor((K - 4)/6) + 4, defined for K >= 10.  L is always a
    positive multiple of 4 and at least 8.
    """
    K = _check_emisc_count(element_count)
    return 4 * ((K - 4) // 6) + 4


def emisc_positions(element_count: int) -> ArrayGeometry:
    """Construct the EMISC sparse array of K elements.

    The array is the union of seven uniform linear sub-arrays whose start,
    end, and spacing are closed-form functions of K and L = max_ies(K).
    A sub-array whose start equals its end contributes one element; a
    start beyond the end contributes none.

    Returns
    -------
    ArrayGeometry
        Exactly K positions spanning [0, -3L^2/4 + KL + 2].
    """
    K = _check_emisc_count(element_count)
    L = max_ies(K)
    # L % 4 == 0 so every quotient below is exact
    base = -3 * L * L // 4 + K * L  # shared prefix of sub-arrays 6 and 7
    subs = [
        ("sub-array 1 (spacing 3)", 0, 3, 3),
        ("sub-array 2 (spacing 2)", 5, L // 2 + 1, 2),
        ("sub-array 3 (spacing L/2+1)", L // 2 + 3, L * L // 8 - L // 4 + 1, L // 2 + 1),
        ("sub-array 4 (spacing L)", L * L // 8 + L // 4 + 2,
         -7 * L * L // 8 + K * L - 3 * L // 4 + 2, L),
        ("sub-array 5 (spacing L/2-1)", -7 * L * L // 8 + K * L + L // 4 + 2,
         base - L + 4, L // 2 - 1),
        ("sub-array 6 (spacing 1)", base - L // 2 + 2, base - L // 2 + 3, 1),
        ("sub-array 7 (spacing 2)", base - L // 2 + 6, base + 2, 2),
    ]
    positions: set[int] = set()
    total = 0
    for name, start, end, step in subs:
        part = _ulsa(name, start, end, step)
        overlap = positions.intersection(part)
        if overlap:
            raise ConstructionError(
                f"{name} duplicates positions {sorted(overlap)} for K={K}"
            )
        positions.update(part)
        total += len(part)
    if total != K:
        raise ConstructionError(
            f"sub-array union has {total} elements, expected K={K}"
        )
    geometry = ArrayGeometry(tuple(sorted(positions)), kind="emisc")
    expected_max = -3 * L * L // 4 + K * L + 2
    if geometry.aperture != expected_max:
        raise ConstructionError(
            f"largest position {geometry.aperture} != expected {expected_max} for K={K}"
        )
    return geometry


def ula_positions(element_count: int) -> ArrayGeometry:
    """Uniform linear array {0, 1, ..., K-1}."""
    K = _check_positive("element_count", element_count)
    return ArrayGeometry(tuple(range(K)), kind="ula")


def nested_positions(inner: int, outer: int) -> ArrayGeometry:
    """Two-level nested array.

    Inner level {0, ..., K1-1} at unit spacing, outer level
    {(K1+1)(k+1)-1, k = 0, ..., K2-1} at spacing K1+1.
    """
    k1 = _check_positive("inner", inner)
    k2 = _check_positive("outer", outer)
    pos = list(range(k1)) + [(k1 + 1) * (k + 1) - 1 for k in range(k2)]
    return ArrayGeometry(tuple(sorted(pos)), kind="nested")


def coprime_positions(m: int, n: int) -> ArrayGeometry:
    """Prototype coprime array {M*i, i < N} union {N*j, j < 2M}, deduplicated."""
    m = _check_positive("m", m)
    n = _check_positive("n", n)
    if gcd(m, n) != 1:
        raise ValueError(f"coprime array requires gcd(m, n) = 1, got m={m}, n={n}")
    pos = sorted({m * i for i in range(n)} | {n * j for j in range(2 * m)})
    return ArrayGeometry(tuple(pos), kind="coprime")


def custom_positions(positions: Iterable[int], kind: str = "custom") -> ArrayGeometry:
    """Build a geometry from an explicit position list, normalized to start at 0."""
    pos = sorted({int(p) for p in positions})
    if not pos:
        raise ValueError("empty position list")
    offset = pos[0]
    return ArrayGeometry(tuple(p - offset for p in pos), kind=kind)


# --- serialization ---------------------------------------------------------

def format_geometry_line(geometry: ArrayGeometry) -> str:
    """One-line text form: ``kind K p0,p1,...,p{K-1}``."""
    return "{} {} {}".format(
        geometry.kind,
        geometry.element_count,
        ",".join(str(p) for p in geometry.positions),
    )


def parse_geometry_line(line: str) -> ArrayGeometry:
    """Inverse of :func:`format_geometry_line`."""
    parts = line.split()
    if len(parts) != 3:
        raise ValueError(f"expected 'kind K p0,p1,...', got {line!r}")
    kind, count_text, pos_text = parts
    positions = tuple(int(p) for p in pos_text.split(","))
    geometry = ArrayGeometry(positions, kind=kind)
    if geometry.element_count != int(count_text):
        raise ValueError(
            f"declared element count {count_text} != {geometry.element_count} positions"
        )
    return geometry


def geometry_to_record(geometry: ArrayGeometry) -> dict:
    """JSON-style record with the same fields as the line format."""
    return {
        "kind": geometry.kind,
        "element_count": geometry.element_count,
        "positions": list(geometry.positions),
    }


def geometry_from_record(record: dict) -> ArrayGeometry:
    geometry = ArrayGeometry(tuple(record["positions"]), kind=record["kind"])
    declared = record.get("element_count")
    if declared is not None and declared != geometry.element_count:
        raise ValueError(
            f"declared element count {declared} != {geometry.element_count} positions"
        )
    return geometry


def parse_geometry_spec(spec: str) -> ArrayGeometry:
    """Parse a compact generator spec such as ``emisc:16`` or ``nested:8,8``.

    Grammar: ``emisc:K``, ``ula:K``, ``nested:K1,K2``, ``coprime:M,N``,
    ``custom:p0,p1,...``.  Any other kind token labels an explicit
    position-list family (``misc:0,1,4,6``) so external arrays can be
    benchmarked under their own name; those need at least two positions.
    """
    kind, sep, arg_text = spec.partition(":")
    kind = kind.strip().lower()
    if not sep or not arg_text:
        raise ValueError(f"geometry spec {spec!r} must look like 'kind:args'")
    try:
        args = [int(a) for a in arg_text.split(",")]
    except ValueError:
        raise ValueError(f"geometry spec {spec!r} has non-integer arguments") from None
    if kind == "emisc":
        _expect_args(spec, args, 1)
        return emisc_positions(args[0])
    if kind == "ula":
        _expect_args(spec, args, 1)
        return ula_positions(args[0])
    if kind == "nested":
        _expect_args(spec, args, 2)
        return nested_positions(args[0], args[1])
    if kind == "coprime":
        _expect_args(spec, args, 2)
        return coprime_positions(args[0], args[1])
    if kind == "custom":
        return custom_positions(args)
    if len(args) < 2:
        raise ValueError(
            f"geometry spec {spec!r}: unknown kind {kind!r} needs at least two "
            "comma-separated positions (or use one of "
            "emisc/ula/nested/coprime/custom)"
        )
    return custom_positions(args, kind=kind)


def parse_geometry(text: str) -> ArrayGeometry:
    """Accept either a generator spec or a serialized geometry line.

    ``emisc:16`` goes through :func:`parse_geometry_spec`; anything with
    whitespace (``custom 3 0,1,4``) through :func:`parse_geometry_line`.
    """
    stripped = text.strip()
    if any(ch.isspace() for ch in stripped):
        return parse_geometry_line(stripped)
    return parse_geometry_spec(stripped)


# --- helpers ---------------------------------------------------------------

def _ulsa(name: str, start: int, end: int, step: int) -> list[int]:
    """Positions of one uniform linear sub-array; empty when start > end."""
    if end < start:
        return []
    if step <= 0 or (end - start) % step != 0:
        raise ConstructionError(
            f"{name}: span {start}..{end} is not a multiple of spacing {step}"
        )
    return list(range(start, end + 1, step))


def _check_emisc_count(element_count) -> int:
    K = int(element_count)
    if K < MIN_EMISC_ELEMENTS:
        raise ValueError(
            f"minimum element count for EMISC arrays is {MIN_EMISC_ELEMENTS}, got {K}"
        )
    return K


def _check_positive(name: str, value) -> int:
    v = int(value)
    if v < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return v


def _expect_args(spec: str, args: Sequence[int], count: int) -> None:
    if len(args) != count:
        raise ValueError(f"geometry spec {spec!r} expects {count} argument(s), got {len(args)}")
