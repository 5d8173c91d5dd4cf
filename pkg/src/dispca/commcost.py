"""Closed-form uplink cost of the two protocols.

Costs are the fraction of values sent relative to shipping the full m x n
matrix to a single site. With s monitors each keeping r components:

  row-partitioned:    s * r * (n + 1) / (m * n)
  column-partitioned: s * r * (m + n / s) / (m * n)

Both formulas count exactly the floats that cross the wire (headers
excluded): r singular values plus an n x r loading block per monitor in the
first case, an n_i x r loading block plus an m x r projection per monitor in
the second (the n/s term is the average column-block width, exact in total
even when s does not divide n).
"""

from __future__ import annotations

from dataclasses import dataclass


def _check_args(s: int, r: int, m: int, n: int) -> None:
    for name, value in (("s", s), ("r", r), ("m", m), ("n", n)):
        if not isinstance(value, (int,)) or isinstance(value, bool):
            raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if s < 1 or m < 1 or n < 1:
        raise ValueError(f"s, m, n must be >= 1, got s={s}, m={m}, n={n}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got r={r}")


def horizontal_cost(s: int, r: int, m: int, n: int) -> float:
    """Uplink fraction for row-partitioned monitors."""
    _check_args(s, r, m, n)
    return s * r * (n + 1) / (m * n)


def vertical_cost(s: int, r: int, m: int, n: int) -> float:
    """Uplink fraction for column-partitioned monitors."""
    _check_args(s, r, m, n)
    return s * r * (m + n / s) / (m * n)


@dataclass(frozen=True)
class CostLimits:
    """Asymptotic uplink fractions as one data dimension grows unboundedly."""

    horizontal_large_n: float  # n -> inf: s*r/m
    vertical_large_n: float  # n -> inf: r/m
    horizontal_large_m: float  # m -> inf: 0
    vertical_large_m: float  # m -> inf: s*r/n


def cost_limits(s: int, r: int, m: int, n: int) -> CostLimits:
    """Limiting cost fractions for many-features and many-observations regimes.

    With many features (large n) the row-partitioned protocol pays s*r/m while
    the column-partitioned one pays only r/m, an s-fold advantage; with many
    observations (large m) the ordering flips: row-partitioned cost vanishes
    while column-partitioned cost settles at s*r/n.
    """
    _check_args(s, r, m, n)
    return CostLimits(
        horizontal_large_n=s * r / m,
        vertical_large_n=r / m,
        horizontal_large_m=0.0,
        vertical_large_m=s * r / n,
    )
