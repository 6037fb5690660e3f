"""Lattice droplet calculus: minimal perimeters and droplet transfer.

The minimal boundary length of a union of v unit squares is an explicit
three-case function of the decomposition v = L^2 + r. Transferring area from
the smaller of two large droplets to the larger one strictly reduces the
total perimeter; certify_transfer measures the worst-case relative gain
(kappa) over a grid of droplet pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class HypothesisViolation(ValueError):
    """Transfer requested outside the droplet-size hypotheses."""


def iso_decompose(v: int) -> tuple[int, int]:
    """Split v = L^2 + r with L = isqrt(v), so 0 <= r <= 2L."""
    if v < 1:
        raise ValueError(f"v must be >= 1, got {v}")
    l = math.isqrt(v)
    return l, v - l * l


def min_perimeter(v: int) -> int:
    """Minimal lattice boundary length of a droplet of v unit squares.

    p(0) = 0 (empty droplet); otherwise 4L, 4L+2 or 4L+4 according to
    r = 0, 0 < r <= L, or L < r <= 2L.
    """
    if v < 0:
        raise ValueError(f"v must be >= 0, got {v}")
    if v == 0:
        return 0
    l, r = iso_decompose(v)
    if r == 0:
        return 4 * l
    return 4 * l + 2 if r <= l else 4 * l + 4


def min_perimeter_array(v: np.ndarray) -> np.ndarray:
    """Vectorized min_perimeter for a nonnegative integer array."""
    v = np.asarray(v, dtype=np.int64)
    if (v < 0).any():
        raise ValueError("v must be >= 0")
    l = np.sqrt(v.astype(np.float64)).astype(np.int64)
    # fix float rounding at perfect squares
    l = np.where((l + 1) ** 2 <= v, l + 1, l)
    l = np.where(l * l > v, l - 1, l)
    r = v - l * l
    p = 4 * l + np.where(r == 0, 0, np.where(r <= l, 2, 4))
    return np.where(v == 0, 0, p)


# -- independent brute-force oracle ----------------------------------------

_ORACLE_MAX = 12


def _perimeter(cells: frozenset) -> int:
    adj = sum((r, c + 1) in cells for r, c in cells) \
        + sum((r + 1, c) in cells for r, c in cells)
    return 4 * len(cells) - 2 * adj


def _normalize(cells) -> frozenset:
    r0 = min(r for r, _ in cells)
    c0 = min(c for _, c in cells)
    return frozenset((r - r0, c - c0) for r, c in cells)


@lru_cache(maxsize=1)
def _oracle_table() -> dict:
    """Minimal perimeter for each droplet size up to the enumeration cutoff.

    Exhaustive growth of all polyominoes (connected droplets) up to
    translation: every polyomino of size v+1 is a polyomino of size v plus
    one edge-adjacent cell, so breadth-first growth enumerates them all.
    """
    current = {frozenset([(0, 0)])}
    table = {1: 4}
    for v in range(2, _ORACLE_MAX + 1):
        grown = set()
        for poly in current:
            for r, c in poly:
                for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                    if nb not in poly:
                        grown.add(_normalize(poly | {nb}))
        table[v] = min(_perimeter(p) for p in grown)
        current = grown
    return table


def min_perimeter_oracle(v: int) -> int:
    """Brute-force minimal perimeter (independent of the formula)."""
    if not 1 <= v <= _ORACLE_MAX:
        raise ValueError(f"oracle supports 1 <= v <= {_ORACLE_MAX}, got {v}")
    return _oracle_table()[v]


# -- droplet transfer --------------------------------------------------------


@dataclass(frozen=True)
class DropletTriple:
    """Two droplet areas and a transfer amount inside an n x n box."""

    v1: int
    v2: int
    d: int
    n: int
    rho: float

    def __post_init__(self):
        if min(self.v1, self.v2, self.d, self.n) < 1:
            raise ValueError("v1, v2, d, n must be positive")
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")

    def hypotheses_ok(self) -> bool:
        floor = self.rho * self.n ** 2
        return (self.v1 <= self.v2 <= self.n ** 2
                and floor <= self.d <= self.v1
                and self.v1 >= floor)


def perimeter_gain(v1: int, v2: int, d: int) -> int:
    """Raw perimeter saved by moving area d from droplet v1 to droplet v2."""
    return (min_perimeter(v1) + min_perimeter(v2)
            - min_perimeter(v1 - d) - min_perimeter(v2 + d))


def transfer_gain(t: DropletTriple) -> int:
    """Perimeter saved by the transfer; requires the size hypotheses.

    Outside the hypotheses the gain can be negative (e.g. v1=v2=4, d=1
    gives -2), so violations raise rather than returning a number the
    transfer guarantee does not cover.
    """
    if not t.hypotheses_ok():
        raise HypothesisViolation(
            f"triple (v1={t.v1}, v2={t.v2}, d={t.d}) violates the size "
            f"hypotheses for n={t.n}, rho={t.rho}")
    return perimeter_gain(t.v1, t.v2, t.d)


def sqrt_bounds_check(v: int) -> bool:
    """True iff 4*sqrt(v) <= p(v) < 4*sqrt(v) + 4."""
    if v < 1:
        raise ValueError(f"v must be >= 1, got {v}")
    p = min_perimeter(v)
    s = 4.0 * math.sqrt(v)
    return s <= p < s + 4.0


def sqrt_bounds_scan(v_max: int) -> int:
    """Number of v in 1..v_max violating the square-root perimeter bounds."""
    v = np.arange(1, v_max + 1, dtype=np.int64)
    p = min_perimeter_array(v).astype(np.float64)
    s = 4.0 * np.sqrt(v.astype(np.float64))
    return int(np.count_nonzero(~((s <= p) & (p < s + 4.0))))


@dataclass(frozen=True)
class TransferReport:
    n: int
    rho: float
    step: int
    triples: int
    min_gain: int
    kappa: float
    argmin: tuple
    negatives: int

    def to_record(self) -> dict:
        return {
            "n": self.n, "rho": self.rho, "step": self.step,
            "triples": self.triples, "min_gain": self.min_gain,
            "kappa": self.kappa, "argmin": list(self.argmin),
            "negatives": self.negatives,
        }


def certify_transfer(n: int, rho: float, step: int | None = None) -> TransferReport:
    """Exhaustive transfer-gain scan over the coarsened valid-triple grid.

    Valid triples satisfy rho*n^2 <= v1 <= v2 <= n^2 and rho*n^2 <= d <= v1;
    the grid uses the given step (default ceil(rho*n^2/20)) starting at
    ceil(rho*n^2). Reports the minimal gain, the relative margin
    kappa = min gain / (p(v1) + p(v2)) at the argmin, and how many grid
    triples have negative gain.
    """
    if step is None:
        step = math.ceil(rho * n ** 2 / 20)
    floor = math.ceil(rho * n ** 2)
    vals = np.arange(floor, n ** 2 + 1, step, dtype=np.int64)
    v1 = vals[:, None, None]
    v2 = vals[None, :, None]
    d = vals[None, None, :]
    valid = (v1 <= v2) & (d <= v1)
    gain = (min_perimeter_array(v1) + min_perimeter_array(v2)
            - min_perimeter_array(np.maximum(v1 - d, 0))
            - min_perimeter_array(v2 + d))
    gain = np.where(valid, gain, np.iinfo(np.int64).max)
    flat = int(np.argmin(gain))
    i, j, k = np.unravel_index(flat, gain.shape)
    a1, a2, ad = int(vals[i]), int(vals[j]), int(vals[k])
    min_gain = int(gain[i, j, k])
    kappa = min_gain / (min_perimeter(a1) + min_perimeter(a2))
    return TransferReport(
        n=n, rho=rho, step=step, triples=int(valid.sum()),
        min_gain=min_gain, kappa=float(kappa), argmin=(a1, a2, ad),
        negatives=int(np.count_nonzero(np.where(valid, gain, 0) < 0)))
