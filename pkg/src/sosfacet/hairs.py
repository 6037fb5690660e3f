"""Hair detection and the multi-scale excitation diagnostics.

A hair is a maximal nested chain of contours recording a local excitation of
the facet: up-hairs stack external contours of the level sets above the facet
level, down-hairs do the same for the depression sets {phi <= L - i}. The
scale sequences v_r (area scales, halving) and h_r (height budgets) quantify
how tall an excitation sitting on a given area can be.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HeightField, ModelParams
from .levelsets import (Contour, DegenerateFieldError, external_contours_of_mask,
                        facet_level, level_mask)


@dataclass(frozen=True)
class Hair:
    """A maximal nested chain of contours; length is the chain height H."""

    direction: str  # "up" or "down"
    contours: tuple
    length: int

    def __post_init__(self):
        if self.direction not in ("up", "down"):
            raise ValueError(f"direction must be up|down, got {self.direction!r}")
        if self.length != len(self.contours) or self.length < 1:
            raise ValueError("length must equal the number of contours")


def default_c1(k_large: float) -> float:
    """Area constant making contours of area >= c1 (ln n)^2 large.

    A droplet of area c1 (ln n)^2 has perimeter >= 4 sqrt(c1) ln n, so
    c1 = (k_large/4)^2 pushes such contours past the large-contour cutoff.
    """
    return (k_large / 4.0) ** 2


@dataclass(frozen=True)
class ScaleTable:
    """Area scales v_r and height budgets h_r for excitation counting."""

    n: int
    a: float
    c1: float
    c2: float
    v_r: np.ndarray
    h_r: np.ndarray
    r_max: int
    r_prime: float
    c3: float  # reported constant with sum(h_r) <= c3 * ln n


def f2_interior_mask(field: HeightField, params: ModelParams) -> np.ndarray:
    """Union of the interiors of the external contours of the Second Facet."""
    level = facet_level(field, params.a)
    if level is None:
        raise DegenerateFieldError("no facet level >= 1")
    mask = np.zeros((field.n, field.n), dtype=bool)
    for c in external_contours_of_mask(level_mask(field, level - 1), level - 1):
        mask |= c.interior_mask
    return mask


def _chains(layers: list[list[Contour]], root_mask: np.ndarray,
            direction: str) -> list[Hair]:
    """Maximal root-to-leaf chains in the containment forest of the layers.

    layers[i] holds the external contours at depth i+1; a contour is a child
    of the depth-i contour whose interior contains it (the level sets are
    nested, so the representative cell decides containment). Roots must sit
    inside root_mask. Every maximal branch yields one hair.
    """
    hairs = []

    def descend(prefix: list, depth: int):
        last = prefix[-1]
        children = []
        if depth < len(layers):
            children = [c for c in layers[depth]
                        if last.interior_mask[c._rep_cell]]
        if not children:
            hairs.append(Hair(direction, tuple(prefix), len(prefix)))
            return
        for c in children:
            descend(prefix + [c], depth + 1)

    for root in layers[0] if layers else []:
        if root_mask[root._rep_cell]:
            descend([root], 1)
    return hairs


def extract_hairs(field: HeightField, params: ModelParams) -> list[Hair]:
    """All maximal up-hairs and down-hairs of the field.

    Up-hairs chain external contours of {phi >= L+i}, i = 1, 2, ...; their
    first contour must lie inside the Second Facet interior. Down-hairs chain
    external contours of the depression sets {phi <= L-i}, i = 1, 2, ...
    (the level sets of the reflected field), so a pit of depth H below the
    facet yields a down-hair of length H.
    """
    level = facet_level(field, params.a)
    if level is None:
        raise DegenerateFieldError("no facet level >= 1")
    h = field.heights
    root_mask = f2_interior_mask(field, params)

    up_layers = []
    i = 1
    while (h >= level + i).any():
        up_layers.append(external_contours_of_mask(h >= level + i, level + i))
        i += 1

    down_layers = []
    i = 1
    while (h <= level - i).any():
        down_layers.append(external_contours_of_mask(h <= level - i, level - i))
        i += 1

    return (_chains(up_layers, root_mask, "up")
            + _chains(down_layers, root_mask, "down"))


def max_deviation_in_f2(field: HeightField, params: ModelParams) -> int:
    """Max of |phi_s - L| over the Second Facet interior."""
    level = facet_level(field, params.a)
    if level is None:
        raise DegenerateFieldError("no facet level >= 1")
    mask = f2_interior_mask(field, params)
    if not mask.any():
        return 0
    return int(np.abs(field.heights[mask] - level).max())


def scale_table(n: int, a: float, c1: float, c2: float) -> ScaleTable:
    """Area scales v_r = a n^2 / 2^r with their height budgets h_r.

    h_r is 4 below the intermediate scale r' = log2(a n^2 / (c1 ln^2 n)) and
    c2 * 2^(r/2) * ln(n) / n above it, which makes sqrt(v_{r+1}) * h_r
    constant (= sqrt(a/2) c2 ln n) there. Parameters must give the budget at
    the crossover, (sqrt(a)/sqrt(c1)) * c2, a value >= 10.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if min(a, c1, c2) <= 0:
        raise ValueError("a, c1, c2 must be positive")
    crossover = math.sqrt(a) / math.sqrt(c1) * c2
    if crossover < 10:
        raise ValueError(
            f"(sqrt(a)/sqrt(c1))*c2 = {crossover:.3f} < 10; "
            "increase c2 or decrease c1")
    logn = math.log(n)
    r_max = int(math.floor(math.log2(a * n * n)))  # largest r with v_r >= 1
    r = np.arange(r_max + 1)
    v_r = a * n * n / np.exp2(r)
    r_prime = math.log2(a * n * n / (c1 * logn * logn))
    h_r = np.where(r < r_prime, 4.0, c2 * np.exp2(r / 2.0) * logn / n)
    c3 = float(h_r.sum() / logn)
    return ScaleTable(n=n, a=a, c1=c1, c2=c2, v_r=v_r, h_r=h_r,
                      r_max=r_max, r_prime=r_prime, c3=c3)
