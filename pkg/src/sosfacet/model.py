"""Height-field configurations of the solid-on-solid (SOS) crystal.

A configuration is an integer height phi_s on an N x N box, with a constant
boundary height outside the box (0 in all experiments). The energy is the
number of vertical unit plaquettes of the surface, i.e. the sum of |phi_s -
phi_t| over nearest-neighbour pairs, counting pairs that straddle the box
boundary against the boundary height.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class HeightField:
    """An SOS configuration on an n x n box with constant outside height."""

    n: int
    heights: np.ndarray
    boundary: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"box side must be positive, got {self.n}")
        h = np.asarray(self.heights, dtype=np.int64)
        if h.shape != (self.n, self.n):
            raise ValueError(f"heights must be {self.n}x{self.n}, got {h.shape}")
        object.__setattr__(self, "heights", h)

    def shifted(self, c: int) -> "HeightField":
        """Field with c added to every height (boundary unchanged)."""
        return HeightField(self.n, self.heights + c, self.boundary)

    # -- plain-text grid format: first line N, then N rows of N integers --

    def to_text(self) -> str:
        rows = [" ".join(str(v) for v in row) for row in self.heights]
        return "\n".join([str(self.n)] + rows) + "\n"

    @classmethod
    def from_text(cls, text: str, boundary: int = 0) -> "HeightField":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        n = int(lines[0])
        if len(lines) != n + 1:
            raise ValueError(f"expected {n} rows, got {len(lines) - 1}")
        rows = [[int(v) for v in ln.split()] for ln in lines[1:]]
        return cls(n, np.array(rows, dtype=np.int64), boundary)

    # -- equivalent structured JSON form --

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "boundary": self.boundary, "heights": self.heights.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "HeightField":
        d = json.loads(text)
        return cls(d["n"], np.array(d["heights"], dtype=np.int64), d["boundary"])


@dataclass(frozen=True)
class ModelParams:
    """Model and analysis parameters.

    beta:    inverse temperature (> 0)
    lam:     volume fraction; the canonical constraint is V >= lam * N^3
    a:       facet threshold in (0, 1); the facet level is the maximal l
             with |D(phi, l)| >= a * N^2
    k_large: a contour is large when its length is >= k_large * ln N
    """

    beta: float
    lam: float
    a: float = 0.1
    k_large: float = 10.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not 0 < self.a < 1:
            raise ValueError(f"a must lie in (0, 1), got {self.a}")
        if self.k_large <= 0:
            raise ValueError(f"k_large must be positive, got {self.k_large}")


def energy(field: HeightField) -> int:
    """Surface energy: sum of |height jumps| over unordered NN pairs.

    Pairs with at least one endpoint in the box contribute; pairs crossing
    the box boundary are taken against the constant outside height. Each
    unordered pair is counted once, so with zero boundary this is the number
    of vertical plaquettes of the surface.
    """
    h = field.heights
    interior = np.abs(np.diff(h, axis=0)).sum() + np.abs(np.diff(h, axis=1)).sum()
    b = field.boundary
    rim = (
        np.abs(h[0, :] - b).sum()
        + np.abs(h[-1, :] - b).sum()
        + np.abs(h[:, 0] - b).sum()
        + np.abs(h[:, -1] - b).sum()
    )
    return int(interior + rim)


def vertical_plaquettes(field: HeightField) -> int:
    """S(phi), the number of vertical plaquettes of the SOS surface.

    With constant boundary this coincides with the energy; kept as a named
    observable for the Peierls-type height diagnostics.
    """
    return energy(field)


def volume(field: HeightField) -> int:
    """Total volume V(phi) = sum of all heights (may be negative)."""
    return int(field.heights.sum())
