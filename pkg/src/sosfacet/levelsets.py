"""Level sets, contours, facets and the erasing/filling maps.

A level set D(phi, l) = {s : phi_s >= l} is identified with the union of the
closed unit squares of its sites. Occupied components use 8-connectivity
(closed squares touching at a corner intersect) and the complement uses
4-connectivity; where two squares meet only at a corner the boundary is
split so that each boundary cycle is a (weakly) simple closed curve and the
occupied region stays connected through the pinch. Operationally the split
is a right-turn rule at degree-4 boundary vertices when tracing with the
occupied region on the left.

Grid conventions: cell (r, c) of the n x n box occupies x in [c, c+1],
y in [r, r+1]; contour vertices live on the integer grid {0..n}^2 in (x, y)
coordinates. Outer boundaries come out counterclockwise (positive shoelace
area), hole boundaries clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy import ndimage

from .model import HeightField, ModelParams

_EIGHT = np.ones((3, 3), dtype=int)


class DegenerateFieldError(ValueError):
    """Raised when no facet level l >= 1 exists for the field."""


@dataclass
class Contour:
    """A closed cycle of dual-lattice unit edges at one level."""

    vertices: tuple  # cycle of (x, y) grid points, first vertex not repeated
    length: int
    interior_area: int
    level: int
    external: bool
    n: int
    _rep_cell: tuple = dc_field(default=None, repr=False, compare=False)
    _mask: Optional[np.ndarray] = dc_field(default=None, repr=False, compare=False)

    @property
    def interior_mask(self) -> np.ndarray:
        """Boolean (n, n) mask of cells enclosed by the cycle (even-odd rule)."""
        if self._mask is None:
            self._mask = _cycle_mask(self.vertices, self.n)
        return self._mask

    def to_record(self) -> dict:
        return {
            "level": self.level,
            "external": self.external,
            "length": self.length,
            "interior_area": self.interior_area,
            "vertices": [list(v) for v in self.vertices],
        }


@dataclass
class Section:
    """A connected component of a level set among mutually external ones."""

    sites: frozenset
    outer_boundary: Contour


@dataclass(frozen=True)
class FacetReport:
    level: int
    f1_area: int
    f2_area: int
    e2_area: int
    small_volume: int
    large_volume: int

    def to_record(self) -> dict:
        return {
            "level": self.level,
            "f1_area": self.f1_area,
            "f2_area": self.f2_area,
            "e2_area": self.e2_area,
            "small_volume": self.small_volume,
            "large_volume": self.large_volume,
        }


def _boundary_cycles(mask: np.ndarray):
    """Trace all boundary cycles of an occupied mask.

    Returns a list of (vertices, signed_area) with vertices the cycle in
    order (occupied region on the left) and signed_area the shoelace area
    (positive = counterclockwise = outer boundary). Degree-4 pinch vertices
    are resolved by taking the right turn, which keeps diagonally touching
    occupied squares on one cycle and diagonally touching holes on separate
    cycles.
    """
    n = mask.shape[0]
    occ = mask

    def occupied(r, c):
        return 0 <= r < n and 0 <= c < n and occ[r, c]

    out = {}
    rows, cols = np.nonzero(occ)
    for r, c in zip(rows.tolist(), cols.tolist()):
        if not occupied(r - 1, c):
            out.setdefault((c, r), []).append((c + 1, r))
        if not occupied(r, c + 1):
            out.setdefault((c + 1, r), []).append((c + 1, r + 1))
        if not occupied(r + 1, c):
            out.setdefault((c + 1, r + 1), []).append((c, r + 1))
        if not occupied(r, c - 1):
            out.setdefault((c, r + 1), []).append((c, r))

    used = set()
    cycles = []
    for tail0, heads in out.items():
        for head0 in heads:
            e0 = (tail0, head0)
            if e0 in used:
                continue
            verts = []
            area2 = 0
            e = e0
            while True:
                used.add(e)
                tail, head = e
                verts.append(tail)
                area2 += tail[0] * head[1] - head[0] * tail[1]
                cands = out[head]
                if len(cands) == 1:
                    nxt = (head, cands[0])
                else:
                    # pinch vertex: take the right turn
                    dx, dy = head[0] - tail[0], head[1] - tail[1]
                    want = (head[0] + dy, head[1] - dx)
                    if want not in cands:
                        raise AssertionError("pinch resolution failed")
                    nxt = (head, want)
                if nxt == e0:
                    break
                e = nxt
            cycles.append((tuple(verts), area2 // 2))
    return cycles


def _cycle_mask(vertices, n: int) -> np.ndarray:
    """Even-odd interior mask of a rectilinear unit-edge cycle."""
    v = np.zeros((n + 1, n), dtype=np.int64)
    k = len(vertices)
    for t in range(k):
        x1, y1 = vertices[t]
        x2, y2 = vertices[(t + 1) % k]
        if x1 == x2:
            v[x1, min(y1, y2)] ^= 1
    # cell (r, c) is inside iff an odd number of cycle edges sits at x > c, row r
    suffix = np.cumsum(v[::-1], axis=0)[::-1]  # suffix[x, r] = sum over x' >= x
    inside = (suffix[1:, :] % 2).astype(bool)  # index c -> x = c + 1
    return inside.T.copy()


def _left_cell(tail, head):
    x, y = tail
    dx, dy = head[0] - x, head[1] - y
    if dx == 1:
        return (y, x)
    if dx == -1:
        return (y - 1, x - 1)
    if dy == 1:
        return (y, x - 1)
    return (y - 1, x)


def _right_cell(tail, head):
    x, y = tail
    dx, dy = head[0] - x, head[1] - y
    if dx == 1:
        return (y - 1, x)
    if dx == -1:
        return (y, x - 1)
    if dy == 1:
        return (y, x)
    return (y - 1, x - 1)


def _contours_of_mask(mask: np.ndarray, level: int) -> list[Contour]:
    """All boundary cycles of a mask as Contour objects with external flags."""
    n = mask.shape[0]
    if not mask.any():
        return []
    raw = _boundary_cycles(mask)
    contours = []
    for verts, area2 in raw:
        ccw = area2 > 0
        # an interior representative: the occupied left cell for outer cycles,
        # the enclosed right cell for hole cycles
        rep = _left_cell(verts[0], verts[1]) if ccw else _right_cell(verts[0], verts[1])
        contours.append(Contour(
            vertices=verts, length=len(verts), interior_area=abs(area2),
            level=level, external=ccw, n=n, _rep_cell=rep))
    # nesting: a cycle is external iff counterclockwise and contained in no
    # other cycle's interior
    for c in contours:
        if not c.external:
            continue
        r, col = c._rep_cell
        for other in contours:
            if other is c:
                continue
            if other.interior_mask[r, col]:
                c.external = False
                break
    return contours


def external_contours_of_mask(mask: np.ndarray, level: int) -> list[Contour]:
    return [c for c in _contours_of_mask(mask, level) if c.external]


def level_set(field: HeightField, l: int) -> set:
    """D(phi, l): the set of sites (r, c) with height >= l."""
    rows, cols = np.nonzero(field.heights >= l)
    return set(zip(rows.tolist(), cols.tolist()))


def level_mask(field: HeightField, l: int) -> np.ndarray:
    return field.heights >= l


def contours_of(field: HeightField, l: int) -> tuple[list[Contour], list[Section]]:
    """All contours of D(phi, l) plus the mutually external sections."""
    mask = level_mask(field, l)
    contours = _contours_of_mask(mask, l)
    sections = []
    if contours:
        labels, _ = ndimage.label(mask, structure=_EIGHT)
        for c in contours:
            if not c.external:
                continue
            lab = labels[c._rep_cell]
            rows, cols = np.nonzero(labels == lab)
            sections.append(Section(
                sites=frozenset(zip(rows.tolist(), cols.tolist())),
                outer_boundary=c))
    return contours, sections


def classify_contour(c: Contour, n: int, k_large: float) -> str:
    """'large' when the boundary length reaches k_large * ln(n)."""
    return "large" if c.length >= k_large * math.log(n) else "small"


def facet_level(field: HeightField, a: float) -> Optional[int]:
    """Maximal l >= 1 with |D(phi, l)| >= a * n^2, or None if none exists."""
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    h = field.heights
    hmax = int(h.max())
    threshold = a * field.n ** 2
    for l in range(hmax, 0, -1):
        if np.count_nonzero(h >= l) >= threshold:
            return l
    return None


def facet_report(field: HeightField, params: ModelParams) -> FacetReport:
    """L(phi), |F1|, |F2|, E2 and the small/large external-volume split at L."""
    level = facet_level(field, params.a)
    if level is None:
        raise DegenerateFieldError("no facet level >= 1")
    n = field.n
    f1 = int(np.count_nonzero(field.heights >= level))
    f2 = int(np.count_nonzero(field.heights >= level - 1))
    e2 = sum(c.interior_area
             for c in external_contours_of_mask(level_mask(field, level - 1), level - 1))
    small = large = 0
    for c in external_contours_of_mask(level_mask(field, level), level):
        if classify_contour(c, n, params.k_large) == "large":
            large += c.interior_area
        else:
            small += c.interior_area
    return FacetReport(level, f1, f2, int(e2), small, large)


def erase(field: HeightField, contours: list[Contour]) -> HeightField:
    """Lower the field by 1 inside each contour interior.

    The interiors must be pairwise disjoint. When the contours are external
    level-set contours of the field at a level >= 1, the energy drops by
    exactly the total contour length (the Peierls-map identity, checked in
    the tests rather than required here).
    """
    total = np.zeros((field.n, field.n), dtype=np.int64)
    for c in contours:
        total += c.interior_mask
    if (total > 1).any():
        raise ValueError("contour interiors overlap")
    return HeightField(field.n, field.heights - total, field.boundary)


def fill_squares(field: HeightField, side_big: int, side_small: int) -> HeightField:
    """Add +1 on two squares anchored at the (0, 0) corner of the box.

    The inverse direction of the droplet-filling injection: the volume grows
    by side_big^2 + side_small^2 and the energy by at most the two minimal
    droplet perimeters.
    """
    n = field.n
    for side in (side_big, side_small):
        if side < 0 or side > n:
            raise ValueError(f"square side {side} exceeds the box (n={n})")
    h = field.heights.copy()
    h[:side_big, :side_big] += 1
    h[:side_small, :side_small] += 1
    return HeightField(n, h, field.boundary)


def second_order_externals(field: HeightField, params: ModelParams) -> list[Contour]:
    """External contours of the level-(L-1) family minus its first-order externals.

    These are the outermost contours among the remaining (hole and nested)
    boundary components of D(phi, L-1).
    """
    level = facet_level(field, params.a)
    if level is None:
        raise DegenerateFieldError("no facet level >= 1")
    contours = _contours_of_mask(level_mask(field, level - 1), level - 1)
    rest = [c for c in contours if not c.external]
    result = []
    for c in rest:
        r, col = c._rep_cell
        if any(o.interior_mask[r, col] for o in rest if o is not c):
            continue
        result.append(c)
    return result
