"""Uniform random partitions, their limit shape, and monolayer numerics.

A uniformly random partition of n, rescaled by sqrt(n) in both axes, has a
boundary converging to the curve exp(-c u) + exp(-c v) = 1, c = pi/sqrt(6).
The monolayer-size equation (k - 4x)^2 = C x^3 with
C = 2^11 * 3^3 * zeta(3)^2 / pi^6 determines the width x of the extra layer
on a near-cubic equilibrium crystal of side k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import _kernels

# curve constant pi / sqrt(6)
_C = math.pi / math.sqrt(6.0)


@dataclass(frozen=True)
class YoungDiagram:
    """A partition as a nonincreasing tuple of positive parts."""

    parts: tuple
    size: int

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("parts must be nonincreasing")
        if sum(self.parts) != self.size:
            raise ValueError("size must equal the sum of the parts")

    @classmethod
    def from_parts(cls, parts) -> "YoungDiagram":
        parts = tuple(sorted((int(p) for p in parts), reverse=True))
        return cls(parts, sum(parts))

    @classmethod
    def from_multiplicities(cls, mult: np.ndarray) -> "YoungDiagram":
        """Build from mult[k-1] = number of parts equal to k."""
        parts = np.repeat(np.arange(1, len(mult) + 1), mult)[::-1]
        return cls(tuple(int(p) for p in parts), int(parts.sum()))


def vershik_curve(u: float) -> float:
    """v with exp(-c u) + exp(-c v) = 1; the partition limit shape."""
    if u <= 0:
        raise ValueError(f"u must be positive, got {u}")
    return -math.log1p(-math.exp(-_C * u)) / _C


def vershik_symmetric_point() -> float:
    """The u = v point of the curve: (sqrt(6)/pi) * ln 2."""
    return math.log(2.0) / _C


def sample_partitions(n: int, count: int, seed: int) -> np.ndarray:
    """Multiplicity vectors of `count` uniform partitions of n.

    Returns an int64 array of shape (count, n) with row sums n. Exactly
    uniform: Boltzmann-sampled attempts are accepted only when the total is
    n. Deterministic in (n, count, seed) and backend-independent.
    """
    if n < 1 or count < 1:
        raise ValueError("n and count must be positive")
    if not 0 <= seed < 2 ** 32:
        raise ValueError("seed must be a 32-bit unsigned integer")
    out = np.zeros((count, n), dtype=np.int64)
    _kernels.sample_partitions_kernel(n, count, seed, out)
    return out


def sample_partition(n: int, rng_state) -> YoungDiagram:
    """One uniform partition of n; rng_state is a seed or numpy Generator."""
    if isinstance(rng_state, np.random.Generator):
        seed = int(rng_state.integers(2 ** 32))
    else:
        seed = int(rng_state)
    return YoungDiagram.from_multiplicities(sample_partitions(n, 1, seed)[0])


def _corner_points(mult: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Staircase vertices (u = part size, v = row count), axis ends included."""
    ks = np.nonzero(mult)[0] + 1  # distinct part sizes, ascending
    ms = mult[ks - 1]
    total = int(ms.sum())
    # rows above each distinct size when parts are listed nonincreasing
    above = total - np.cumsum(ms)
    below = above + ms
    u = np.concatenate([ks.astype(np.float64), ks.astype(np.float64), [0.0]])
    v = np.concatenate([above.astype(np.float64), below.astype(np.float64),
                        [float(total)]])
    return u, v


def _diagonal_distance(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Distance from (u, v) to the limit curve along the (1,1) direction.

    Sliding (u, v) by s/sqrt(2) in both coordinates scales
    exp(-c u) + exp(-c v) by exp(-c s/sqrt(2)), so the signed shift onto the
    curve is s = sqrt(2) * ln(exp(-c u) + exp(-c v)) / c.
    """
    g = np.exp(-_C * u) + np.exp(-_C * v)
    return np.abs(np.log(g)) * math.sqrt(2.0) / _C


def profile_deviation(d: YoungDiagram) -> float:
    """Sup distance of the sqrt(n)-rescaled staircase corners to the curve."""
    mult = np.zeros(d.parts[0] if d.parts else 1, dtype=np.int64)
    for p in d.parts:
        mult[p - 1] += 1
    return deviation_from_multiplicities(mult, d.size)


def deviation_from_multiplicities(mult: np.ndarray, n: int) -> float:
    if n < 1:
        raise ValueError("size must be >= 1")
    u, v = _corner_points(np.asarray(mult, dtype=np.int64))
    scale = 1.0 / math.sqrt(n)
    return float(_diagonal_distance(u * scale, v * scale).max())


def enumerate_partitions(n: int) -> list[tuple]:
    """All partitions of n as nonincreasing tuples."""
    if n < 0:
        raise ValueError("n must be >= 0")

    def rec(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(min(cap, remaining), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    return list(rec(n, n))


def zeta3(terms: int = 5000):
    """zeta(3) from the defining series with an Euler-Maclaurin tail.

    The tail sum_{j>M} j^-3 is 1/(2M^2) - 1/(2M^3) + 1/(4M^4) - 1/(12M^6)
    + O(M^-8); with M = 5000 the truncation error is below 1e-22. Evaluated
    at the current mpmath precision.
    """
    m = terms
    s = mpmath.fsum(mpmath.mpf(j) ** -3 for j in range(1, m + 1))
    mm = mpmath.mpf(m)
    tail = 1 / (2 * mm ** 2) - 1 / (2 * mm ** 3) + 1 / (4 * mm ** 4) \
        - 1 / (12 * mm ** 6)
    return s + tail


@lru_cache(maxsize=None)
def _monolayer_constant_mp(dps: int):
    with mpmath.workdps(dps):
        return 2 ** 11 * 3 ** 3 * zeta3() ** 2 / mpmath.pi ** 6


def monolayer_constant() -> float:
    """C = 2^11 * 3^3 * zeta(3)^2 / pi^6, about 83.11."""
    return float(_monolayer_constant_mp(30))


def solve_monolayer_x(k: float, dps: int = 50):
    """Root x of (k - 4x)^2 = C x^3 on (0, k/4).

    Bisection in mpmath arithmetic (the residual scales like k^3 times the
    relative error in x, so float64 cannot certify residuals below 1e-9 for
    k beyond about 1e4). Returns an mpmath mpf; monolayer_residual evaluates
    the defect at matching precision.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    with mpmath.workdps(dps):
        c = _monolayer_constant_mp(dps)
        kk = mpmath.mpf(k)

        def f(x):
            return (kk - 4 * x) ** 2 - c * x ** 3

        lo, hi = mpmath.mpf(0), kk / 4
        if f(lo) <= 0 or f(hi) >= 0:
            raise ValueError(f"no sign change on (0, k/4) for k={k}")
        for _ in range(dps * 4):
            mid = (lo + hi) / 2
            if f(mid) > 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def monolayer_residual(k: float, x, dps: int = 50) -> float:
    """|(k - 4x)^2 - C x^3| evaluated in mpmath arithmetic."""
    with mpmath.workdps(dps):
        c = _monolayer_constant_mp(dps)
        kk = mpmath.mpf(k)
        xx = mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
        return float(abs((kk - 4 * xx) ** 2 - c * xx ** 3))


def quasicube_volume(n: int, mu: float) -> int:
    """K = n^3 + k(k-1) + 1 with k = floor(mu * n): the monolayer volumes."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    k = math.floor(mu * n + 1e-9)
    return n ** 3 + k * (k - 1) + 1
