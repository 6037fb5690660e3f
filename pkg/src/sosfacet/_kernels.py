"""Hot inner loops: Metropolis sweeps and the Boltzmann partition sampler.

Both kernels exist in two flavours: a numba ``@njit`` build and the identical
pure-Python function. The active flavour is picked at import time from the
``SOSFACET_BACKEND`` environment variable:

    SOSFACET_BACKEND=numba   force numba (ImportError if unavailable)
    SOSFACET_BACKEND=numpy   force the pure-Python fallback
    (unset / auto)           numba when importable, fallback otherwise

The two flavours run the same code on the same random-number streams. The
sweep kernel is bit-identical across backends (its only transcendental, the
acceptance exp table, is precomputed outside). The partition kernel is
deterministic per backend but can differ between them: it evaluates log/exp
inside the loop and numba's libm may round a ULP differently, which
occasionally flips a geometric jump.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "run_sweeps",
    "sample_partitions_kernel",
    "py_run_sweeps",
    "py_sample_partitions_kernel",
    "jit_run_sweeps",
    "jit_sample_partitions_kernel",
]


def _run_sweeps(heights, boundary, signs, uniforms, exp_table,
                vmin, hfloor, hceil, vol, emit_offsets, out_fields):
    """Run len(signs) raster-scan Metropolis sweeps in place.

    signs[s, idx] selects the proposal direction (0 -> +1, 1 -> -1) and
    uniforms[s, idx] is the acceptance coin for proposal idx of sweep s.
    exp_table[d] = exp(-beta * d) for the possible energy increases
    d = 0..4. A proposal is rejected outright when it would push the volume
    below vmin or the height outside [hfloor, hceil]. After sweep
    emit_offsets[e] the current field is copied into out_fields[e].

    Returns (volume after the last sweep, total accepted proposals).
    """
    n = heights.shape[0]
    nsq = n * n
    nemit = emit_offsets.shape[0]
    e = 0
    accepted = 0
    for s in range(signs.shape[0]):
        for idx in range(nsq):
            i = idx // n
            j = idx - i * n
            d = 1 if signs[s, idx] == 0 else -1
            h0 = heights[i, j]
            h1 = h0 + d
            if h1 < hfloor or h1 > hceil:
                continue
            if vol + d < vmin:
                continue
            up = heights[i - 1, j] if i > 0 else boundary
            dn = heights[i + 1, j] if i < n - 1 else boundary
            lf = heights[i, j - 1] if j > 0 else boundary
            rt = heights[i, j + 1] if j < n - 1 else boundary
            dh = (abs(h1 - up) - abs(h0 - up)
                  + abs(h1 - dn) - abs(h0 - dn)
                  + abs(h1 - lf) - abs(h0 - lf)
                  + abs(h1 - rt) - abs(h0 - rt))
            if dh > 0 and uniforms[s, idx] >= exp_table[dh]:
                continue
            heights[i, j] = h1
            vol += d
            accepted += 1
        if e < nemit and emit_offsets[e] == s:
            out_fields[e] = heights
            e += 1
    return vol, accepted


def _sample_partitions(n, count, seed, out):
    """Fill out[(count, n)] with multiplicity vectors of uniform partitions.

    Boltzmann sampler: part k has an independent geometric multiplicity with
    parameter x**k, x = exp(-pi / sqrt(6 n)); an attempt is accepted when the
    total is exactly n, which makes the accepted partition exactly uniform.
    Part sizes > n can never contribute to an accepted attempt, so the
    product is truncated at k = n. The sparse tail is walked with geometric
    jumps thinned against the dominating rate x**(k+1), which keeps one
    attempt at O(sqrt(n)) work instead of O(n).

    Consumes numpy's legacy MT19937 stream seeded with `seed` (numba's
    np.random is stream-compatible, hence backend-independent results; the
    pure-Python build touches numpy's global legacy RNG state).

    Returns the number of attempts used.
    """
    np.random.seed(seed)
    lnx = -math.pi / math.sqrt(6.0 * n)
    ks = np.empty(n + 1, np.int64)
    ms = np.empty(n + 1, np.int64)
    got = 0
    attempts = 0
    while got < count:
        attempts += 1
        total = 0
        cnt = 0
        k = 0
        overshoot = False
        while True:
            # next candidate part size at k + g, g geometric with the
            # dominating success rate q = x**(k+1)
            q = math.exp((k + 1) * lnx)
            u = np.random.random()
            g = 1 + int(math.log(u) / math.log1p(-q))
            j = k + g
            if j > n:
                break
            if g > 1:
                # thin: true success rate at j is x**j = q * x**(g-1)
                u2 = np.random.random()
                if u2 >= math.exp((g - 1) * lnx):
                    k = j
                    continue
            u3 = np.random.random()
            m = 1 + int(math.log(u3) / (j * lnx))
            total += j * m
            if total > n:
                overshoot = True
                break
            ks[cnt] = j
            ms[cnt] = m
            cnt += 1
            k = j
        if not overshoot and total == n:
            for t in range(cnt):
                out[got, ks[t] - 1] = ms[t]
            got += 1
    return attempts


py_run_sweeps = _run_sweeps
py_sample_partitions_kernel = _sample_partitions

try:
    from numba import njit

    jit_run_sweeps = njit(cache=True)(_run_sweeps)
    jit_sample_partitions_kernel = njit(cache=True)(_sample_partitions)
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    jit_run_sweeps = None
    jit_sample_partitions_kernel = None
    _HAVE_NUMBA = False

_choice = os.environ.get("SOSFACET_BACKEND", "auto").lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(f"SOSFACET_BACKEND must be auto|numba|numpy, got {_choice!r}")
if _choice == "numba" and not _HAVE_NUMBA:
    raise ImportError("SOSFACET_BACKEND=numba but numba is not importable")

if _choice == "numpy" or not _HAVE_NUMBA:
    BACKEND = "numpy"
    run_sweeps = py_run_sweeps
    sample_partitions_kernel = py_sample_partitions_kernel
else:
    BACKEND = "numba"
    run_sweeps = jit_run_sweeps
    sample_partitions_kernel = jit_sample_partitions_kernel
