"""Compiled lattice-walk kernels.

Walks move on integer lattice offsets; the caller precomputes which cells are
interior, the source value of every cell and the cell each walk starts from.
Walk ``i`` draws from stream ``offset + i`` (see :mod:`rwbvp.rng`), so the
output arrays are the same for any thread count.
"""
from __future__ import annotations

import importlib.util

import numba as nb
import numpy as np

# the bundled TBB is often too old and numba warns on every import
if nb.config.THREADING_LAYER == "default" and importlib.util.find_spec("numba.np.ufunc.omppool"):
    nb.config.THREADING_LAYER = "omp"

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@nb.njit(inline="always", cache=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(parallel=True, cache=True)
def walk_batch(interior, source, i0, j0, base_key, offset, nt, moves, bits,
               max_steps, use_source):
    steps = np.zeros(nt, dtype=np.int64)
    ssum = np.zeros(nt, dtype=np.float64)
    exit_i = np.empty(nt, dtype=np.int64)
    exit_j = np.empty(nt, dtype=np.int64)
    truncated = np.zeros(nt, dtype=np.bool_)
    shift = np.uint64(64 - bits)
    for w in nb.prange(nt):
        key = _mix64(base_key + np.uint64(offset + w + 1) * _GAMMA)
        i = i0
        j = j0
        n = 0
        acc = 0.0
        while interior[i, j]:
            if n >= max_steps:
                truncated[w] = True
                break
            if use_source:
                acc += source[i, j]
            n += 1
            c = _mix64(key + np.uint64(n) * _GAMMA) >> shift
            i += moves[c, 0]
            j += moves[c, 1]
        steps[w] = n
        ssum[w] = acc
        exit_i[w] = i
        exit_j[w] = j
    return steps, ssum, exit_i, exit_j, truncated
