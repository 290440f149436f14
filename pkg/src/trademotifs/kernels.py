"""Jitted hot kernels: ESU census and directed edge switching.

Both kernels exist in two forms: the numba ``@njit`` versions here and
pure-Python fallbacks next to their call sites (`esu`, `nullmodel`). The
backend is selected by the ``TRADEMOTIFS_NUMBA`` environment variable
("0" disables the jitted path) or per call; both paths consume identical
SplitMix64 streams and must produce bit-identical results.

The census kernel parallelizes over ESU root nodes. Each root draws from
its own RNG substream and accumulates into its own row of the output
count matrix, so results do not depend on thread count or scheduling.
"""

from __future__ import annotations

import logging
import os

import numpy as np

from . import rng

log = logging.getLogger(__name__)

try:  # pragma: no cover - exercised implicitly by backend dispatch
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_ENV_FLAG = "TRADEMOTIFS_NUMBA"


def numba_enabled() -> bool:
    """Default backend choice: jitted unless disabled by env or missing."""
    return HAVE_NUMBA and os.environ.get(_ENV_FLAG, "1") != "0"


def resolve_backend(use_numba: bool | None) -> bool:
    if use_numba is None:
        return numba_enabled()
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return use_numba


def set_threads(n: int) -> int:
    """Clamp and apply the numba thread count; returns the effective value."""
    if not HAVE_NUMBA:
        return 1
    effective = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(effective)
    return effective


if HAVE_NUMBA:
    _GOLDEN = np.uint64(rng.GOLDEN)
    _MUL1 = np.uint64(0xBF58476D1CE4E5B9)
    _MUL2 = np.uint64(0x94D049BB133111EB)
    _U11 = np.uint64(11)
    _U27 = np.uint64(27)
    _U30 = np.uint64(30)
    _U31 = np.uint64(31)
    _UNIT = rng.UNIT_SCALE

    @njit(cache=True, inline="always")
    def _sm_next(state):
        state = state + _GOLDEN
        z = state
        z = (z ^ (z >> _U30)) * _MUL1
        z = (z ^ (z >> _U27)) * _MUL2
        return state, z ^ (z >> _U31)

    @njit(cache=True, inline="always")
    def _substream(seed, index):
        state = seed ^ (np.uint64(index + 1) * _GOLDEN)
        state, _ = _sm_next(state)
        return state

    @njit(cache=True, parallel=True)
    def census_kernel(indptr, indices, adj, k, code_to_class, probs, seed, counts):
        """ESU census with optional per-depth subsampling.

        counts has shape (n, n_classes); row v receives the leaves found in
        the subtree rooted at v. probs[d] gates expansions to subgraph size
        d+1; a gate only consumes a draw when its probability is below 1.
        """
        n = indptr.shape[0] - 1
        top_bit = k * k - 1
        for v in prange(n):
            state = _substream(seed, v)
            if probs[0] < 1.0:
                state, z = _sm_next(state)
                if np.float64(z >> _U11) * _UNIT >= probs[0]:
                    continue

            mark = np.zeros(n, dtype=np.uint8)
            sub = np.empty(k, dtype=np.int64)
            ext = np.empty((k, n), dtype=np.int64)
            newly = np.empty((k, n), dtype=np.int64)
            elen = np.zeros(k, dtype=np.int64)
            epos = np.zeros(k, dtype=np.int64)
            nlen = np.zeros(k, dtype=np.int64)

            sub[0] = v
            mark[v] = 1
            m0 = 0
            for ii in range(indptr[v], indptr[v + 1]):
                u = indices[ii]
                if u > v:
                    mark[u] = 1
                    ext[0, m0] = u
                    m0 += 1
            elen[0] = m0

            level = 0
            while True:
                if epos[level] < elen[level]:
                    w = ext[level, epos[level]]
                    epos[level] += 1
                    pd = probs[level + 1]
                    if pd < 1.0:
                        state, z = _sm_next(state)
                        if np.float64(z >> _U11) * _UNIT >= pd:
                            continue
                    if level + 2 == k:
                        sub[k - 1] = w
                        code = 0
                        for i in range(k):
                            for j in range(k):
                                if i != j and adj[sub[i], sub[j]] != 0:
                                    code |= 1 << (top_bit - (i * k + j))
                        ci = code_to_class[code]
                        if ci >= 0:
                            counts[v, ci] += 1
                        continue
                    # descend: collect exclusive neighbors of w, merge with
                    # the remaining extension set (both runs are ascending)
                    sub[level + 1] = w
                    nxt = level + 1
                    nl = 0
                    for ii in range(indptr[w], indptr[w + 1]):
                        u = indices[ii]
                        if u > v and mark[u] == 0:
                            mark[u] = 1
                            newly[nxt, nl] = u
                            nl += 1
                    nlen[nxt] = nl
                    a = epos[level]
                    alast = elen[level]
                    b = 0
                    out = 0
                    while a < alast and b < nl:
                        x = ext[level, a]
                        y = newly[nxt, b]
                        if x < y:
                            ext[nxt, out] = x
                            a += 1
                        else:
                            ext[nxt, out] = y
                            b += 1
                        out += 1
                    while a < alast:
                        ext[nxt, out] = ext[level, a]
                        a += 1
                        out += 1
                    while b < nl:
                        ext[nxt, out] = newly[nxt, b]
                        b += 1
                        out += 1
                    elen[nxt] = out
                    epos[nxt] = 0
                    level = nxt
                else:
                    if level == 0:
                        break
                    for t in range(nlen[level]):
                        mark[newly[level, t]] = 0
                    level -= 1

    @njit(cache=True)
    def switch_kernel(src, dst, adj, attempts, seed):
        """In-place directed edge switching; degree sequences invariant.

        Each attempt draws two edge slots (a→b), (c→d) and rewires to
        (a→d), (c→b) only when that neither collides with an existing edge
        nor creates a self-loop or duplicate.
        """
        m = src.shape[0]
        mm = np.uint64(m)
        state = seed
        state, _ = _sm_next(state)
        for _t in range(attempts):
            state, z1 = _sm_next(state)
            state, z2 = _sm_next(state)
            i = np.int64(z1 % mm)
            j = np.int64(z2 % mm)
            a = src[i]
            b = dst[i]
            c = src[j]
            d = dst[j]
            if a == d or c == b or a == c or b == d:
                continue
            if adj[a, d] != 0 or adj[c, b] != 0:
                continue
            adj[a, b] = 0
            adj[c, d] = 0
            adj[a, d] = 1
            adj[c, b] = 1
            dst[i] = d
            dst[j] = b

    def warmup() -> None:
        """Compile the kernels on a toy input (first call pays the JIT)."""
        indptr = np.array([0, 2, 4, 6], dtype=np.int64)
        indices = np.array([1, 2, 0, 2, 0, 1], dtype=np.int64)
        adj = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=np.uint8)
        table = np.full(512, -1, dtype=np.int32)
        counts = np.zeros((3, 1), dtype=np.int64)
        probs = np.array([1.0, 1.0, 0.5])
        census_kernel(indptr, indices, adj, 3, table, probs, np.uint64(1), counts)
        src = np.array([0, 1, 2], dtype=np.int64)
        dst = np.array([1, 2, 0], dtype=np.int64)
        switch_kernel(src, dst, adj.copy(), 4, np.uint64(1))

else:  # pragma: no cover

    def warmup() -> None:
        log.warning("numba not available; pure-Python backends in use")
