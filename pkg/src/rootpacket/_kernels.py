"""Compiled hot loops: tree growth, packet scoring, micro-scale batches.

Everything here is numba-jitted with ``cache=True`` (compiled once per
install) and ``nogil=True`` (trials can run on a thread pool).  The RNG is
xoshiro256++ over explicit uint64 state, bit-compatible with the reference
implementation in :mod:`rootpacket.rng`.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_GOLDEN = uint64(0x9E3779B97F4A7C15)


@njit(cache=True, nogil=True, inline="always")
def _mix64(x):
    x = (x ^ (x >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> uint64(27))) * uint64(0x94D049BB133111EB)
    return x ^ (x >> uint64(31))


@njit(cache=True, nogil=True)
def derive_seed2(master, a, b):
    """uint64 sub-seed; matches rng.derive_seed(master, a, b)."""
    x = _mix64(master)
    x = _mix64(x ^ ((a + uint64(1)) * _GOLDEN))
    x = _mix64(x ^ ((b + uint64(1)) * _GOLDEN))
    return x


@njit(cache=True, nogil=True)
def seed_state(state, seed):
    """Fill 4-word xoshiro256++ state from a seed via splitmix64."""
    x = seed
    for i in range(4):
        x = x + _GOLDEN
        state[i] = _mix64(x)


@njit(cache=True, nogil=True, inline="always")
def _xoshiro_next(s):
    r = s[0] + s[3]
    r = ((r << uint64(23)) | (r >> uint64(41))) + s[0]
    t = s[1] << uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << uint64(45)) | (s[3] >> uint64(19))
    return r


@njit(cache=True, nogil=True)
def grow_range(parent, degree, endpoints, state, n_cur, n_stop, alpha):
    """Grow the tree in place from n_cur to n_stop vertices; returns alpha.

    Preferential attachment is realized by drawing a uniform entry of the
    endpoint array (each edge contributes both ends, so entries are
    distributed proportionally to degree).  Bounded uniforms come from
    mask-and-reject on the raw 64-bit stream, which is exact.
    """
    n = n_cur
    mask = uint64(1)
    bound = uint64(2 * (n - 1))
    while mask < bound:
        mask = (mask << uint64(1)) | uint64(1)
    while n < n_stop:
        bound = uint64(2 * (n - 1))
        while mask < bound:
            mask = (mask << uint64(1)) | uint64(1)
        while True:
            v = _xoshiro_next(state) & mask
            if v < bound:
                break
        target = np.int64(endpoints[v])
        nv = n + 1
        parent[nv] = target
        degree[nv] = 1
        degree[target] += 1
        endpoints[2 * (nv - 2)] = nv
        endpoints[2 * (nv - 2) + 1] = target
        alpha *= 1.0 + 0.5 / (n - 1)
        n = nv
    return alpha


@njit(cache=True, nogil=True)
def alpha_product(n):
    """alpha_n = prod_{k=1}^{n-2} (1 + 1/(2k)), same op order as grow_range."""
    a = 1.0
    for k in range(1, n - 1):
        a *= 1.0 + 0.5 / k
    return a


@njit(cache=True, nogil=True)
def packet_stats(parent, degree, n, thresholds):
    """Packet size and root membership for every integer threshold at once.

    thresholds[e] is floor(eps_e * (sqrt(pi)*alpha_n)^3); an edge {i, j}
    qualifies iff max(d_i^2 d_j, d_j^2 d_i) > thresholds[e].  Degrees must
    satisfy d^3 < 2^63 (guarded by the caller).
    """
    ne = thresholds.shape[0]
    size = np.zeros(ne, dtype=np.int64)
    root_in = np.zeros(ne, dtype=np.uint8)
    mark = np.zeros((ne, n + 1), dtype=np.uint8)
    for i in range(2, n + 1):
        di = np.int64(degree[i])
        j = np.int64(parent[i])
        dj = np.int64(degree[j])
        p1 = di * di * dj
        p2 = dj * dj * di
        s = p1 if p1 > p2 else p2
        for e in range(ne):
            if s > thresholds[e]:
                if mark[e, i] == 0:
                    mark[e, i] = 1
                    size[e] += 1
                if mark[e, j] == 0:
                    mark[e, j] = 1
                    size[e] += 1
    for e in range(ne):
        root_in[e] = mark[e, 1]
    return size, root_in


@njit(cache=True, nogil=True)
def micro_root_counts(trials, master_seed, stream_tag, n_target, thresholds_per_n):
    """Batched micro-scale trials: how often is vertex 1 in the packet at n_target.

    thresholds_per_n[e] holds the integer threshold for epsilon e at size
    n_target.  Per-trial seeds are derive_seed2(master_seed, stream_tag, t).
    Returns hit counts per epsilon.
    """
    ne = thresholds_per_n.shape[0]
    hits = np.zeros(ne, dtype=np.int64)
    parent = np.zeros(n_target + 1, dtype=np.int32)
    degree = np.zeros(n_target + 1, dtype=np.int32)
    endpoints = np.zeros(2 * (n_target - 1), dtype=np.int32)
    state = np.zeros(4, dtype=np.uint64)
    for t in range(trials):
        seed_state(state, derive_seed2(master_seed, stream_tag, uint64(t)))
        for i in range(n_target + 1):
            parent[i] = 0
            degree[i] = 0
        parent[2] = 1
        degree[1] = 1
        degree[2] = 1
        endpoints[0] = 2
        endpoints[1] = 1
        grow_range(parent, degree, endpoints, state, 2, n_target, 1.0)
        for e in range(ne):
            thr = thresholds_per_n[e]
            for i in range(2, n_target + 1):
                di = np.int64(degree[i])
                dj = np.int64(degree[parent[i]])
                p1 = di * di * dj
                p2 = dj * dj * di
                s = p1 if p1 > p2 else p2
                if s > thr and parent[i] == 1:
                    hits[e] += 1
                    break
    return hits
