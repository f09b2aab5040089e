"""Deterministic pseudo-random generation for the tree simulator.

The growth kernels use xoshiro256++ seeded through the splitmix64 finalizer,
implemented as explicit 64-bit integer arithmetic so that a given seed
produces the same tree on every platform and in every release.  Per-trial
seeds are derived from ``(master_seed, stream indices...)`` with
:func:`derive_seed`, so any trial of any experiment can be reproduced in
isolation.

The pure-Python functions in this module are the reference implementation;
the compiled kernels in :mod:`rootpacket._kernels` replicate them and are
pinned to these references by tests.
"""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 output function (a bijection on 64-bit integers)."""
    x &= _MASK
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK
    return x ^ (x >> 31)


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + _GOLDEN) & _MASK
    return state, mix64(state)


def seed_sequence(seed: int) -> list[int]:
    """Four-word xoshiro256++ state from a 64-bit seed via splitmix64."""
    s = seed & _MASK
    out = []
    for _ in range(4):
        s, z = splitmix64_next(s)
        out.append(z)
    return out


def xoshiro256pp_next(s: list[int]) -> int:
    """One step of xoshiro256++; mutates the 4-word state in place."""
    res = (((s[0] + s[3]) & _MASK) << 23 | ((s[0] + s[3]) & _MASK) >> 41) & _MASK
    res = (res + s[0]) & _MASK
    t = (s[1] << 17) & _MASK
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = ((s[3] << 45) | (s[3] >> 19)) & _MASK
    return res


def derive_seed(master_seed: int, *stream: int) -> int:
    """Derive a 64-bit sub-seed from a master seed and stream indices.

    Each index is folded in through the splitmix64 bijection, so distinct
    index tuples (with a common prefix) give distinct sub-seeds and a trial
    can be re-run independently of every other trial.
    """
    x = mix64(master_seed)
    for idx in stream:
        x = mix64(x ^ ((idx + 1) * _GOLDEN & _MASK))
    return x
