"""Deterministic 64-bit RNG streams shared by all randomized stages.

The generator is SplitMix64. The jitted kernels carry their own copy of the
same arithmetic (uint64 wraparound); :func:`sm_next` here is the pure-Python
twin operating on masked ints, and the two are required to produce identical
streams bit for bit. That identity is what makes the numba and fallback
backends interchangeable, and it is covered by tests.

Every randomized operation draws from a private stream derived from a base
seed plus integer or string tags (stage name, replicate index, root node),
so results never depend on scheduling or worker count.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15
_SM_MUL1 = 0xBF58476D1CE4E5B9
_SM_MUL2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

#: Multiplier turning the top 53 bits of a draw into a float in [0, 1).
UNIT_SCALE = 1.0 / 9007199254740992.0


def sm_next(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state; return (new_state, 64-bit output)."""
    state = (state + GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _SM_MUL1) & _MASK64
    z = ((z ^ (z >> 27)) * _SM_MUL2) & _MASK64
    return state, z ^ (z >> 31)


def unit(z: int) -> float:
    """Map a 64-bit draw to a float in [0, 1) (exact, backend-independent)."""
    return (z >> 11) * UNIT_SCALE


def substream(seed: int, index: int) -> int:
    """State of the independent stream keyed by (seed, index).

    Used per ESU root node and per null-model replicate; streams for
    different indices are decorrelated by one mixing round.
    """
    state = (seed ^ (((index + 1) * GOLDEN) & _MASK64)) & _MASK64
    state, _ = sm_next(state)
    return state


def derive_seed(master: int, *tags: int | str) -> int:
    """Derive a stage seed from a master seed and a tag path.

    FNV-1a over the master seed and the encoded tags, finished with one
    SplitMix64 round. This is the single key-derivation rule the CLI uses:
    each pipeline stage gets ``derive_seed(master, stage_name, *indices)``.
    """
    h = _FNV_OFFSET
    parts: list[bytes] = [(master & _MASK64).to_bytes(8, "little")]
    for tag in tags:
        if isinstance(tag, str):
            parts.append(tag.encode("utf-8"))
        else:
            parts.append((tag & _MASK64).to_bytes(8, "little"))
    for part in parts:
        for byte in part:
            h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    _, out = sm_next(h)
    return out
