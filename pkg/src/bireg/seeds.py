"""Deterministic 64-bit seed derivation.

One master seed drives everything; per-trial and per-component streams are
derived with a splitmix64-style mixer so results are independent of worker
scheduling.  The same mixer is implemented inside the compiled kernels; a
test pins the two implementations together.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + _GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = z ^ (z >> 31)
    return state, z


def mix64(master: int, *words: int) -> int:
    """Fold extra words into a master seed; order-sensitive, 64-bit output."""
    state = master & MASK64
    _, out = splitmix64(state)
    for w in words:
        state = (out ^ ((w & MASK64) * _GAMMA)) & MASK64
        _, out = splitmix64(state)
    return out


def trial_seed(master: int, *indices: int) -> int:
    """Per-trial seed from (master, row/trial indices)."""
    return mix64(master, *indices)
