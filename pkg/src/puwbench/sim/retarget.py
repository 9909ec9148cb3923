"""Difficulty retargeting with Bitcoin-style x4 / x1/4 clamping."""

from __future__ import annotations

from fractions import Fraction

from ..base import Difficulty, as_difficulty

CLAMP = 4


def retarget_difficulty(window_timestamps, current_diff, target_interblock: float, clamp: float = CLAMP) -> Difficulty:
    """Scale ``current_diff`` by expected / actual window duration.

    ``window_timestamps`` holds the block times bounding the window, so a
    window of W intervals carries W + 1 timestamps.
    """
    ts = list(window_timestamps)
    if len(ts) < 2:
        raise ValueError("need at least two timestamps")
    if not target_interblock > 0:
        raise ValueError("target interblock must be positive")
    expected = (len(ts) - 1) * target_interblock
    actual = ts[-1] - ts[0]
    factor = clamp if actual <= 0 else min(max(expected / actual, 1.0 / clamp), clamp)
    current = as_difficulty(current_diff).value
    if isinstance(current, (int, Fraction)) and isinstance(factor, (int, Fraction)):
        return Difficulty(Fraction(current) * Fraction(factor))
    return Difficulty(float(current) * float(factor))
