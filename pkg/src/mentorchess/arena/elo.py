"""Elo expected score and rating difference."""

from __future__ import annotations

import math


class UndefinedRatingError(ValueError):
    pass


def elo_expected_score(rd: float) -> float:
    """Expected score of the player rated `rd` points above the opponent."""
    if not math.isfinite(rd):
        raise ValueError("rating difference must be finite")
    return 1.0 / (10.0 ** (-rd / 400.0) + 1.0)


def elo_diff(w: float) -> float:
    """Rating difference implied by winning rate `w` (inverse of elo_expected_score)."""
    if not 0.0 < w < 1.0:
        raise UndefinedRatingError(f"rating difference undefined for winning rate {w}")
    return -400.0 * math.log10(1.0 / w - 1.0)
