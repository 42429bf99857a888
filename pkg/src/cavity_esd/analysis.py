"""Qualitative features of concurrence curves: death, revivals, dark intervals."""

from __future__ import annotations

import numpy as np

ZERO_THRESHOLD = 1e-6
REVIVAL_THRESHOLD = 1e-3


def first_zero_index(values, zero_threshold: float = ZERO_THRESHOLD) -> int | None:
    hits = np.flatnonzero(np.asarray(values) < zero_threshold)
    return int(hits[0]) if hits.size else None


def first_zero_time(times, values, zero_threshold: float = ZERO_THRESHOLD) -> float | None:
    i = first_zero_index(values, zero_threshold)
    return None if i is None else float(np.asarray(times)[i])


def revival_peaks(
    values,
    zero_threshold: float = ZERO_THRESHOLD,
    revival_threshold: float = REVIVAL_THRESHOLD,
) -> list[tuple[int, float]]:
    """Peaks of the excursions above ``revival_threshold`` that follow a
    zero interval. Returns ``(index, peak value)`` pairs in time order."""
    c = np.asarray(values, dtype=float)
    peaks = []
    armed = False
    current = None
    for i, v in enumerate(c):
        if v < zero_threshold:
            if current is not None:
                peaks.append(current)
                current = None
            armed = True
        elif armed and v > revival_threshold:
            if current is None or v > current[1]:
                current = (i, float(v))
    if current is not None:
        peaks.append(current)
    return peaks


def revival_count(values, zero_threshold: float = ZERO_THRESHOLD, revival_threshold: float = REVIVAL_THRESHOLD) -> int:
    return len(revival_peaks(values, zero_threshold, revival_threshold))


def dark_interval(times, values, recovery_level: float = 0.1, zero_threshold: float = ZERO_THRESHOLD) -> float:
    """Time from the first death to the first recovery above ``recovery_level``.

    Zero when the curve never dies; ``inf`` when it never recovers.
    """
    t = np.asarray(times, dtype=float)
    c = np.asarray(values, dtype=float)
    i0 = first_zero_index(c, zero_threshold)
    if i0 is None:
        return 0.0
    later = np.flatnonzero(c[i0:] > recovery_level)
    if not later.size:
        return float("inf")
    return float(t[i0 + later[0]] - t[i0])


def max_rise(values, stop: int | None = None) -> float:
    """Largest step-to-step increase of ``values[:stop]`` (0 for a nonincreasing curve)."""
    c = np.asarray(values, dtype=float)[:stop]
    if c.size < 2:
        return 0.0
    return float(max(0.0, np.diff(c).max()))
