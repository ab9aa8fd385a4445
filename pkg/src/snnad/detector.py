"""Turning a spike-count signal into anomaly decisions.

Smoothing is a trailing moving average covering the current record and up to
``window - 1`` earlier ones (shorter prefixes average what exists), so the
detector stays causal. Alerts use a strict ``signal > theta`` comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadWindow, EmptySignal

DEFAULT_SMOOTHING_WINDOWS = (None, 100, 200, 300)


@dataclass(frozen=True)
class DetectorConfig:
    smoothing_window: int | None = None
    threshold: float = 0.0


def smooth(signal, window: int) -> np.ndarray:
    """Trailing moving average; output length equals input length."""
    if window < 1:
        raise BadWindow(f"window {window} must be at least 1")
    signal = np.asarray(signal, dtype=np.float64)
    if signal.size == 0:
        return signal.copy()
    csum = np.concatenate([[0.0], np.cumsum(signal)])
    out = np.empty_like(signal)
    n = len(signal)
    starts = np.maximum(np.arange(n) - window + 1, 0)
    out = (csum[1:] - csum[starts]) / (np.arange(n) - starts + 1)
    return out


def maybe_smooth(signal, window: int | None) -> np.ndarray:
    if window is None:
        return np.asarray(signal, dtype=np.float64)
    return smooth(signal, window)


def threshold_grid(signal, count: int = 10) -> np.ndarray:
    """``count`` thresholds uniformly spaced over [min, max], endpoints
    included."""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.size == 0:
        raise EmptySignal("cannot build a threshold grid from an empty signal")
    if count < 2:
        raise BadWindow("threshold grid needs at least 2 points")
    return np.linspace(signal.min(), signal.max(), count)


def apply_threshold(signal, theta: float) -> np.ndarray:
    return np.asarray(signal, dtype=np.float64) > theta
