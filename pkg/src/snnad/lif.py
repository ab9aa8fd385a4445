"""Discrete-time leaky integrate-and-fire layer.

One step is 1 ms. Each step applies exponential decay toward the resting
potential, integrates the input current, then thresholds: neurons at or above
threshold spike, reset, and enter a hard refractory period during which they
clamp at the reset potential and ignore input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class LifParams:
    capacitance: float = 1.0            # uF; divides input current
    leak: float = 1.0 - math.exp(-1 / 100)  # per-step decay fraction g_L
    resting: float = -65.0              # mV
    reset: float = -65.0                # mV
    threshold: float = -55.0            # mV
    refractory_steps: int = 5

    def __post_init__(self):
        if not 0 < self.leak < 1:
            raise ValueError(f"leak {self.leak} must be in (0, 1)")
        if self.capacitance <= 0:
            raise ValueError("capacitance must be positive")
        if self.threshold <= self.resting:
            raise ValueError("threshold must exceed resting potential")
        if self.refractory_steps < 0:
            raise ValueError("refractory_steps must be non-negative")


@dataclass
class LifLayer:
    voltages: np.ndarray
    refractory_remaining: np.ndarray
    spiked_last_step: np.ndarray

    def __len__(self):
        return len(self.voltages)

    def step(self, params: LifParams, input_current: np.ndarray) -> np.ndarray:
        """Advance one millisecond; returns the boolean spike mask."""
        input_current = np.asarray(input_current, dtype=np.float64)
        if input_current.shape != self.voltages.shape:
            raise DimensionMismatch(
                f"current shape {input_current.shape} != layer shape {self.voltages.shape}")
        refractory = self.refractory_remaining > 0
        active = ~refractory
        v = self.voltages
        v[active] = (params.resting
                     + (v[active] - params.resting) * (1.0 - params.leak)
                     + input_current[active] / params.capacitance)
        v[refractory] = params.reset
        self.refractory_remaining[refractory] -= 1
        spikes = active & (v >= params.threshold)
        v[spikes] = params.reset
        self.refractory_remaining[spikes] = params.refractory_steps
        self.spiked_last_step = spikes
        return spikes


def reset_layer(n: int, params: LifParams) -> LifLayer:
    """A layer of ``n`` neurons at rest."""
    if n < 1:
        raise DimensionMismatch("layer needs at least one neuron")
    return LifLayer(
        voltages=np.full(n, params.resting, dtype=np.float64),
        refractory_remaining=np.zeros(n, dtype=np.int64),
        spiked_last_step=np.zeros(n, dtype=bool),
    )
