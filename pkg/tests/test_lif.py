import math

import numpy as np
import pytest

from snnad.errors import DimensionMismatch
from snnad.lif import LifParams, reset_layer


def test_decay_step_closed_form():
    # (V - E_L) scales by exp(-1/100) per zero-input step
    params = LifParams(leak=1 - math.exp(-1 / 100))
    layer = reset_layer(1, params)
    layer.voltages[0] = -60.0
    layer.step(params, np.zeros(1))
    assert layer.voltages[0] == pytest.approx(-65 + 5 * math.exp(-1 / 100), abs=1e-12)


def test_resting_fixed_point():
    params = LifParams()
    layer = reset_layer(3, params)
    layer.step(params, np.zeros(3))
    assert np.all(layer.voltages == params.resting)


def test_decay_law_over_1000_steps():
    params = LifParams(leak=1 - math.exp(-1 / 100))
    layer = reset_layer(1, params)
    v0 = -58.0
    layer.voltages[0] = v0
    for t in range(1, 1001):
        layer.step(params, np.zeros(1))
        expected = params.resting + (v0 - params.resting) * math.exp(-t / 100)
        assert layer.voltages[0] == pytest.approx(expected, abs=1e-9)


def test_spike_reset_and_refractory():
    params = LifParams(threshold=-55.0)
    layer = reset_layer(1, params)
    layer.voltages[0] = -56.0
    spikes = layer.step(params, np.array([2.0]))
    assert spikes[0]
    assert layer.voltages[0] == params.reset
    assert layer.refractory_remaining[0] == 5


def test_refractory_ignores_input():
    params = LifParams()
    layer = reset_layer(1, params)
    spike_times = []
    for t in range(40):
        spikes = layer.step(params, np.array([50.0]))  # saturating drive
        if spikes[0]:
            spike_times.append(t)
    gaps = np.diff(spike_times)
    assert len(spike_times) > 2
    assert np.all(gaps >= params.refractory_steps + 1)


def test_refractory_clamps_at_reset():
    params = LifParams(reset=-70.0)
    layer = reset_layer(1, params)
    layer.voltages[0] = -50.0
    layer.step(params, np.zeros(1))  # spikes, enters refractory
    layer.step(params, np.array([100.0]))
    assert layer.voltages[0] == -70.0


def test_monotone_in_current():
    params = LifParams()
    rng = np.random.default_rng(0)
    base = rng.uniform(0, 12, size=50)
    layer_a = reset_layer(50, params)
    layer_b = reset_layer(50, params)
    spikes_a = layer_a.step(params, base)
    spikes_b = layer_b.step(params, base + rng.uniform(0, 3, size=50))
    assert np.all(spikes_b | ~spikes_a)


def test_capacitance_divides_current():
    params = LifParams(capacitance=2.0)
    layer = reset_layer(1, params)
    layer.step(params, np.array([4.0]))
    assert layer.voltages[0] == pytest.approx(-65 + 2.0)


def test_shape_checks():
    params = LifParams()
    layer = reset_layer(3, params)
    with pytest.raises(DimensionMismatch):
        layer.step(params, np.zeros(4))
    with pytest.raises(DimensionMismatch):
        reset_layer(0, params)


def test_param_validation():
    with pytest.raises(ValueError):
        LifParams(leak=1.5)
    with pytest.raises(ValueError):
        LifParams(threshold=-70.0)  # below resting
