import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snnad.encoder import IntervalEncoder, new_encoder, new_encoder_with_delta
from snnad.errors import BadFraction, DegenerateDomain, NeuronCapExceeded


def test_direct_partition():
    enc = new_encoder((0, 10), 0.1)
    assert enc.delta == 1.0
    assert enc.neuron_count == 10
    assert enc.encode(3.0) == 3
    assert enc.encode(3.999) == 3


def test_ceil_and_widen():
    # width/delta = 33.33 -> 34 intervals, domain widened to [0, 10.2]
    enc = new_encoder((0, 10), 0.03)
    assert enc.delta == pytest.approx(0.3)
    assert enc.neuron_count == 34
    assert enc.domain[1] == pytest.approx(10.2)


def test_bad_fraction():
    with pytest.raises(BadFraction):
        new_encoder((0, 10), 0.0)
    with pytest.raises(DegenerateDomain):
        new_encoder((5, 5), 0.1)


def test_extension_assigns_fresh_neurons():
    enc = new_encoder((0, 10), 0.1, clamp=(-10, 20))
    assert enc.encode(12.4) == 12
    assert enc.neuron_count == 13
    # the appended intervals map offsets 10..12 to neurons 10..12
    assert enc.neuron_of_offset[10] == 10
    assert enc.neuron_of_offset[12] == 12


def test_clamp_then_extend():
    enc = new_encoder((0, 10), 0.1, clamp=(-10, 20))
    neuron = enc.encode(25.0)  # clamped to 20
    assert enc.domain == (0.0, 20.0)
    # 20 lands on the boundary and belongs to the right-closed last interval
    assert neuron == enc.neuron_of_offset[19]
    assert enc.neuron_count == 20


def test_leftward_extension():
    enc = new_encoder((0, 10), 0.1, clamp=(-10, 20))
    neuron = enc.encode(-2.5)
    assert enc.domain == (-3.0, 10.0)
    assert neuron == enc.neuron_of_offset[-3]
    assert enc.neuron_count == 13


def test_domain_max_encodable():
    enc = new_encoder((0, 10), 0.1)
    assert enc.encode(10.0) == 9  # last interval closed on the right


def test_neuron_count_monotone():
    enc = new_encoder((0, 10), 0.1, clamp=(-10, 20))
    assert enc.neuron_count == 10
    enc.encode(12.4)
    assert enc.neuron_count == 13
    before = enc.neuron_count
    enc.encode(5.0)
    enc.encode(6.0)
    assert enc.neuron_count == before


def test_neuron_cap():
    enc = new_encoder((0, 10), 0.1, clamp=(-1000, 1000), max_neurons=15)
    with pytest.raises(NeuronCapExceeded):
        enc.encode(500.0)


def test_absolute_interval_length():
    enc = new_encoder_with_delta((0, 43), 1.0, clamp=(-10, 170))
    assert enc.delta == 1.0
    assert enc.neuron_count == 43


def test_serialization_round_trip():
    enc = new_encoder((0, 10), 0.1, clamp=(-10, 20))
    enc.encode(12.4)
    enc.encode(-2.5)
    again = IntervalEncoder.loads(enc.dumps())
    assert again.domain == enc.domain
    assert again.neuron_of_offset == enc.neuron_of_offset
    for v in (-5.0, 0.0, 4.2, 12.0, 19.0):
        assert again.encode(v) == enc.encode(v)


@settings(max_examples=50)
@given(st.lists(st.floats(min_value=-100, max_value=100,
                          allow_nan=False), min_size=1, max_size=200))
def test_single_spike_and_determinism(values):
    enc_a = new_encoder((0, 10), 0.05)
    enc_b = new_encoder((0, 10), 0.05)
    seq_a = [enc_a.encode(v) for v in values]
    seq_b = [enc_b.encode(v) for v in values]
    assert seq_a == seq_b
    assert enc_a.neuron_of_offset == enc_b.neuron_of_offset
    for neuron in seq_a:
        assert isinstance(neuron, int)
        assert 0 <= neuron < enc_a.neuron_count


@settings(max_examples=30)
@given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
                min_size=1, max_size=100))
def test_clamp_containment(values):
    # No interval may extend beyond the compact bound by more than one delta.
    enc = new_encoder((0, 10), 0.07)
    imin, imax = enc.clamp
    for v in values:
        enc.encode(v)
    lo, hi = enc.domain
    assert lo >= imin - enc.delta
    assert hi <= imax + enc.delta


def test_partition_soundness():
    enc = new_encoder((0, 10), 0.05, clamp=(-10, 20))
    rng = np.random.default_rng(3)
    for v in rng.uniform(-15, 25, size=500):
        enc.encode(v)
    lo, hi = enc.domain
    # every point of the domain belongs to exactly one interval
    for v in rng.uniform(lo, hi - 1e-9, size=200):
        offset = math.floor((v - enc.anchor) / enc.delta)
        owners = [o for o in enc.neuron_of_offset
                  if enc.anchor + o * enc.delta <= v < enc.anchor + (o + 1) * enc.delta]
        assert owners == [offset]
    # offsets are contiguous and neuron ids dense
    offsets = sorted(enc.neuron_of_offset)
    assert offsets == list(range(offsets[0], offsets[-1] + 1))
    assert sorted(enc.neuron_of_offset.values()) == list(range(enc.neuron_count))
