"""Single-spike interval encoding of real values.

The input domain is tiled by contiguous intervals of fixed length; each
interval owns one input neuron and every incoming value activates exactly one
of them. Values outside the current domain extend it with whole grid-aligned
intervals (fresh neurons) after clamping to a compact bound, so the input
layer stays finite even for pathological streams.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import BadFraction, DegenerateDomain, NeuronCapExceeded

DEFAULT_MAX_NEURONS = 100_000


def default_clamp(domain: tuple[float, float]) -> tuple[float, float]:
    """Compact bound used when none is given: the domain mirrored outward by
    its own width on each side."""
    lo, hi = domain
    return (2 * lo - hi, 2 * hi - lo)


@dataclass
class IntervalEncoder:
    """Dynamic partition of the input domain, one input neuron per interval.

    Intervals are half-open ``[a, a + delta)`` on a grid anchored at the
    initial domain minimum; the current rightmost interval is closed on the
    right so the domain maximum is encodable. ``neuron_of_offset`` maps grid
    offset (may be negative after leftward extension) to neuron index;
    neuron indices are dense in creation order.
    """

    anchor: float
    delta: float
    clamp: tuple[float, float]
    max_neurons: int
    neuron_of_offset: dict[int, int]
    lo_offset: int
    hi_offset: int  # offset of the rightmost existing interval

    @property
    def neuron_count(self) -> int:
        return len(self.neuron_of_offset)

    @property
    def domain(self) -> tuple[float, float]:
        return (self.anchor + self.lo_offset * self.delta,
                self.anchor + (self.hi_offset + 1) * self.delta)

    def encode(self, v: float) -> int:
        """Map a value to its input neuron, clamping and extending the domain
        as needed. Returns exactly one neuron index per call."""
        imin, imax = self.clamp
        if v < imin:
            v = imin
        elif v > imax:
            v = imax
        lo, hi = self.domain
        if v >= hi:
            # Extend rightward; a value landing exactly on a boundary becomes
            # the closed right end of the (possibly new) last interval.
            target = math.ceil((v - self.anchor) / self.delta) - 1
            if target > self.hi_offset:
                self._extend(self.hi_offset + 1, target + 1)
                self.hi_offset = target
            return self.neuron_of_offset[self.hi_offset]
        if v < lo:
            target = math.floor((v - self.anchor) / self.delta)
            self._extend(target, self.lo_offset)
            self.lo_offset = target
            return self.neuron_of_offset[target]
        offset = math.floor((v - self.anchor) / self.delta)
        offset = min(max(offset, self.lo_offset), self.hi_offset)
        return self.neuron_of_offset[offset]

    def _extend(self, start: int, stop: int) -> None:
        new = stop - start
        if self.neuron_count + new > self.max_neurons:
            raise NeuronCapExceeded(
                f"extension to {self.neuron_count + new} neurons exceeds cap "
                f"{self.max_neurons}")
        nxt = self.neuron_count
        for offset in range(start, stop):
            self.neuron_of_offset[offset] = nxt
            nxt += 1

    def to_json(self) -> dict:
        return {
            "anchor": self.anchor,
            "delta": self.delta,
            "clamp": list(self.clamp),
            "max_neurons": self.max_neurons,
            "neuron_of_offset": {str(k): v for k, v in self.neuron_of_offset.items()},
            "lo_offset": self.lo_offset,
            "hi_offset": self.hi_offset,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "IntervalEncoder":
        return cls(
            anchor=payload["anchor"],
            delta=payload["delta"],
            clamp=tuple(payload["clamp"]),
            max_neurons=payload["max_neurons"],
            neuron_of_offset={int(k): v for k, v in payload["neuron_of_offset"].items()},
            lo_offset=payload["lo_offset"],
            hi_offset=payload["hi_offset"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> "IntervalEncoder":
        return cls.from_json(json.loads(text))


def new_encoder(domain: tuple[float, float], interval_fraction: float,
                clamp: tuple[float, float] | None = None,
                max_neurons: int = DEFAULT_MAX_NEURONS) -> IntervalEncoder:
    """Build an encoder over ``domain`` with interval length
    ``interval_fraction * width(domain)``.

    ``ceil(width / delta)`` intervals are created; when delta does not divide
    the width, the domain is widened rightward so whole intervals tile it.
    """
    lo, hi = float(domain[0]), float(domain[1])
    width = hi - lo
    if width <= 0:
        raise DegenerateDomain(f"domain [{lo}, {hi}] has non-positive width")
    if not 0 < interval_fraction <= 1:
        raise BadFraction(f"interval fraction {interval_fraction} not in (0, 1]")
    delta = interval_fraction * width
    k = math.ceil(width / delta - 1e-9)
    if clamp is None:
        clamp = default_clamp((lo, hi))
    if clamp[0] > lo or clamp[1] < hi:
        raise DegenerateDomain(f"clamp {clamp} does not contain domain [{lo}, {hi}]")
    enc = IntervalEncoder(
        anchor=lo, delta=delta, clamp=(float(clamp[0]), float(clamp[1])),
        max_neurons=max_neurons, neuron_of_offset={}, lo_offset=0, hi_offset=k - 1)
    if k > max_neurons:
        raise NeuronCapExceeded(f"{k} initial intervals exceed cap {max_neurons}")
    enc.neuron_of_offset = {i: i for i in range(k)}
    return enc


def new_encoder_with_delta(domain: tuple[float, float], delta: float,
                           clamp: tuple[float, float] | None = None,
                           max_neurons: int = DEFAULT_MAX_NEURONS) -> IntervalEncoder:
    """Build an encoder from an absolute interval length (e.g. 1 kW) instead
    of a fraction of the domain width."""
    lo, hi = float(domain[0]), float(domain[1])
    width = hi - lo
    if width <= 0:
        raise DegenerateDomain(f"domain [{lo}, {hi}] has non-positive width")
    if delta <= 0:
        raise BadFraction(f"interval length {delta} must be positive")
    k = max(math.ceil(width / delta - 1e-9), 1)
    if clamp is None:
        clamp = default_clamp((lo, hi))
    if clamp[0] > lo or clamp[1] < hi:
        raise DegenerateDomain(f"clamp {clamp} does not contain domain [{lo}, {hi}]")
    if k > max_neurons:
        raise NeuronCapExceeded(f"{k} initial intervals exceed cap {max_neurons}")
    return IntervalEncoder(
        anchor=lo, delta=float(delta), clamp=(float(clamp[0]), float(clamp[1])),
        max_neurons=max_neurons,
        neuron_of_offset={i: i for i in range(k)}, lo_offset=0, hi_offset=k - 1)
