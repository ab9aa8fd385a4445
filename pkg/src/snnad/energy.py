"""Exact MAC-operation counting, the energy proxy for all models.

The spiking detector costs ``2n`` MACs per step without recurrence
(``n`` voltage updates plus ``n`` for the single input spike crossing the
dense forward connection) and ``n * (s_r + 2)`` with recurrence, where
``s_r`` is that step's processing-layer spike count. Baseline architectures
get closed-form per-sample counts; nonlinear activations are excluded
everywhere. All arithmetic is integer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptySignal, SnnAdError


class SpikeCountOutOfRange(SnnAdError):
    pass


@dataclass(frozen=True)
class MacEstimate:
    e_u: int
    e_s: int

    @property
    def total(self) -> int:
        return self.e_u + self.e_s


def vacuum_macs_per_step(n: int, recurrent: bool, s_r: int = 0) -> int:
    """MACs for one inference step of the spiking detector."""
    if n < 1:
        raise SpikeCountOutOfRange("layer size must be at least 1")
    if not 0 <= s_r <= n:
        raise SpikeCountOutOfRange(f"spike count {s_r} outside [0, {n}]")
    if recurrent:
        return n * (s_r + 2)
    return 2 * n


def vacuum_estimate_per_step(n: int, recurrent: bool, s_r: int = 0) -> MacEstimate:
    """Per-step MACs split into voltage-update and spike contributions."""
    total = vacuum_macs_per_step(n, recurrent, s_r)
    return MacEstimate(e_u=n, e_s=total - n)


def vacuum_macs_for_run(counts, n: int, recurrent: bool) -> tuple[float, int]:
    """(mean per-step MACs, total MACs) over a recorded run."""
    counts = list(counts)
    if not counts:
        raise EmptySignal("cannot report MACs for an empty run")
    per_step = [vacuum_macs_per_step(n, recurrent, int(s)) for s in counts]
    total = sum(per_step)
    return total / len(per_step), total


@dataclass(frozen=True)
class Dense:
    n_in: int
    n_out: int

    def macs(self) -> int:
        return self.n_in * self.n_out


@dataclass(frozen=True)
class Conv1d:
    kernel: int
    c_in: int
    c_out: int
    out_size: int

    def macs(self) -> int:
        return self.kernel * self.c_in * self.c_out * self.out_size


@dataclass(frozen=True)
class Lstm:
    seq_len: int
    n: int
    c: int

    def macs(self) -> int:
        return self.seq_len * (4 * self.n * self.c + 4 * self.n ** 2 + 12 * self.n)


@dataclass(frozen=True)
class BatchNorm:
    size: int

    def macs(self) -> int:
        return self.size


@dataclass(frozen=True)
class AvgPool:
    kernel: int
    out_size: int

    def macs(self) -> int:
        return self.kernel * self.out_size


@dataclass(frozen=True)
class Ocsvm:
    n_sv: int
    d: int

    def macs(self) -> int:
        return self.n_sv * (2 * self.d + 2)


@dataclass(frozen=True)
class Lof:
    d: int
    k: int
    n_train: int = 0  # not part of the per-sample count

    def macs(self) -> int:
        return 2 * self.d + (self.k + 1) ** 2 + (self.k + 1)


LayerSpec = Dense | Conv1d | Lstm | BatchNorm | AvgPool | Ocsvm | Lof

_LAYER_TYPES = {
    "dense": Dense,
    "conv1d": Conv1d,
    "lstm": Lstm,
    "batch_norm": BatchNorm,
    "avg_pool": AvgPool,
    "ocsvm": Ocsvm,
    "lof": Lof,
}


def baseline_macs(spec: LayerSpec) -> int:
    count = spec.macs()
    if count < 0:
        raise SpikeCountOutOfRange("negative MAC count")
    return count


def model_macs(specs) -> int:
    specs = list(specs)
    if not specs:
        raise EmptySignal("architecture has no layers")
    return sum(baseline_macs(s) for s in specs)


def layer_from_dict(payload: dict) -> LayerSpec:
    """Build a layer from a JSON descriptor like ``{"type": "dense",
    "n_in": 32, "n_out": 64}``."""
    kind = payload.get("type")
    if kind not in _LAYER_TYPES:
        raise SnnAdError(f"unknown layer type {kind!r}")
    fields = {k: v for k, v in payload.items() if k != "type"}
    try:
        return _LAYER_TYPES[kind](**fields)
    except TypeError as exc:
        raise SnnAdError(f"bad fields for layer {kind!r}: {exc}") from exc
