"""Sign-controlled spike-timing-dependent plasticity.

The pairwise exponential rule is realized with eligibility traces: each
neuron keeps a trace that is set to 1 when it spikes and decays by
``exp(-1/tau)`` per millisecond step. A postsynaptic spike adds
``a_plus * pre_trace`` to its incoming weights; a presynaptic spike adds
``a_minus * post_trace`` to its outgoing weights. Unlike the classical rule,
both amplitudes may take either sign, which forces potentiation or
depression to dominate globally regardless of spike ordering.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class StdpParams:
    a_plus: float
    a_minus: float
    tau_plus: float = 1.051  # ms
    tau_minus: float = 1.051

    def __post_init__(self):
        if self.tau_plus <= 0 or self.tau_minus <= 0:
            raise ValueError("time constants must be positive")

    @property
    def pre_decay(self) -> float:
        return math.exp(-1.0 / self.tau_plus)

    @property
    def post_decay(self) -> float:
        return math.exp(-1.0 / self.tau_minus)


@dataclass
class TraceState:
    pre: np.ndarray
    post: np.ndarray

    @classmethod
    def zeros(cls, n_pre: int, n_post: int) -> "TraceState":
        return cls(np.zeros(n_pre), np.zeros(n_post))

    def grow_pre(self, n_pre: int) -> None:
        if n_pre > len(self.pre):
            self.pre = np.concatenate([self.pre, np.zeros(n_pre - len(self.pre))])


class SynapticBehaviour(enum.Enum):
    EXCITATORY = "excitatory"
    INHIBITORY = "inhibitory"
    BALANCED = "balanced"


def stdp_update(weights: np.ndarray, traces: TraceState,
                pre_spikes: np.ndarray, post_spikes: np.ndarray,
                params: StdpParams) -> None:
    """One plasticity step, applied in place to ``weights`` (pre x post).

    Order matters: traces decay first, then both spike-driven updates are
    applied against the decayed traces, and only afterwards do this step's
    spikes refresh their own traces to 1.
    """
    n_pre, n_post = weights.shape
    if len(traces.pre) != n_pre or len(traces.post) != n_post:
        raise DimensionMismatch("trace lengths do not match weight matrix")
    if len(pre_spikes) != n_pre or len(post_spikes) != n_post:
        raise DimensionMismatch("spike masks do not match weight matrix")
    traces.pre *= params.pre_decay
    traces.post *= params.post_decay
    post_idx = np.flatnonzero(post_spikes)
    if post_idx.size:
        weights[:, post_idx] += params.a_plus * traces.pre[:, None]
    pre_idx = np.flatnonzero(pre_spikes)
    if pre_idx.size:
        weights[pre_idx, :] += params.a_minus * traces.post[None, :]
    traces.pre[pre_idx] = 1.0
    traces.post[post_idx] = 1.0


def classify_behaviour(connection_kind: str, a_minus: float,
                       a_plus: float) -> SynapticBehaviour:
    """Prevalent synaptic behaviour induced by an amplitude pair.

    Both amplitudes positive (negative) favour potentiation (depression)
    globally. For an antisymmetric pair the recurrent connection is balanced
    (pre and post activity coincide), while a forward connection follows the
    sign of ``a_minus``: the input layer fires every step, so the
    presynaptic-scaled updates dominate. Mixed pairs without the symmetry
    follow the dominant term by the same activity argument.
    """
    if connection_kind not in ("forward", "recurrent"):
        raise ValueError(f"unknown connection kind {connection_kind!r}")
    if a_minus > 0 and a_plus > 0:
        return SynapticBehaviour.EXCITATORY
    if a_minus < 0 and a_plus < 0:
        return SynapticBehaviour.INHIBITORY
    if connection_kind == "recurrent":
        if a_minus == -a_plus:
            return SynapticBehaviour.BALANCED
        dominant = a_minus if abs(a_minus) > abs(a_plus) else a_plus
    else:
        dominant = a_minus if a_minus != 0 else a_plus
    if dominant > 0:
        return SynapticBehaviour.EXCITATORY
    if dominant < 0:
        return SynapticBehaviour.INHIBITORY
    return SynapticBehaviour.BALANCED
