"""Two-layer spiking network: interval-coded input layer feeding a dense LIF
processing layer, with an optional dense recurrent connection.

Per time step (single-sample streaming inference): the value is encoded to
one input spike, that neuron's forward weight row becomes the input current,
the previous step's processing-layer spikes are fed back through the
recurrent weights (one-step axonal delay), the LIF layer advances, and the
spike count is compared against the alert threshold.

All randomness flows from one counter-based generator (Philox) per network,
so weight draws at input-growth time are reproducible and checkpoints resume
bit-exactly.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np

from .data import TimeSeries
from .encoder import IntervalEncoder
from .errors import (
    AnomalyInTrainingData,
    CheckpointError,
    DimensionMismatch,
    MissingRecurrentParams,
)
from .lif import LifLayer, LifParams, reset_layer
from .stdp import StdpParams, TraceState, stdp_update

CHECKPOINT_VERSION = 1

FORWARD_INIT_MEAN = 0.05
FORWARD_INIT_STD = 0.1
RECURRENT_OFFDIAG = -0.025


@dataclass(frozen=True)
class NetworkConfig:
    n_r: int
    recurrent: bool = False
    forward_init_mean: float = FORWARD_INIT_MEAN
    forward_init_std: float = FORWARD_INIT_STD
    recurrent_offdiag: float = RECURRENT_OFFDIAG
    lif: LifParams = field(default_factory=LifParams)
    seed: int = 0
    weight_min: float | None = None  # optional clamp, off by default
    weight_max: float | None = None

    def __post_init__(self):
        if self.n_r < 1:
            raise DimensionMismatch("processing layer needs at least one neuron")


@dataclass
class SpikeSignal:
    """Per-step processing-layer spike counts, the raw detection signal."""

    timestamps: np.ndarray
    counts: np.ndarray
    alerts: np.ndarray

    def __len__(self):
        return len(self.counts)

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["timestamp", "spike_count", "alert"])
            for t, c, a in zip(self.timestamps, self.counts, self.alerts):
                writer.writerow([repr(float(t)), int(c), int(a)])


class Network:
    """Single-owner mutable network instance processing a stream in order."""

    def __init__(self, config: NetworkConfig, encoder: IntervalEncoder):
        self.config = config
        self.encoder = encoder
        self.rng = np.random.Generator(np.random.Philox(config.seed))
        n_in = encoder.neuron_count
        self.w_ir = self.rng.normal(
            config.forward_init_mean, config.forward_init_std, size=(n_in, config.n_r))
        self.w_rr = None
        if config.recurrent:
            self.w_rr = np.full((config.n_r, config.n_r), config.recurrent_offdiag)
            np.fill_diagonal(self.w_rr, 0.0)
        self.layer_r: LifLayer = reset_layer(config.n_r, config.lif)
        self.prev_r_spikes = np.zeros(config.n_r, dtype=bool)
        self.step_counter = 0

    # -- structure ---------------------------------------------------------

    @property
    def n_inputs(self) -> int:
        return self.w_ir.shape[0]

    def grow_input(self, new_neuron_count: int) -> None:
        """Append freshly-drawn forward rows for encoder-created neurons."""
        if new_neuron_count <= self.n_inputs:
            raise DimensionMismatch(
                f"cannot shrink input layer from {self.n_inputs} to {new_neuron_count}")
        extra = self.rng.normal(
            self.config.forward_init_mean, self.config.forward_init_std,
            size=(new_neuron_count - self.n_inputs, self.config.n_r))
        self.w_ir = np.vstack([self.w_ir, extra])

    def reset_state(self) -> None:
        """Return dynamic state (voltages, refractory, feedback) to rest;
        weights and encoder partition are kept."""
        self.layer_r = reset_layer(self.config.n_r, self.config.lif)
        self.prev_r_spikes = np.zeros(self.config.n_r, dtype=bool)

    def _clamp_weights(self) -> None:
        cfg = self.config
        if cfg.weight_min is not None or cfg.weight_max is not None:
            np.clip(self.w_ir, cfg.weight_min, cfg.weight_max, out=self.w_ir)
            if self.w_rr is not None:
                np.clip(self.w_rr, cfg.weight_min, cfg.weight_max, out=self.w_rr)

    # -- inference ---------------------------------------------------------

    def infer_step(self, v: float, theta: float) -> tuple[bool, int, int]:
        """Process one value; returns (alert, spike count, input neuron)."""
        idx = self.encoder.encode(v)
        if self.encoder.neuron_count > self.n_inputs:
            self.grow_input(self.encoder.neuron_count)
        current = self.w_ir[idx].copy()
        if self.w_rr is not None and self.prev_r_spikes.any():
            current += self.w_rr[self.prev_r_spikes].sum(axis=0)
        spikes = self.layer_r.step(self.config.lif, current)
        self.prev_r_spikes = spikes
        self.step_counter += 1
        s_r = int(spikes.sum())
        return s_r > theta, s_r, idx

    def run_series(self, series: TimeSeries, theta: float) -> SpikeSignal:
        """One inference step per record; plasticity stays off."""
        counts = np.zeros(len(series), dtype=np.int64)
        alerts = np.zeros(len(series), dtype=bool)
        for i, v in enumerate(series.values):
            alert, s_r, _ = self.infer_step(float(v), theta)
            counts[i] = s_r
            alerts[i] = alert
        return SpikeSignal(series.timestamps.copy(), counts, alerts)

    # -- training ----------------------------------------------------------

    def train(self, series: TimeSeries, fwd_params: StdpParams,
              rec_params: StdpParams | None = None, epochs: int = 1,
              theta: float = 0.0, step_callback=None) -> "Network":
        """Stream the series through the network with plasticity on.

        Training data must be anomaly-free. Dynamic state and traces reset
        between epochs; weights persist. ``step_callback(net)`` runs after
        every plasticity update (used by invariant checks).
        """
        if epochs < 1:
            raise ValueError("epochs must be at least 1")
        if series.labels is not None and series.labels.any():
            raise AnomalyInTrainingData("training stream contains labelled anomalies")
        if self.w_rr is not None and rec_params is None:
            raise MissingRecurrentParams("recurrent network needs recurrent parameters")
        for _ in range(epochs):
            self.reset_state()
            fwd_traces = TraceState.zeros(self.n_inputs, self.config.n_r)
            rec_traces = (TraceState.zeros(self.config.n_r, self.config.n_r)
                          if self.w_rr is not None else None)
            for v in series.values:
                _, _, idx = self.infer_step(float(v), theta)
                fwd_traces.grow_pre(self.n_inputs)
                pre = np.zeros(self.n_inputs, dtype=bool)
                pre[idx] = True
                stdp_update(self.w_ir, fwd_traces, pre,
                            self.layer_r.spiked_last_step, fwd_params)
                if self.w_rr is not None:
                    stdp_update(self.w_rr, rec_traces,
                                self.layer_r.spiked_last_step,
                                self.layer_r.spiked_last_step, rec_params)
                self._clamp_weights()
                if step_callback is not None:
                    step_callback(self)
        self.reset_state()
        return self

    # -- checkpointing -----------------------------------------------------

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_checkpoint(), fh)

    @classmethod
    def load(cls, path) -> "Network":
        with open(path) as fh:
            return cls.from_checkpoint(json.load(fh))

    def to_checkpoint(self) -> dict:
        return {
            "version": CHECKPOINT_VERSION,
            "config": {
                "n_r": self.config.n_r,
                "recurrent": self.config.recurrent,
                "forward_init_mean": self.config.forward_init_mean,
                "forward_init_std": self.config.forward_init_std,
                "recurrent_offdiag": self.config.recurrent_offdiag,
                "seed": self.config.seed,
                "weight_min": self.config.weight_min,
                "weight_max": self.config.weight_max,
                "lif": {
                    "capacitance": self.config.lif.capacitance,
                    "leak": self.config.lif.leak,
                    "resting": self.config.lif.resting,
                    "reset": self.config.lif.reset,
                    "threshold": self.config.lif.threshold,
                    "refractory_steps": self.config.lif.refractory_steps,
                },
            },
            "encoder": self.encoder.to_json(),
            "w_ir": _encode_matrix(self.w_ir),
            "w_rr": None if self.w_rr is None else _encode_matrix(self.w_rr),
            "voltages": _encode_matrix(self.layer_r.voltages),
            "refractory": self.layer_r.refractory_remaining.tolist(),
            "spiked": self.layer_r.spiked_last_step.tolist(),
            "prev_r_spikes": self.prev_r_spikes.tolist(),
            "step_counter": self.step_counter,
            "rng_state": _jsonify(self.rng.bit_generator.state),
        }

    @classmethod
    def from_checkpoint(cls, payload: dict) -> "Network":
        if payload.get("version") != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"unsupported checkpoint version {payload.get('version')!r}")
        cfg = payload["config"]
        config = NetworkConfig(
            n_r=cfg["n_r"], recurrent=cfg["recurrent"],
            forward_init_mean=cfg["forward_init_mean"],
            forward_init_std=cfg["forward_init_std"],
            recurrent_offdiag=cfg["recurrent_offdiag"],
            lif=LifParams(**cfg["lif"]), seed=cfg["seed"],
            weight_min=cfg["weight_min"], weight_max=cfg["weight_max"])
        net = cls.__new__(cls)
        net.config = config
        net.encoder = IntervalEncoder.from_json(payload["encoder"])
        net.rng = np.random.Generator(np.random.Philox(config.seed))
        net.rng.bit_generator.state = _unjsonify(payload["rng_state"])
        net.w_ir = _decode_matrix(payload["w_ir"])
        net.w_rr = None if payload["w_rr"] is None else _decode_matrix(payload["w_rr"])
        net.layer_r = LifLayer(
            voltages=_decode_matrix(payload["voltages"]).ravel(),
            refractory_remaining=np.asarray(payload["refractory"], dtype=np.int64),
            spiked_last_step=np.asarray(payload["spiked"], dtype=bool))
        net.prev_r_spikes = np.asarray(payload["prev_r_spikes"], dtype=bool)
        net.step_counter = payload["step_counter"]
        return net


def build(config: NetworkConfig, encoder: IntervalEncoder) -> Network:
    return Network(config, encoder)


def _encode_matrix(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype="<f8")
    return {"shape": list(a.shape),
            "data": base64.b64encode(a.tobytes()).decode("ascii")}


def _decode_matrix(payload: dict) -> np.ndarray:
    raw = base64.b64decode(payload["data"])
    return np.frombuffer(raw, dtype="<f8").reshape(payload["shape"]).copy()


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return {"__ndarray__": obj.tolist(), "dtype": str(obj.dtype)}
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _unjsonify(obj):
    if isinstance(obj, dict):
        if "__ndarray__" in obj:
            return np.asarray(obj["__ndarray__"], dtype=obj["dtype"])
        return {k: _unjsonify(v) for k, v in obj.items()}
    return obj
