"""Command-line surface: train, detect, evaluate, grid-search, energy.

Runs are driven by a TOML config whose sections mirror the library modules.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime error.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import data as tsdata
from .detector import apply_threshold, maybe_smooth
from .encoder import new_encoder, new_encoder_with_delta
from .energy import layer_from_dict, vacuum_macs_for_run, vacuum_macs_per_step
from .errors import ConfigError, DataError, SingleClass, SnnAdError
from .gridsearch import GridSpec, grid_search, write_ranking_csv
from .lif import LifParams
from .metrics import evaluate_run
from .network import Network, NetworkConfig
from .stdp import StdpParams, classify_behaviour


def _load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing config key {key!r}")
    return cfg[key]


def _load_series(cfg: dict, labelled: bool) -> tsdata.TimeSeries:
    section = _require(cfg, "data")
    path = _require(section, "series")
    if not Path(path).exists():
        raise DataError(f"series file not found: {path}")
    series = tsdata.load_csv(
        path,
        timestamp_column=section.get("timestamp_column", "timestamp"),
        value_column=section.get("value_column", "value"),
        label_column=section.get("label_column"))
    if section.get("resample", False):
        series = tsdata.resample_uniform(series, section.get("max_gap_steps", 3))
    if "labels" in section:
        label_path = section["labels"]
        if not Path(label_path).exists():
            raise DataError(f"label file not found: {label_path}")
        windows = tsdata.load_label_windows(label_path, section.get("dataset"))
        series = tsdata.apply_label_windows(series, windows)
    if labelled and series.labels is None:
        raise DataError("this command needs labels (data.labels or a label column)")
    return series


def _lif_from_config(cfg: dict) -> LifParams:
    net = cfg.get("network", {})
    leak = net.get("g_l")
    if leak is None:
        leak = 1 - math.exp(-1 / net.get("tau", 100))
    return LifParams(
        capacitance=net.get("capacitance", 1.0),
        leak=leak,
        resting=net.get("resting", -65.0),
        reset=net.get("reset", -65.0),
        threshold=net.get("spike_threshold", -55.0),
        refractory_steps=net.get("refractory_steps", 5))


def _encoder_from_config(cfg: dict, values: np.ndarray):
    enc_cfg = cfg.get("encoder", {})
    domain = enc_cfg.get("domain")
    if domain is None:
        domain = (float(values.min()), float(values.max()))
    clamp = enc_cfg.get("clamp")
    max_neurons = enc_cfg.get("max_neurons", 100_000)
    if "interval_length" in enc_cfg:
        return new_encoder_with_delta(tuple(domain), enc_cfg["interval_length"],
                                      clamp, max_neurons)
    fraction = enc_cfg.get("interval_fraction", 0.01)
    return new_encoder(tuple(domain), fraction, clamp, max_neurons)


def _seed(cfg: dict, override: int | None) -> int:
    if override is not None:
        return override
    if "seed" not in cfg:
        raise ConfigError("a seed is mandatory (config key 'seed' or --seed)")
    return int(cfg["seed"])


@click.group()
def cli():
    """Spiking-network anomaly detection toolkit."""


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--out-dir", type=click.Path(), default=".")
def train(config_path, seed, out_dir):
    """Train a network on normal data and write a checkpoint."""
    cfg = _load_config(config_path)
    seed = _seed(cfg, seed)
    series = _load_series(cfg, labelled=False)
    if series.labels is not None and series.labels.any():
        series = series.take(np.flatnonzero(~series.labels))
    net_cfg = cfg.get("network", {})
    stdp_cfg = cfg.get("stdp", {})
    if "forward" not in stdp_cfg:
        raise ConfigError("missing [stdp.forward] section")
    fwd = StdpParams(a_minus=_require(stdp_cfg["forward"], "a_minus"),
                     a_plus=_require(stdp_cfg["forward"], "a_plus"),
                     tau_plus=stdp_cfg.get("tau_plus", 1.051),
                     tau_minus=stdp_cfg.get("tau_minus", 1.051))
    recurrent = net_cfg.get("recurrent", False)
    rec = None
    if recurrent:
        if "recurrent" not in stdp_cfg:
            raise ConfigError("recurrent network needs [stdp.recurrent]")
        rec = StdpParams(a_minus=_require(stdp_cfg["recurrent"], "a_minus"),
                         a_plus=_require(stdp_cfg["recurrent"], "a_plus"),
                         tau_plus=stdp_cfg.get("tau_plus", 1.051),
                         tau_minus=stdp_cfg.get("tau_minus", 1.051))
    encoder = _encoder_from_config(cfg, series.values)
    net = Network(NetworkConfig(
        n_r=net_cfg.get("n_r", 1000), recurrent=recurrent,
        lif=_lif_from_config(cfg), seed=seed), encoder)
    epochs = stdp_cfg.get("epochs", 1)
    epoch_spikes: list[int] = []
    total = 0

    def count_spikes(n):
        nonlocal total
        total += int(n.layer_r.spiked_last_step.sum())

    for _ in range(epochs):
        total = 0
        net.train(series, fwd, rec, epochs=1, step_callback=count_spikes)
        epoch_spikes.append(total)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ckpt_path = out / "checkpoint.json"
    net.save(ckpt_path)
    summary = {
        "epochs": epochs,
        "spikes_per_epoch": epoch_spikes,
        "input_neurons": net.n_inputs,
        "forward_behaviour": classify_behaviour(
            "forward", fwd.a_minus, fwd.a_plus).value,
        "recurrent_behaviour": None if rec is None else classify_behaviour(
            "recurrent", rec.a_minus, rec.a_plus).value,
        "w_ir_mean": float(net.w_ir.mean()),
        "w_ir_std": float(net.w_ir.std()),
        "w_rr_mean": None if net.w_rr is None else float(net.w_rr.mean()),
    }
    with open(out / "training_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    click.echo(f"checkpoint written to {ckpt_path}")


@cli.command()
@click.option("--checkpoint", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out-dir", type=click.Path(), default=".")
def detect(checkpoint, config_path, out_dir):
    """Run a trained network over a series and emit detections and MACs."""
    cfg = _load_config(config_path)
    if not Path(checkpoint).exists():
        raise DataError(f"checkpoint not found: {checkpoint}")
    net = Network.load(checkpoint)
    series = _load_series(cfg, labelled=False)
    det = cfg.get("detector", {})
    theta = det.get("theta", 0.0)
    window = det.get("smoothing_window")
    signal = net.run_series(series, theta)
    smoothed = maybe_smooth(signal.counts, window)
    alerts = apply_threshold(smoothed, theta)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    detections = out / "detections.csv"
    import csv as _csv

    with open(detections, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["timestamp", "raw_count", "smoothed", "alert"])
        for t, c, s, a in zip(signal.timestamps, signal.counts, smoothed, alerts):
            writer.writerow([repr(float(t)), int(c), repr(float(s)), int(a)])
    mac_report = {}
    if len(signal):
        mean_macs, total_macs = vacuum_macs_for_run(
            signal.counts, net.config.n_r, net.w_rr is not None)
        mac_report = {"mean_per_step": mean_macs, "total": total_macs}
    with open(out / "mac_report.json", "w") as fh:
        json.dump(mac_report, fh, indent=2)
    click.echo(f"detections written to {detections}")
    if mac_report:
        click.echo(f"mean MACs per step: {mac_report['mean_per_step']}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--detections", type=click.Path(), default=None,
              help="Detection CSV from `detect`; otherwise checkpoint+series.")
@click.option("--checkpoint", type=click.Path(), default=None)
@click.option("--out-dir", type=click.Path(), default=".")
def evaluate(config_path, detections, checkpoint, out_dir):
    """Compute metrics (best smoothing/threshold per metric, Youden point)."""
    cfg = _load_config(config_path)
    series = _load_series(cfg, labelled=True)
    if detections is not None:
        import csv as _csv

        with open(detections, newline="") as fh:
            rows = list(_csv.DictReader(fh))
        counts = np.array([float(r["raw_count"]) for r in rows])
        if len(counts) != len(series):
            raise DataError("detection CSV does not align with the series")
    else:
        if checkpoint is None:
            raise ConfigError("pass --detections or --checkpoint")
        net = Network.load(checkpoint)
        counts = net.run_series(series, 0.0).counts
    eval_cfg = cfg.get("evaluation", {})
    windows = eval_cfg.get("smoothing_windows")
    if windows is not None:
        windows = tuple(None if w == 0 else int(w) for w in windows)
    else:
        windows = (None, 100, 200, 300)
    report = evaluate_run(counts, series.labels, windows,
                          eval_cfg.get("threshold_count", 10))
    payload = report.to_json()
    if report.auc is None:
        click.echo("warning: single-class labels, AUC omitted", err=True)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    click.echo(json.dumps(payload, indent=2))


@cli.command("grid-search")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1)
@click.option("--out-dir", type=click.Path(), default=".")
def grid_search_cmd(config_path, seed, workers, out_dir):
    """Sweep configurations over expanding-window folds; write a ranking."""
    cfg = _load_config(config_path)
    seed = _seed(cfg, seed)
    series = _load_series(cfg, labelled=True)
    grid_cfg = cfg.get("grid", {})
    spec_kwargs = {}
    for key in ("a_fwd", "a_rec"):
        if key in grid_cfg:
            spec_kwargs[key] = tuple(tuple(p) for p in grid_cfg[key])
    for key in ("recurrent", "n_r", "spike_threshold", "g_l",
                "interval_fraction", "epochs"):
        if key in grid_cfg:
            spec_kwargs[key] = tuple(grid_cfg[key])
    spec = GridSpec(**spec_kwargs)
    results = grid_search(series, spec, seed,
                          k_folds=grid_cfg.get("k_folds", 5),
                          workers=workers,
                          rank_metric=grid_cfg.get("rank_metric", "g_mean"))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ranking = out / "ranking.csv"
    write_ranking_csv(results, ranking)
    click.echo(f"ranking written to {ranking}")


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(),
              help="JSON list of layer descriptors.")
@click.option("--out-dir", type=click.Path(), default=".")
def energy(spec_path, out_dir):
    """Per-layer and total MAC counts for an architecture spec."""
    if not Path(spec_path).exists():
        raise DataError(f"spec file not found: {spec_path}")
    try:
        with open(spec_path) as fh:
            layers = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {spec_path}: {exc}") from exc
    if not isinstance(layers, list) or not layers:
        raise ConfigError("architecture spec must be a non-empty JSON list")
    rows = []
    for entry in layers:
        if entry.get("type") == "vacuum":
            count = vacuum_macs_per_step(
                entry["n"], entry.get("recurrent", False), entry.get("s_r", 0))
        else:
            count = layer_from_dict(entry).macs()
        rows.append({"layer": entry, "macs": count})
    total = sum(r["macs"] for r in rows)
    payload = {"layers": rows, "total_macs": total}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "energy_report.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    for r in rows:
        click.echo(f"{r['layer']['type']}: {r['macs']}")
    click.echo(f"total: {total}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except (click.UsageError, ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except (SnnAdError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 4


if __name__ == "__main__":
    sys.exit(main())
