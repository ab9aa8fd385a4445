"""Grid search over detector configurations across expanding-window folds.

Every configuration is trained and evaluated independently on each fold;
tasks fan out to a process pool and are reduced in task order, so the
ranking is byte-identical regardless of worker count. Ties on the ranking
metric break toward the configuration needing fewer MAC operations.
"""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import FoldSplit, TimeSeries, expanding_folds, training_view
from .encoder import new_encoder
from .errors import ConfigError, DataError
from .lif import LifParams
from .metrics import evaluate_run
from .network import Network, NetworkConfig
from .energy import vacuum_macs_for_run
from .stdp import StdpParams

G_L_CHOICES = (1 - math.exp(-1 / 100), 1 - math.exp(-1 / 150), 1 - math.exp(-1 / 200))


@dataclass(frozen=True)
class GridSpec:
    """Value sets swept by the search."""

    a_fwd: tuple = ((-0.1, -0.1), (-0.1, 0.1), (0.1, -0.1), (0.1, 0.1))
    a_rec: tuple = ((-0.1, -0.1), (-0.1, 0.1), (0.1, -0.1), (0.1, 0.1))
    recurrent: tuple = (False, True)
    n_r: tuple = (100, 2000)
    spike_threshold: tuple = (-62.0, -55.0, -40.0)
    g_l: tuple = G_L_CHOICES
    interval_fraction: tuple = (0.001, 0.1)
    epochs: tuple = (1, 2, 3, 4, 5)

    def configurations(self) -> list["GridConfig"]:
        configs = []
        for rec in self.recurrent:
            rec_pairs = self.a_rec if rec else (None,)
            for combo in itertools.product(
                    self.a_fwd, rec_pairs, self.n_r, self.spike_threshold,
                    self.g_l, self.interval_fraction, self.epochs):
                a_fwd, a_rec, n_r, thr, g_l, frac, epochs = combo
                configs.append(GridConfig(
                    config_id=len(configs), a_fwd=tuple(a_fwd),
                    a_rec=None if a_rec is None else tuple(a_rec),
                    recurrent=rec, n_r=n_r, spike_threshold=thr, g_l=g_l,
                    interval_fraction=frac, epochs=epochs))
        if not configs:
            raise ConfigError("empty parameter grid")
        return configs


@dataclass(frozen=True)
class GridConfig:
    config_id: int
    a_fwd: tuple[float, float]  # (a_minus, a_plus)
    a_rec: tuple[float, float] | None
    recurrent: bool
    n_r: int
    spike_threshold: float
    g_l: float
    interval_fraction: float
    epochs: int


@dataclass
class FoldResult:
    g_mean: float
    f1: float
    auc: float | None
    mean_macs: float


@dataclass
class GridResult:
    config: GridConfig
    folds: list[FoldResult]

    def mean(self, metric: str) -> float:
        vals = [getattr(f, metric) for f in self.folds]
        vals = [v for v in vals if v is not None]
        return sum(vals) / len(vals) if vals else float("nan")


def _task_seed(base_seed: int, config_id: int, fold_index: int) -> int:
    seq = np.random.SeedSequence(entropy=base_seed,
                                 spawn_key=(config_id, fold_index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def run_fold(series: TimeSeries, fold: FoldSplit, config: GridConfig,
             base_seed: int) -> FoldResult:
    """Train one configuration on a fold and evaluate on its test block."""
    train_series = training_view(series, fold)
    if len(train_series) < 2:
        raise DataError(f"fold {fold.fold_index} has too little training data")
    domain = (float(train_series.values.min()), float(train_series.values.max()))
    if domain[0] == domain[1]:
        domain = (domain[0], domain[0] + 1.0)
    encoder = new_encoder(domain, config.interval_fraction)
    lif = LifParams(threshold=config.spike_threshold, leak=config.g_l)
    net = Network(NetworkConfig(
        n_r=config.n_r, recurrent=config.recurrent, lif=lif,
        seed=_task_seed(base_seed, config.config_id, fold.fold_index)), encoder)
    fwd = StdpParams(a_minus=config.a_fwd[0], a_plus=config.a_fwd[1])
    rec = None
    if config.a_rec is not None:
        rec = StdpParams(a_minus=config.a_rec[0], a_plus=config.a_rec[1])
    net.train(train_series, fwd, rec, epochs=config.epochs)
    test = series.slice(*fold.test_range)
    signal = net.run_series(test, theta=0.0)
    labels = test.labels
    report = evaluate_run(signal.counts, labels)
    mean_macs, _ = vacuum_macs_for_run(signal.counts, config.n_r, config.recurrent)
    return FoldResult(
        g_mean=report.g_mean.value, f1=report.f1.value,
        auc=None if report.auc is None else report.auc.value,
        mean_macs=mean_macs)


def _run_task(args):
    series, fold, config, base_seed = args
    return run_fold(series, fold, config, base_seed)


def grid_search(series: TimeSeries, grid: GridSpec, seed: int,
                k_folds: int = 5, workers: int = 1,
                rank_metric: str = "g_mean") -> list[GridResult]:
    """Evaluate every configuration on every fold; returns results ranked
    descending by the fold-mean of ``rank_metric``, ties broken by ascending
    mean MACs, then by configuration id."""
    if series.labels is None:
        raise DataError("grid search needs a labelled series")
    if rank_metric not in ("g_mean", "f1", "auc"):
        raise ConfigError(f"unknown ranking metric {rank_metric!r}")
    folds = expanding_folds(series, k_folds)
    configs = grid.configurations()
    tasks = [(series, fold, config, seed)
             for config in configs for fold in folds]
    if workers <= 1:
        outcomes = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=1))
    results = []
    for i, config in enumerate(configs):
        per_fold = outcomes[i * len(folds):(i + 1) * len(folds)]
        results.append(GridResult(config, per_fold))

    def sort_key(r: GridResult):
        m = r.mean(rank_metric)
        macs = r.mean("mean_macs")
        return (-(m if not math.isnan(m) else -1.0), macs, r.config.config_id)

    results.sort(key=sort_key)
    return results


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_ranking_csv(results: list[GridResult], path) -> None:
    n_folds = max((len(r.folds) for r in results), default=0)
    header = ["rank", "config_id", "a_minus_fwd", "a_plus_fwd",
              "a_minus_rec", "a_plus_rec", "recurrent", "n_r",
              "spike_threshold", "g_l", "interval_fraction", "epochs"]
    for metric in ("g_mean", "f1", "auc"):
        header += [f"{metric}_fold{i}" for i in range(n_folds)]
        header.append(f"{metric}_mean")
    header += ["mean_macs"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rank, r in enumerate(results, start=1):
            c = r.config
            row = [rank, c.config_id, _fmt(c.a_fwd[0]), _fmt(c.a_fwd[1]),
                   _fmt(None if c.a_rec is None else c.a_rec[0]),
                   _fmt(None if c.a_rec is None else c.a_rec[1]),
                   int(c.recurrent), c.n_r, _fmt(c.spike_threshold),
                   _fmt(c.g_l), _fmt(c.interval_fraction), c.epochs]
            for metric in ("g_mean", "f1", "auc"):
                row += [_fmt(getattr(f, metric)) for f in r.folds]
                row.append(_fmt(r.mean(metric)))
            row.append(_fmt(r.mean("mean_macs")))
            writer.writerow(row)
