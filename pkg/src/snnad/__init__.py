"""Energy-aware spiking-network anomaly detection for univariate time series.

Pipeline: interval-encode each value into a single input spike, process it
with a leaky integrate-and-fire layer whose connections were shaped by
sign-controlled plasticity on normal data, and flag anomalies when the
layer's spike count exceeds a threshold. MAC counting provides an exact
energy proxy for the detector and for conventional baseline architectures.
"""

from .data import (
    FoldSplit,
    TimeSeries,
    apply_label_windows,
    expanding_folds,
    load_csv,
    load_label_windows,
    resample_uniform,
    training_view,
    write_csv,
)
from .detector import apply_threshold, smooth, threshold_grid
from .encoder import IntervalEncoder, new_encoder, new_encoder_with_delta
from .energy import (
    AvgPool,
    BatchNorm,
    Conv1d,
    Dense,
    Lof,
    Lstm,
    Ocsvm,
    baseline_macs,
    model_macs,
    vacuum_macs_for_run,
    vacuum_macs_per_step,
)
from .gridsearch import GridSpec, grid_search
from .lif import LifLayer, LifParams, reset_layer
from .metrics import (
    ConfusionCounts,
    MetricsReport,
    auc,
    confusion,
    evaluate_run,
    f1,
    g_mean,
    youden_threshold,
)
from .network import Network, NetworkConfig, SpikeSignal
from .stdp import StdpParams, SynapticBehaviour, TraceState, classify_behaviour, stdp_update

__version__ = "0.1.0"
