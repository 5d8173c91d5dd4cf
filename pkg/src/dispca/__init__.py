"""dispca: communication-efficient distributed PCA for traffic anomaly detection.

Two protocols estimate the global principal subspace from monitor-local
summaries: one for row-partitioned data (monitors uplink top-r singular
values and right singular vectors) and one for column-partitioned data
(monitors uplink local loadings plus projected data). The package also
provides the centralized PCA subspace detector, subspace-distance metrics,
closed-form communication-cost models, a simulated multi-monitor harness
with exact payload counting, DNS-log ingestion into per-second histogram
matrices, a deterministic synthetic traffic generator, and a CLI.
"""

from .errors import (
    DataFormatError,
    DegenerateTruthError,
    DimensionMismatchError,
    DispcaError,
    InvalidConfigError,
    NotCenteredError,
    NotOrthonormalError,
    SvdConvergenceError,
)
from .matrix import (
    ColumnStats,
    DataMatrix,
    SvdResult,
    as_matrix,
    center_columns,
    load_bin,
    load_csv,
    matmul,
    save_bin,
    save_csv,
    thin_svd,
    zscore_columns,
)
from .metrics import geodesic_distance, principal_angles
from .pca import (
    PcaModel,
    Subspace,
    decompose,
    fit_pca,
    principal_subspace,
    residual_scores,
    scree,
    select_dimension,
)
from .commcost import CostLimits, cost_limits, horizontal_cost, vertical_cost
from .detection import (
    GroundTruth,
    RocCurve,
    detect,
    equal_error_rate,
    make_ground_truth,
    roc_curve,
)
from .simnet import (
    Partitioning,
    ProtocolRun,
    center_prepass,
    partition,
    run_protocol,
    split_blocks,
    sweep_min_r,
)
from .ingest import (
    DnsRecord,
    HistogramMatrix,
    build_histogram_matrix,
    field_histograms,
    parse_records,
    read_records,
)
from .synth import AnomalySpec, SpikeConfig, SynthConfig, SynthTruth, synth_traffic
from . import horizontal, vertical
from ._kernels import backend as kernel_backend

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DispcaError",
    "DimensionMismatchError",
    "NotCenteredError",
    "NotOrthonormalError",
    "SvdConvergenceError",
    "DegenerateTruthError",
    "DataFormatError",
    "InvalidConfigError",
    "DataMatrix",
    "ColumnStats",
    "SvdResult",
    "as_matrix",
    "thin_svd",
    "center_columns",
    "zscore_columns",
    "matmul",
    "save_csv",
    "load_csv",
    "save_bin",
    "load_bin",
    "PcaModel",
    "Subspace",
    "fit_pca",
    "select_dimension",
    "scree",
    "principal_subspace",
    "decompose",
    "residual_scores",
    "principal_angles",
    "geodesic_distance",
    "horizontal",
    "vertical",
    "CostLimits",
    "horizontal_cost",
    "vertical_cost",
    "cost_limits",
    "GroundTruth",
    "RocCurve",
    "make_ground_truth",
    "detect",
    "roc_curve",
    "equal_error_rate",
    "Partitioning",
    "ProtocolRun",
    "partition",
    "split_blocks",
    "center_prepass",
    "run_protocol",
    "sweep_min_r",
    "DnsRecord",
    "HistogramMatrix",
    "parse_records",
    "read_records",
    "build_histogram_matrix",
    "field_histograms",
    "SynthConfig",
    "SpikeConfig",
    "AnomalySpec",
    "SynthTruth",
    "synth_traffic",
    "kernel_backend",
]
