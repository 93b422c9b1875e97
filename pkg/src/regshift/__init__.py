"""Mean-shift mode seeking for regression surfaces.

Estimate local modes of a regression function from (X, Y) samples, partition
the sample points into basins of attraction, select bandwidths by
gradient-matched cross-validation, and extract ridges with a
subspace-constrained variant of the same iteration.
"""

from .bandwidth import BandwidthGrid, cv_gradient, default_grid, pilot_nw_bandwidth, select_bandwidth
from .data import Dataset, SimulationSpec, load_csv, simulate_bimodal, true_modes, true_regression, write_csv
from .estimators import (
    FittedModel,
    NoActiveWeights,
    fit,
    kde_at,
    mean_shift,
    nw_at,
    nw_grad,
    reg_at,
    reg_grad,
    reg_hess,
    unity_at,
)
from .kernels import BIWEIGHT, GAUSSIAN, KernelProfile, get_kernel, normalization, profile_g, profile_k
from .modeseek import (
    AscentViolation,
    IterationConfig,
    ModeSeekResult,
    Partition,
    hausdorff,
    ms_iterate,
    ms_step,
    partition_samples,
)
from .scms import RidgeConfig, RidgePoint, ridge_points, scms_iterate, scms_step
from .transforms import ResponseTransform, TransformedResponses, apply_t1, apply_t2

__version__ = "0.1.0"

__all__ = [
    "AscentViolation",
    "BIWEIGHT",
    "BandwidthGrid",
    "Dataset",
    "FittedModel",
    "GAUSSIAN",
    "IterationConfig",
    "KernelProfile",
    "ModeSeekResult",
    "NoActiveWeights",
    "Partition",
    "ResponseTransform",
    "RidgeConfig",
    "RidgePoint",
    "SimulationSpec",
    "TransformedResponses",
    "apply_t1",
    "apply_t2",
    "cv_gradient",
    "default_grid",
    "fit",
    "get_kernel",
    "hausdorff",
    "kde_at",
    "load_csv",
    "mean_shift",
    "ms_iterate",
    "ms_step",
    "normalization",
    "nw_at",
    "nw_grad",
    "partition_samples",
    "pilot_nw_bandwidth",
    "profile_g",
    "profile_k",
    "reg_at",
    "reg_grad",
    "reg_hess",
    "ridge_points",
    "scms_iterate",
    "scms_step",
    "select_bandwidth",
    "simulate_bimodal",
    "true_modes",
    "true_regression",
    "unity_at",
    "write_csv",
]
