"""Bayesian optimization for mixed categorical-continuous design spaces.

The surrogate is an exact Gaussian process whose continuous kernel is a
spectral mixture of Gaussian and Cauchy components and whose categorical
kernel is a weighted exponentiated Hamming similarity, combined as a convex
mixture of their product and sum. Acquisition maximization alternates
between the two variable groups inside an adaptive trust region.
"""

from .acquisition import AcqSpec, gaussian_cdf, gaussian_pdf, score
from .benchmarks import MixedObjective, NoiseSpec, SyntheticFn, add_noise, eval_synthetic, mixed_wrap
from .engine import (
    Campaign,
    CampaignError,
    KernelConfig,
    ObjectiveError,
    SuggestConfig,
    TrustRegionState,
    campaign_from_json,
    campaign_to_json,
    initial_design,
    run_loop,
)
from .gp import GpModel, GramNotPositiveDefiniteError, Posterior, fit, mll, optimize_hyperparams, predict
from .kernels import (
    CsmComponent,
    GsmComponent,
    HammingParams,
    KernelParams,
    gram,
    k_composite,
    k_csm,
    k_gc,
    k_gsm,
    k_hamming,
)
from .space import (
    CategoricalVar,
    ContinuousVar,
    MixedPoint,
    NormalizedPoint,
    SearchSpace,
    SpaceError,
    denormalize,
    encode_categorical_for_benchmark,
    normalize,
    validate_point,
)
from .studies import RunRecord, StudyConfig, compute_metrics, random_search, run_study

__version__ = "0.1.0"

__all__ = [
    "AcqSpec",
    "Campaign",
    "CampaignError",
    "CategoricalVar",
    "ContinuousVar",
    "CsmComponent",
    "GpModel",
    "GramNotPositiveDefiniteError",
    "GsmComponent",
    "HammingParams",
    "KernelConfig",
    "KernelParams",
    "MixedObjective",
    "MixedPoint",
    "NoiseSpec",
    "NormalizedPoint",
    "ObjectiveError",
    "Posterior",
    "RunRecord",
    "SearchSpace",
    "SpaceError",
    "StudyConfig",
    "SuggestConfig",
    "SyntheticFn",
    "TrustRegionState",
    "add_noise",
    "campaign_from_json",
    "campaign_to_json",
    "compute_metrics",
    "denormalize",
    "encode_categorical_for_benchmark",
    "eval_synthetic",
    "fit",
    "gaussian_cdf",
    "gaussian_pdf",
    "gram",
    "initial_design",
    "k_composite",
    "k_csm",
    "k_gc",
    "k_gsm",
    "k_hamming",
    "mixed_wrap",
    "mll",
    "normalize",
    "optimize_hyperparams",
    "predict",
    "random_search",
    "run_loop",
    "run_study",
    "score",
    "validate_point",
]
