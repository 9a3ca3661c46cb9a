"""Trainable bar-selective filters for segmenting elongated structures.

A filter is configured from a prototype bar pattern as a set of
difference-of-Gaussians response points on concentric circles, made
rotation-invariant by rotating the point set, and applied as the weighted
geometric mean of blurred, shifted responses. The package also ships the
evaluation (MCC/ROC/AUC, paired t-test), parameter tuning, and CLI
machinery used to run full segmentation experiments.
"""

from bcosfire.filters import (
    ConfigurationError,
    FilterConfig,
    FilterPoint,
    OrientationBank,
    WeightScheme,
    analytic_asymmetric,
    analytic_symmetric,
    apply_filter,
    blur_shift_response,
    combine_responses,
    combined_response,
    configure_from_prototype,
    load_config,
    make_bank,
    rescale_response,
    rotate_config,
    save_config,
    segment,
    weight_scheme,
)
from bcosfire.imops import (
    convolve,
    dog_kernel,
    dog_response,
    gaussian_kernel,
    rectify,
    weighted_max_blur,
)
from bcosfire.metrics import (
    ConfusionMatrix,
    RocCurve,
    TTestResult,
    UndefinedMetricError,
    auc,
    basic_metrics,
    confusion,
    mcc,
    paired_t_test,
    roc,
)
from bcosfire.preprocess import clahe, extract_green, preprocess_image, smooth_fov_border
from bcosfire.tuning import SearchSpace, TuningResult, grid_search, sensitivity_experiment, split_dataset

__version__ = "0.1.0"
