"""Texture feature extraction and Gaussian Bayes classification toolkit."""

from .imaging import (
    Segment,
    SegmentationConfig,
    load_pgm,
    save_pgm,
    quantize,
    segment_image,
    split_train_test,
)
from .gmrf import GmrfParams, estimate_gmrf, gmrf_features, synthesize_gmrf
from .fractal import FbmConfig, fbm_features, fd_image, hurst_fit, synthesize_fbm
from .statxture import (
    acf_compute,
    acf_features,
    glcm_compute,
    glcm_feature_vector,
    haralick_features,
    rlm_compute,
    rlm_feature_vector,
    rlm_features,
)
from .bayes import LabeledDataset, classify, evaluate, fit, log_likelihood
from .harness import ExperimentConfig, render_report, run_experiment

__version__ = "0.1.0"
