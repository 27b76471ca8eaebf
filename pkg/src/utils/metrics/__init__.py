from .calibration import CalibrationReport, ece_mce, binary_calibration, DEFAULT_BINS
from .classification import (
    ClassificationRates,
    DEFAULT_BETAS,
    beta_key,
    f_beta,
    rates_from_counts,
    classification_rates,
    safe_ratio,
    siou,
)
from .sweep import SweepResult, sweep, coupled_sweep, default_thresholds, best_thresholds
