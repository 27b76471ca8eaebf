"""
Laplace calibration of concept heads.

The posterior over the augmented parameters theta = (weights, bias) is a
Gaussian centered at the MAP estimate. Its precision is the Gauss-Newton
Hessian of the BCE loss plus the prior precision:

    H = sum_i s_i (1 - s_i) x_i x_i^T + lambda I,   s_i = sigmoid(theta . x_i)

with x_i = (activations, 1) per activation pixel. Each activation pixel
stands for the label pixels it covers after upscaling, so its curvature is
weighted by the label/activation resolution ratio.

Calibrated prediction uses the probit approximation of the predictive:

    p(x) = sigmoid(mu(x) / sqrt(1 + pi/8 * s2(x))),   s2(x) = x^T Sigma x
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
import torch
import torch.nn.functional as F
from scipy import linalg
from scipy.special import expit

from ..exceptions import (
    ConfigValidationError,
    MissingPosteriorError,
    ShapeMismatchError,
    SingularMatrixError,
)
from ..logging_utils import LogCategory, get_category_logger
from ..masks import Shape, TruthMask
from ..metrics import binary_calibration
from .types import ActivationStack, ConceptHead, Posterior

logger = get_category_logger(LogCategory.CALIBRATION)

PROBIT_SCALE = math.pi / 8.0
DEFAULT_PRIOR_GRID: Tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)


def neg_log_posterior(
    theta: np.ndarray, features: np.ndarray, labels: np.ndarray, prior_precision: float
) -> float:
    """Summed BCE in logit space plus lambda/2 |theta|^2."""
    z = features @ theta
    bce = np.sum(np.logaddexp(0.0, z) - labels * z)
    return float(bce + 0.5 * prior_precision * theta @ theta)


def neg_log_posterior_grad(
    theta: np.ndarray, features: np.ndarray, labels: np.ndarray, prior_precision: float
) -> np.ndarray:
    return features.T @ (expit(features @ theta) - labels) + prior_precision * theta


def gauss_newton_hessian(
    theta: np.ndarray, features: np.ndarray, prior_precision: float, weight: float = 1.0
) -> np.ndarray:
    s = expit(features @ theta)
    curvature = weight * s * (1.0 - s)
    h = features.T @ (features * curvature[:, None])
    return h + prior_precision * np.eye(theta.shape[0])


def _check_channels(head: ConceptHead, n_channels: int) -> None:
    if n_channels != head.n_channels:
        raise ShapeMismatchError((head.n_channels,), (n_channels,), "activation channels")


def laplace_fit(
    head: ConceptHead,
    data: ActivationStack,
    prior_precision: float = 1.0,
    method: str = "fixed",
) -> ConceptHead:
    """
    Attach a full-covariance Laplace posterior to a MAP head.

    Raises:
        ConfigValidationError: prior_precision is not positive
        ShapeMismatchError: head and data disagree on the channel count
        SingularMatrixError: the posterior precision fails to factorize
    """
    if not prior_precision > 0.0:
        raise ConfigValidationError("prior_precision", prior_precision, "must be positive")
    _check_channels(head, data.n_channels)

    theta = head.parameters
    h, w = data.activation_shape
    weight = (data.label_shape[0] * data.label_shape[1]) / float(h * w)
    features = data.features()
    precision = gauss_newton_hessian(theta, features, prior_precision, weight)
    try:
        factor = linalg.cho_factor(precision, lower=True)
    except linalg.LinAlgError:
        raise SingularMatrixError("posterior precision (Hessian + prior)") from None
    covariance = linalg.cho_solve(factor, np.eye(theta.shape[0]))
    covariance = 0.5 * (covariance + covariance.T)

    logger.info(
        "Laplace posterior for {}: lambda={}, {} pixels, max std {:.4g}".format(
            head.layer_id,
            prior_precision,
            features.shape[0],
            float(np.sqrt(np.diag(covariance).max())),
        )
    )
    posterior = Posterior(theta, covariance, prior_precision, method)
    return head.with_posterior(posterior, calibration=method, prior_precision=prior_precision)


def predictive_moments(
    head: ConceptHead, activations: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Logit mean and variance per activation pixel, each (N, h, w).

    The variance is zero for a head without posterior.
    """
    acts = np.asarray(activations, dtype=np.float64)
    _check_channels(head, acts.shape[1])
    mu = np.einsum("nchw,c->nhw", acts, head.weights) + head.bias
    if head.posterior is None:
        return mu, np.zeros_like(mu)
    n, c, h, w = acts.shape
    x = np.concatenate([acts, np.ones((n, 1, h, w))], axis=1)
    s2 = np.einsum("nihw,ij,njhw->nhw", x, head.posterior.covariance, x)
    return mu, np.maximum(s2, 0.0)


def _upscale(values: np.ndarray, out_shape: Optional[Shape]) -> np.ndarray:
    if out_shape is None or tuple(values.shape[-2:]) == tuple(out_shape):
        return values
    t = torch.from_numpy(values[:, None])
    up = F.interpolate(t, size=tuple(out_shape), mode="bilinear", align_corners=False)
    return up[:, 0].numpy()


def predict_stack(
    head: ConceptHead,
    activations: np.ndarray,
    calibrated: bool = False,
    out_shape: Optional[Shape] = None,
) -> np.ndarray:
    """
    Concept probabilities for (N, C, h, w) activations as an (N, H, W) array.

    Logit moments are bilinearly upscaled before the sigmoid, so calibrated
    and uncalibrated outputs cross 0.5 at the same pixels.

    Raises:
        MissingPosteriorError: calibrated without a fitted posterior
        ShapeMismatchError: channel count differs from the head
    """
    if calibrated and head.posterior is None:
        raise MissingPosteriorError(head.layer_id)
    mu, s2 = predictive_moments(head, activations)
    mu = _upscale(mu, out_shape)
    if not calibrated:
        return expit(mu)
    s2 = _upscale(s2, out_shape)
    return expit(mu / np.sqrt(1.0 + PROBIT_SCALE * s2))


def predict(
    head: ConceptHead,
    activations: np.ndarray,
    calibrated: bool = False,
    out_shape: Optional[Shape] = None,
) -> TruthMask:
    """Concept mask for one (C, h, w) activation tensor."""
    acts = np.asarray(activations, dtype=np.float64)
    if acts.ndim != 3:
        raise ShapeMismatchError((head.n_channels, -1, -1), acts.shape, "activations")
    return TruthMask(predict_stack(head, acts[None], calibrated, out_shape)[0])


def select_prior_precision(
    head: ConceptHead,
    train: ActivationStack,
    val: ActivationStack,
    grid: Sequence[float] = DEFAULT_PRIOR_GRID,
    n_bins: int = 10,
) -> ConceptHead:
    """
    Fit one posterior per prior precision and keep the one with the lowest
    validation ECE; ties go to the earlier grid entry.
    """
    if not grid:
        raise ConfigValidationError("prior_grid", grid, "must not be empty")
    best: Optional[Tuple[float, ConceptHead]] = None
    for prior_precision in grid:
        candidate = laplace_fit(head, train, prior_precision, method="grid_ece")
        probs = predict_stack(candidate, val.activations, True, val.label_shape)
        ece = binary_calibration(probs, val.labels, n_bins).ece
        logger.debug("Prior precision {}: validation ECE {:.5f}".format(prior_precision, ece))
        if best is None or ece < best[0]:
            best = (ece, candidate)

    ece, chosen = best
    logger.info(
        "Selected prior precision {} for {} (validation ECE {:.5f})".format(
            chosen.posterior.prior_precision, head.layer_id, ece
        )
    )
    return chosen.with_posterior(chosen.posterior, prior_grid=list(grid), val_ece=ece)
