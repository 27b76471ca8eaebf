from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from ..exceptions import DataValidationError, SingularMatrixError, ValueRangeError


@dataclass(frozen=True)
class ActivationStack:
    """
    Exported activations of one layer with paired concept labels.

    activations: (N, C, h, w) real values
    labels: (N, H, W) binary concept masks at label resolution
    """

    activations: np.ndarray
    labels: np.ndarray
    layer_id: str = "layer"

    def __post_init__(self):
        acts = np.asarray(self.activations, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.float64)
        if acts.ndim != 4:
            raise DataValidationError("activations", "array of shape (N, C, h, w)", acts)
        if labels.ndim != 3 or labels.shape[0] != acts.shape[0]:
            raise DataValidationError("labels", "array of shape (N, H, W) matching N", labels)
        if not np.all(np.isfinite(acts)):
            raise ValueRangeError("activations", -np.inf, np.inf)
        if not np.all((labels == 0.0) | (labels == 1.0)):
            raise ValueRangeError("concept labels (binary)", 0.0, 1.0)
        object.__setattr__(self, "activations", acts)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.activations.shape[0]

    @property
    def n_channels(self) -> int:
        return self.activations.shape[1]

    @property
    def activation_shape(self) -> Tuple[int, int]:
        return self.activations.shape[2:]

    @property
    def label_shape(self) -> Tuple[int, int]:
        return self.labels.shape[1:]

    def subset(self, indices) -> "ActivationStack":
        indices = np.asarray(indices, dtype=int)
        return ActivationStack(self.activations[indices], self.labels[indices], self.layer_id)

    def with_positives(self) -> "ActivationStack":
        """Only samples showing the concept at all."""
        keep = np.flatnonzero(self.labels.reshape(self.n_samples, -1).any(axis=1))
        return self.subset(keep)

    def split(
        self, val_fraction: float, seed: int = 0
    ) -> Tuple["ActivationStack", "ActivationStack"]:
        """Shuffled train/validation split; tiny stacks validate on the training set."""
        order = np.random.default_rng(seed).permutation(self.n_samples)
        n_val = int(round(self.n_samples * val_fraction))
        if n_val == 0 or n_val == self.n_samples:
            return self, self
        return self.subset(order[n_val:]), self.subset(order[:n_val])

    def features(self) -> np.ndarray:
        """Augmented per-pixel features (activations, 1) at activation resolution, (N*h*w, C+1)."""
        n, c, h, w = self.activations.shape
        x = self.activations.transpose(0, 2, 3, 1).reshape(n * h * w, c)
        return np.hstack([x, np.ones((x.shape[0], 1))])


@dataclass(frozen=True)
class Posterior:
    mean: np.ndarray
    covariance: np.ndarray
    prior_precision: float
    method: str = "fixed"

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=np.float64)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or not np.allclose(cov, cov.T, atol=1e-10):
            raise SingularMatrixError("posterior covariance (not square symmetric)")
        try:
            linalg.cholesky(cov, lower=True)
        except linalg.LinAlgError:
            raise SingularMatrixError("posterior covariance (not positive definite)") from None
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64))
        object.__setattr__(self, "covariance", cov)


@dataclass(frozen=True)
class ConceptHead:
    """1x1 linear probe: logit(p) = weights . x + bias, optionally with a Laplace posterior."""

    weights: np.ndarray
    bias: float
    layer_id: str = "layer"
    posterior: Optional[Posterior] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def n_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def parameters(self) -> np.ndarray:
        """(weights, bias) as one vector."""
        return np.append(self.weights, self.bias)

    def with_posterior(self, posterior: Posterior, **metadata) -> "ConceptHead":
        return replace(self, posterior=posterior, metadata={**self.metadata, **metadata})
