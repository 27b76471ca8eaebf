"""
Concept probe training.

The probe is a 1x1 convolution over the layer's channels. Losses are
computed on logits; when labels have a higher resolution than the
activations, logits are bilinearly upscaled first. The objective is the
mean loss plus an L2 prior with precision lambda scaled per pixel, so that
over the whole set it reads sum(loss) + lambda/2 |theta|^2.
"""

import math
from enum import Enum
from typing import Optional

import torch
import torch.nn.functional as F
from pydantic import BaseModel, ConfigDict, Field
from torch.utils.data import DataLoader, TensorDataset

from ..exceptions import EmptyInputError, TrainingDivergedError
from ..logging_utils import LogCategory, get_category_logger
from .types import ActivationStack, ConceptHead

logger = get_category_logger(LogCategory.TRAIN)

DICE_EPS = 1e-6


class LossKind(str, Enum):
    BCE = "bce"
    BALANCED_BCE = "balanced_bce"
    DICE = "dice"


class OptimizerKind(str, Enum):
    ADAM = "adam"
    LBFGS = "lbfgs"


class TrainingHyper(BaseModel):
    """Probe training schedule; lbfgs runs full-batch and ignores batch_size and lr."""

    model_config = ConfigDict(frozen=True)

    lr: float = Field(default=1e-3, gt=0.0)
    batch_size: int = Field(default=8, ge=1)
    max_epochs: int = Field(default=7, ge=1)
    early_stop_delta: float = Field(default=1e-3, ge=0.0)
    patience: int = Field(default=3, ge=1)
    val_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)
    prior_precision: float = Field(default=1.0, ge=0.0)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    lbfgs_iterations: int = Field(default=200, ge=1)
    seed: int = 0


class ProbeModel(torch.nn.Module):
    def __init__(self, n_channels: int):
        super().__init__()
        self.conv = torch.nn.Conv2d(n_channels, 1, kernel_size=1, dtype=torch.float64)

    def forward(self, x: torch.Tensor, out_shape=None) -> torch.Tensor:
        logits = self.conv(x)
        if out_shape is not None and tuple(logits.shape[-2:]) != tuple(out_shape):
            logits = F.interpolate(logits, size=out_shape, mode="bilinear", align_corners=False)
        return logits[:, 0]

    def theta(self) -> torch.Tensor:
        return torch.cat([self.conv.weight.reshape(-1), self.conv.bias.reshape(-1)])


def probe_loss(logits: torch.Tensor, labels: torch.Tensor, loss: LossKind) -> torch.Tensor:
    match LossKind(loss):
        case LossKind.BCE:
            return F.binary_cross_entropy_with_logits(logits, labels)
        case LossKind.BALANCED_BCE:
            n_pos = labels.sum()
            n_neg = labels.numel() - n_pos
            pos_weight = n_neg / n_pos if n_pos > 0 else torch.ones((), dtype=labels.dtype)
            return F.binary_cross_entropy_with_logits(logits, labels, pos_weight=pos_weight)
        case LossKind.DICE:
            p = torch.sigmoid(logits)
            return 1.0 - 2.0 * (p * labels).sum() / (p.sum() + labels.sum() + DICE_EPS)


def _objective(model, x, y, loss, prior_scale) -> torch.Tensor:
    theta = model.theta()
    return probe_loss(model(x, y.shape[-2:]), y, loss) + 0.5 * prior_scale * (theta @ theta)


def _check(value: float, epoch: int) -> float:
    if not math.isfinite(value):
        raise TrainingDivergedError(epoch, value)
    return value


def _to_head(
    model: ProbeModel, data: ActivationStack, loss: LossKind, hyper: TrainingHyper, epochs: int
) -> ConceptHead:
    theta = model.theta().detach().numpy()
    return ConceptHead(
        weights=theta[:-1],
        bias=theta[-1],
        layer_id=data.layer_id,
        metadata={
            "loss": LossKind(loss).value,
            "optimizer": hyper.optimizer.value,
            "epochs": epochs,
            "prior_precision": hyper.prior_precision,
        },
    )


def train_head(
    data: ActivationStack,
    loss: LossKind = LossKind.BCE,
    hyper: Optional[TrainingHyper] = None,
) -> ConceptHead:
    """
    Fit a concept probe by MAP estimation.

    Only samples with at least one positive label pixel are used.

    Raises:
        EmptyInputError: no positive label pixel at all
        TrainingDivergedError: the loss became NaN or infinite
    """
    hyper = hyper or TrainingHyper()
    loss = LossKind(loss)
    data = data.with_positives()
    if data.n_samples == 0:
        raise EmptyInputError("positive pixels in the concept labels")

    torch.manual_seed(hyper.seed)
    train, val = data.split(hyper.val_fraction, hyper.seed)
    x_train = torch.from_numpy(train.activations)
    y_train = torch.from_numpy(train.labels)
    x_val = torch.from_numpy(val.activations)
    y_val = torch.from_numpy(val.labels)
    prior_scale = hyper.prior_precision / y_train.numel()

    model = ProbeModel(data.n_channels)

    if hyper.optimizer == OptimizerKind.LBFGS:
        optimizer = torch.optim.LBFGS(
            model.parameters(),
            max_iter=hyper.lbfgs_iterations,
            tolerance_grad=1e-12,
            tolerance_change=1e-14,
            line_search_fn="strong_wolfe",
        )

        def closure():
            optimizer.zero_grad()
            value = _objective(model, x_train, y_train, loss, prior_scale)
            value.backward()
            return value

        _check(float(optimizer.step(closure)), 1)
        with torch.no_grad():
            final = _check(float(_objective(model, x_train, y_train, loss, prior_scale)), 1)
        logger.info("L-BFGS probe fit for {} finished at loss {:.6f}".format(data.layer_id, final))
        return _to_head(model, data, loss, hyper, 1)

    optimizer = torch.optim.Adam(model.parameters(), lr=hyper.lr)
    loader = DataLoader(
        TensorDataset(x_train, y_train),
        batch_size=hyper.batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(hyper.seed),
    )
    best_val = math.inf
    stale = 0
    epoch = 0
    for epoch in range(1, hyper.max_epochs + 1):
        model.train()
        for xb, yb in loader:
            optimizer.zero_grad()
            value = _objective(model, xb, yb, loss, prior_scale)
            _check(float(value), epoch)
            value.backward()
            optimizer.step()

        model.eval()
        with torch.no_grad():
            val_loss = _check(float(_objective(model, x_val, y_val, loss, prior_scale)), epoch)
        logger.debug("Epoch {} validation loss {:.6f}".format(epoch, val_loss))

        if best_val - val_loss > hyper.early_stop_delta:
            best_val = val_loss
            stale = 0
        else:
            stale += 1
            if stale >= hyper.patience:
                logger.info(
                    "Early stop after epoch {}: validation loss improved by less than {} "
                    "for {} epochs".format(epoch, hyper.early_stop_delta, hyper.patience)
                )
                break

    return _to_head(model, data, loss, hyper, epoch)
