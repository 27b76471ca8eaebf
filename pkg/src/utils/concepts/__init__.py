from .types import ActivationStack, ConceptHead, Posterior
from .training import (
    DICE_EPS,
    LossKind,
    OptimizerKind,
    TrainingHyper,
    ProbeModel,
    probe_loss,
    train_head,
)
from .laplace import (
    PROBIT_SCALE,
    DEFAULT_PRIOR_GRID,
    neg_log_posterior,
    neg_log_posterior_grad,
    gauss_newton_hessian,
    laplace_fit,
    predictive_moments,
    predict_stack,
    predict,
    select_prior_precision,
)
