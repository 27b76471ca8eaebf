"""
Concept head files.

JSON with format_version, layer_id, weights, bias and, for calibrated
heads, the posterior covariance as a flat row-major list.
"""

import json
from pathlib import Path
from typing import Union

import numpy as np

from ..concepts import ConceptHead, Posterior
from ..exceptions import DataParsingError
from ..logging_utils import LogCategory, get_category_logger

logger = get_category_logger(LogCategory.IO)

HEAD_FORMAT_VERSION = 1


def head_to_dict(head: ConceptHead) -> dict:
    record = {
        "format_version": HEAD_FORMAT_VERSION,
        "layer_id": head.layer_id,
        "weights": head.weights.tolist(),
        "bias": head.bias,
        "metadata": head.metadata,
    }
    if head.posterior is not None:
        record["posterior"] = {
            "mean": head.posterior.mean.tolist(),
            "covariance": head.posterior.covariance.reshape(-1).tolist(),
            "prior_precision": head.posterior.prior_precision,
            "method": head.posterior.method,
        }
    return record


def head_from_dict(record: dict) -> ConceptHead:
    version = record.get("format_version")
    if version != HEAD_FORMAT_VERSION:
        raise DataParsingError("concept head", f"unsupported format_version {version}")
    try:
        weights = np.asarray(record["weights"], dtype=np.float64)
        posterior = None
        if record.get("posterior") is not None:
            raw = record["posterior"]
            n = weights.shape[0] + 1
            posterior = Posterior(
                mean=np.asarray(raw["mean"], dtype=np.float64),
                covariance=np.asarray(raw["covariance"], dtype=np.float64).reshape(n, n),
                prior_precision=float(raw["prior_precision"]),
                method=raw.get("method", "fixed"),
            )
        return ConceptHead(
            weights=weights,
            bias=float(record["bias"]),
            layer_id=record.get("layer_id", "layer"),
            posterior=posterior,
            metadata=dict(record.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataParsingError("concept head", str(e)) from None


def save_head(head: ConceptHead, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(head_to_dict(head), indent=2, sort_keys=True), encoding="utf-8")
    logger.info("Saved concept head {} to {}".format(head.layer_id, path))
    return path


def load_head(path: Union[str, Path]) -> ConceptHead:
    """
    Raises:
        DataParsingError: malformed JSON or unknown format_version
        SingularMatrixError: stored covariance is not positive-definite
    """
    path = Path(path)
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataParsingError("concept head", str(e)) from None
    return head_from_dict(record)
