"""
Exported activation stacks: .npz archives with an activations array
(N, C, h, w), a labels array (N, H, W) and optionally a layer_id string.
"""

import zipfile
from pathlib import Path
from typing import Union

import numpy as np

from ..concepts import ActivationStack
from ..exceptions import DataParsingError


def load_activations(path: Union[str, Path]) -> ActivationStack:
    """
    Raises:
        DataParsingError: unreadable archive or missing arrays
        DataValidationError: arrays of the wrong rank
        ValueRangeError: non-finite activations or non-binary labels
    """
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as archive:
            if "activations" not in archive or "labels" not in archive:
                raise DataParsingError(
                    "activation stack", f"{path.name} needs 'activations' and 'labels' arrays"
                )
            layer_id = str(archive["layer_id"]) if "layer_id" in archive else path.stem
            return ActivationStack(archive["activations"], archive["labels"], layer_id)
    except (OSError, ValueError, zipfile.BadZipFile) as e:
        raise DataParsingError("activation stack", str(e)) from None


def save_activations(stack: ActivationStack, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        np.savez_compressed(
            f, activations=stack.activations, labels=stack.labels, layer_id=np.array(stack.layer_id)
        )
    return path
