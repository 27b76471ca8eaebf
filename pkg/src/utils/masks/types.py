from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..exceptions import ShapeMismatchError
from ..validators import validate_odd_ksize, validate_truth_array

Shape = Tuple[int, int]


class TruthMask:
    """
    Immutable H x W grid of truth values in [0,1].

    Pixel index (i_h, i_w) maps to the point (i_h + 0.5, i_w + 0.5), i.e. pixel
    coordinates refer to pixel centers.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = validate_truth_array(data)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.size == 0:
            raise ShapeMismatchError((-1, -1), tuple(arr.shape), "truth mask")
        arr = np.array(arr, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def from_array(cls, data) -> "TruthMask":
        return cls(data)

    @classmethod
    def full(cls, shape: Shape, value: float) -> "TruthMask":
        return cls(np.full(shape, value, dtype=np.float64))

    @classmethod
    def zeros(cls, shape: Shape) -> "TruthMask":
        return cls.full(shape, 0.0)

    @property
    def array(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Shape:
        return self._data.shape

    @property
    def height(self) -> int:
        return self._data.shape[0]

    @property
    def width(self) -> int:
        return self._data.shape[1]

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "TruthMask":
        return TruthMask(fn(self._data))

    def allclose(self, other: "TruthMask", atol: float = 1e-9) -> bool:
        return self.shape == other.shape and bool(
            np.allclose(self._data, other.array, rtol=0.0, atol=atol)
        )

    def __eq__(self, other):
        if not isinstance(other, TruthMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other.array))

    def __hash__(self):
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self):
        return "TruthMask({}x{}, range=[{:.3f}, {:.3f}])".format(
            self.height, self.width, self._data.min(), self._data.max()
        )


def pixel_centers(shape: Shape) -> Tuple[np.ndarray, np.ndarray]:
    """Row and column center coordinates of every pixel, each of the given shape."""
    rows, cols = np.meshgrid(
        np.arange(shape[0], dtype=np.float64) + 0.5,
        np.arange(shape[1], dtype=np.float64) + 0.5,
        indexing="ij",
    )
    return rows, cols


class CloseByKind(str, Enum):
    TRIVIAL = "trivial"
    GAUSSIAN = "gaussian"
    L1_WINDOW = "l1_window"


class CloseByParams(BaseModel):
    """
    Parameters of the CloseBy predicate.

    gaussian: exp(-d^2 / (2 sigma^2)) cut to 0 outside L1 radius r and below
    low_cut; r=None means unbounded support. l1_window: 1 within L1 radius
    r = (ksize - 1) // 2. trivial: 1 only at distance 0.
    """

    model_config = ConfigDict(frozen=True)

    kind: CloseByKind = CloseByKind.TRIVIAL
    sigma: float = Field(default=0.0, ge=0.0)
    r: Optional[int] = Field(default=0, ge=0)
    low_cut: float = Field(default=0.1, ge=0.0, le=1.0)
    ksize: Optional[int] = None

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = CloseByKind(data.get("kind", CloseByKind.TRIVIAL))
        if kind == CloseByKind.GAUSSIAN and float(data.get("sigma", 0.0)) == 0.0:
            kind = CloseByKind.TRIVIAL
        if kind == CloseByKind.GAUSSIAN:
            data.setdefault("r", None)
        if kind == CloseByKind.L1_WINDOW:
            ksize = validate_odd_ksize(data.get("ksize", 2 * int(data.get("r", 0)) + 1))
            data["ksize"] = ksize
            data["r"] = (ksize - 1) // 2
        if kind == CloseByKind.TRIVIAL:
            data["sigma"] = 0.0
            data["r"] = 0
            data["ksize"] = 1
        data["kind"] = kind
        return data

    @classmethod
    def trivial(cls) -> "CloseByParams":
        return cls(kind=CloseByKind.TRIVIAL)

    @classmethod
    def gaussian(
        cls, sigma: float, r: Optional[int] = None, low_cut: float = 0.1
    ) -> "CloseByParams":
        return cls(kind=CloseByKind.GAUSSIAN, sigma=sigma, r=r, low_cut=low_cut)

    @classmethod
    def l1_window(cls, ksize: int) -> "CloseByParams":
        return cls(kind=CloseByKind.L1_WINDOW, ksize=ksize)

    @property
    def is_trivial(self) -> bool:
        return self.kind == CloseByKind.TRIVIAL

    @property
    def is_bounded(self) -> bool:
        return self.r is not None

    @property
    def window_size(self) -> int:
        return 2 * self.r + 1

    def as_args(self) -> dict:
        """Named arguments reproducing these params in rule syntax."""
        match self.kind:
            case CloseByKind.TRIVIAL:
                return {}
            case CloseByKind.L1_WINDOW:
                return {"ksize": self.ksize}
            case CloseByKind.GAUSSIAN:
                args = {"sigma": self.sigma}
                if self.r is not None:
                    args["r"] = self.r
                if self.low_cut != 0.1:
                    args["low_cut"] = self.low_cut
                return args


class BoundingBox(BaseModel):
    """Axis-aligned box in pixel coordinates; x runs along the width, y along the height."""

    model_config = ConfigDict(frozen=True)

    x0: float
    y0: float
    x1: float
    y1: float
    score: float = Field(default=1.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_extent(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(
                f"box must satisfy x0 < x1 and y0 < y1 (got {self.x0, self.y0, self.x1, self.y1})"
            )
        return self

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def to_list(self) -> list:
        return [self.x0, self.y0, self.x1, self.y1, self.score]

    @classmethod
    def from_list(cls, values) -> "BoundingBox":
        score = values[4] if len(values) > 4 else 1.0
        return cls(x0=values[0], y0=values[1], x1=values[2], y1=values[3], score=score)
