from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from ..validators import validate_truth_value


class TruthValue(float):
    """A scalar truth degree in [0,1]. NaN and out-of-range values are rejected."""

    def __new__(cls, value=0.0):
        return super().__new__(cls, validate_truth_value(value))


class Family(str, Enum):
    LUKASIEWICZ = "lukasiewicz"
    GOEDEL = "goedel"
    PRODUCT = "product"
    BOOLEAN = "boolean"


class ImplicationStyle(str, Enum):
    S = "S"
    R = "R"


class ForallMode(str, Enum):
    MEAN = "mean"
    TNORM_REDUCE = "tnorm_reduce"


class ExistsMode(str, Enum):
    GOEDEL_MAX = "goedel_max"
    TCONORM_REDUCE = "tconorm_reduce"
    MEAN = "mean"


FUZZY_FAMILIES = (Family.LUKASIEWICZ, Family.GOEDEL, Family.PRODUCT)


class LogicSystem(BaseModel):
    """
    A connective family plus quantifier reduction modes.

    Defaults follow the monitoring setup: Product logic, S-implication,
    mean for the universal and max for the existential quantifier.
    """

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    family: Family = Family.PRODUCT
    bool_threshold: float = Field(default=0.5, gt=0.0, le=1.0)
    implication_style: ImplicationStyle = ImplicationStyle.S
    forall_mode: ForallMode = ForallMode.MEAN
    exists_mode: ExistsMode = ExistsMode.GOEDEL_MAX

    @property
    def is_boolean(self) -> bool:
        return self.family == Family.BOOLEAN

    def is_de_morgan_dual(self) -> bool:
        """Whether (exists x: f) equals (not forall x: not f) for this configuration."""
        if self.forall_mode == ForallMode.MEAN:
            return self.exists_mode == ExistsMode.MEAN
        # tnorm_reduce
        if self.exists_mode == ExistsMode.TCONORM_REDUCE:
            return True
        # max is the dual of min, and min is the Goedel (and Boolean) t-norm
        return self.exists_mode == ExistsMode.GOEDEL_MAX and self.family in (
            Family.GOEDEL,
            Family.BOOLEAN,
        )

    def describe(self) -> str:
        return "{}/{}-impl/forall={}/exists={}".format(
            self.family.value,
            self.implication_style.value,
            self.forall_mode.value,
            self.exists_mode.value,
        )
