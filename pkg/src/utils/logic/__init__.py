from .types import (
    TruthValue,
    Family,
    ImplicationStyle,
    ForallMode,
    ExistsMode,
    LogicSystem,
    FUZZY_FAMILIES,
)
from .connectives import neg, conj, disj, impl, equiv, binarize_values
from .quantifiers import reduce_forall, reduce_exists, tnorm_fold, tconorm_fold
