"""Executable rigidity machinery for abelian-by-cyclic groups Gamma_A acting on 1-D manifolds."""

__version__ = "0.1.0"

from .group import (  # noqa: E402
    GroupElement,
    IntegerMatrix,
    Word,
    conjugate_power,
    from_word,
    is_identity,
    multiply,
    relators,
    to_word,
)
from .spectral import (  # noqa: E402
    ConstantsBundle,
    HyperbolicityReport,
    Splitting,
    check_hyperbolic,
    compute_constants,
    compute_splitting,
    find_k,
    operator_norm,
)
