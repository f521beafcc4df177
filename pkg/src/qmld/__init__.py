"""Exact quantum and classical maximum-likelihood decoders in the symplectic
formalism, and the reduction from classical bounded-weight decoding to both
quantum problems."""

from .code import StabilizerCode
from .decoders import (
    CmldInstance,
    CmldSolution,
    DecodeResult,
    cmld_decision,
    cmld_exact,
    coset_probability,
    dqmld_exact,
    log_coset_probability,
    qmld_exact,
)
from .errors import (
    BadDimensions,
    DimensionMismatch,
    GammaNotInT,
    InconsistentResult,
    Infeasible,
    InvalidBasis,
    InvalidP,
    NotStandardForm,
    ParseError,
    QmldError,
    RankDeficient,
    TooLarge,
)
from .gf2 import BitMatrix, BitVec, StandardFormResult, enumerate_coset, rank, solve, standard_form
from .reduction import (
    ReducedInstance,
    recover_cmld_answer,
    reduce_cmld,
    verify_reduction_identities,
)
from .symplectic import (
    CanonicalBasis,
    SympVec,
    error_probability,
    log_error_probability,
    symp_product,
    to_pauli_string,
    validate_canonical_basis,
    weight,
)

__version__ = "0.1.0"
