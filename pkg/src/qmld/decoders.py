"""Exact exhaustive solvers for QMLD, DQMLD and CMLD.

All three are exponential by design.  Every enumeration is guarded by a cap
given as a base-2 exponent (``cap=24`` allows 2**24 candidates); exceeding it
raises :class:`~qmld.errors.TooLarge`.

Ties are resolved in favour of the candidate with the smallest enumeration
counter (see :mod:`qmld.gf2`).  DQMLD compares log coset probabilities and
treats two cosets as tied when their probabilities agree to a relative
``DQMLD_TIE_RTOL``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .code import StabilizerCode
from .errors import BadDimensions, DimensionMismatch, GammaNotInT, NotStandardForm, RankDeficient
from .gf2 import (
    DEFAULT_CAP,
    BitMatrix,
    BitVec,
    check_cap,
    kernel_basis,
    rank,
    row_weights,
    solve,
    span_blocks,
    unpack_words,
)
from .symplectic import Prob, SympVec, check_p, probability_of_weight, random_canonical_basis

DQMLD_TIE_RTOL = 1e-9
DEFAULT_P = 0.1
# max number of (logical, stabilizer) pairs held in memory at once
_CHUNK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class CmldInstance:
    """``A`` is ``(n-k) x n`` in standard form ``[I | P]``; ask for ``|w| <= m`` with ``A w = y``."""

    A: BitMatrix
    y: BitVec
    m: int

    def __post_init__(self) -> None:
        if self.A.nrows == 0 or self.A.nrows > self.A.ncols:
            raise BadDimensions(f"A has shape {self.A.shape}")
        if not self.A.is_standard_form():
            raise NotStandardForm("A must have the form [I | P]")
        if rank(self.A) != self.A.nrows:
            raise RankDeficient("A must have full row rank")
        if self.y.length != self.A.nrows:
            raise DimensionMismatch(f"y has length {self.y.length}, A has {self.A.nrows} rows")
        if self.m < 0:
            raise ValueError("m must be non-negative")

    @property
    def n(self) -> int:
        return self.A.ncols

    @property
    def k(self) -> int:
        return self.A.ncols - self.A.nrows

    @property
    def P(self) -> BitMatrix:
        return self.A.column_slice(self.A.nrows, self.A.ncols)

    @classmethod
    def from_P(cls, P: BitMatrix, y: BitVec, m: int) -> CmldInstance:
        return cls(BitMatrix.identity(P.nrows).hstack(P), y, m)


@dataclass(frozen=True)
class DecodeResult:
    """Chosen representative of ``L`` and the value of the objective there.

    ``objective`` is the minimum weight for QMLD and the natural log of the
    coset probability for DQMLD.  ``index`` is the enumeration counter of
    ``gamma_hat`` in ``L``.
    """

    gamma_hat: SympVec
    objective: Union[int, float]
    ties: int
    index: int
    problem: str


@dataclass(frozen=True)
class CmldSolution:
    w: BitVec
    weight: int
    ties: int


def _require_in_T(code: StabilizerCode, gamma3: SympVec) -> None:
    if gamma3.n != code.n:
        raise DimensionMismatch(f"gamma3 has n={gamma3.n}, code has n={code.n}")
    if not code.in_T(gamma3):
        raise GammaNotInT(f"{gamma3} is not in the span of beta_1..beta_{code.r}")


def _L_element(code: StabilizerCode, index: int) -> SympVec:
    acc = 0
    for j, g in enumerate(code.logicals):
        if (index >> j) & 1:
            acc ^= g.packed
    return SympVec.from_packed(acc, code.n)


def qmld_exact(code: StabilizerCode, gamma3: SympVec, cap: int = DEFAULT_CAP) -> DecodeResult:
    """Minimise ``wt(gamma + gamma3)`` over ``gamma`` in ``L``."""
    _require_in_T(code, gamma3)
    check_cap(2 * code.k, cap, "QMLD over L")
    best = None
    best_index = 0
    ties = 0
    for start, block in code.L_blocks(gamma3.packed, cap):
        w = row_weights(block)
        lo = int(w.min())
        if best is None or lo < best:
            best = lo
            best_index = start + int(np.argmax(w == lo))
            ties = int(np.count_nonzero(w == lo))
        elif lo == best:
            ties += int(np.count_nonzero(w == lo))
    assert best is not None
    return DecodeResult(_L_element(code, best_index), best, ties, best_index, "qmld")


def _logsumexp_rows(x: np.ndarray) -> np.ndarray:
    top = x.max(axis=1)
    return top + np.log(np.exp(x - top[:, None]).sum(axis=1))


def coset_logs(code: StabilizerCode, gamma3: SympVec, p: float, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Log probability of every coset ``gamma + gamma3 + C_perp``, ``gamma`` in ``L`` counter order."""
    check_p(p)
    check_cap(2 * code.k, cap, "DQMLD over L")
    check_cap(code.r, cap, "coset sum over C_perp")
    check_cap(code.n + code.k, cap, "DQMLD")
    lp, lq = math.log(p), math.log1p(-p)
    two_n = 2 * code.n
    stab = code.cperp_array(cap=cap)
    rows_per_chunk = max(1, _CHUNK_ELEMENTS // stab.shape[0])
    out = []
    for _, block in code.L_blocks(gamma3.packed, cap):
        for i in range(0, block.shape[0], rows_per_chunk):
            sub = block[i : i + rows_per_chunk]
            w = np.bitwise_count(sub[:, None, :] ^ stab[None, :, :]).sum(axis=2, dtype=np.int64)
            out.append(_logsumexp_rows(w * lp + (two_n - w) * lq))
    return np.concatenate(out)


def coset_weight_histogram(code: StabilizerCode, offset: SympVec, cap: int = DEFAULT_CAP) -> np.ndarray:
    """``h[w]`` = number of elements of weight ``w`` in ``offset + C_perp``."""
    stab = code.cperp_array(offset.packed, cap=cap)
    return np.bincount(row_weights(stab), minlength=2 * code.n + 1)


def coset_weight_histograms(code: StabilizerCode, gamma3: SympVec, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Weight histogram of every coset ``gamma + gamma3 + C_perp`` (rows in ``L`` counter order)."""
    check_cap(code.n + code.k, cap, "coset histograms")
    width = 2 * code.n + 1
    stab = code.cperp_array(cap=cap)
    rows_per_chunk = max(1, _CHUNK_ELEMENTS // stab.shape[0])
    out = []
    for _, block in code.L_blocks(gamma3.packed, cap):
        for i in range(0, block.shape[0], rows_per_chunk):
            sub = block[i : i + rows_per_chunk]
            w = np.bitwise_count(sub[:, None, :] ^ stab[None, :, :]).sum(axis=2, dtype=np.int64)
            flat = (np.arange(sub.shape[0])[:, None] * width + w).ravel()
            out.append(np.bincount(flat, minlength=sub.shape[0] * width).reshape(sub.shape[0], width))
    return np.concatenate(out)


def probability_from_histogram(hist: Sequence[int], n: int, p: Prob) -> Prob:
    """``sum_w hist[w] p^w (1-p)^(2n-w)``; exact for Fraction ``p``."""
    terms = [int(c) * probability_of_weight(w, n, p) for w, c in enumerate(hist) if c]
    if isinstance(p, Fraction):
        return sum(terms, Fraction(0))
    return math.fsum(terms)


def coset_probability(
    code: StabilizerCode, gamma: SympVec, gamma3: SympVec, p: Prob, cap: int = DEFAULT_CAP
) -> Prob:
    """Total probability of ``gamma + gamma3 + C_perp``; exact for Fraction ``p``."""
    check_p(p)
    check_cap(code.r, cap, "coset sum over C_perp")
    hist = coset_weight_histogram(code, gamma + gamma3, cap)
    return probability_from_histogram(hist, code.n, p)


def log_coset_probability(
    code: StabilizerCode, gamma: SympVec, gamma3: SympVec, p: float, cap: int = DEFAULT_CAP
) -> float:
    check_p(p)
    check_cap(code.r, cap, "coset sum over C_perp")
    stab = code.cperp_array((gamma + gamma3).packed, cap=cap)
    w = row_weights(stab)
    x = w * math.log(p) + (2 * code.n - w) * math.log1p(-p)
    return float(_logsumexp_rows(x[None, :])[0])


def select_max(logs: np.ndarray, rtol: float = DQMLD_TIE_RTOL) -> tuple[int, int]:
    """First index within ``rtol`` (relative, linear scale) of the maximum, and the tie count."""
    top = logs.max()
    near = logs >= top + math.log1p(-rtol)
    return int(np.argmax(near)), int(np.count_nonzero(near))


def dqmld_exact(code: StabilizerCode, gamma3: SympVec, p: float = DEFAULT_P, cap: int = DEFAULT_CAP) -> DecodeResult:
    """Maximise the probability of the coset ``gamma + gamma3 + C_perp`` over ``gamma`` in ``L``."""
    check_p(p)
    _require_in_T(code, gamma3)
    logs = coset_logs(code, gamma3, float(p), cap)
    index, ties = select_max(logs)
    return DecodeResult(_L_element(code, index), float(logs[index]), ties, index, "dqmld")


def cmld_exact(inst: CmldInstance, cap: int = DEFAULT_CAP) -> CmldSolution:
    """Minimum-weight solution of ``A w = y`` by enumerating the solution coset."""
    check_cap(inst.k, cap, "CMLD solution coset")
    w0 = solve(inst.A, inst.y)
    assert w0 is not None, "full-rank A always admits a solution"
    kernel = [v.bits for v in kernel_basis(inst.A)]
    best = None
    best_row = None
    ties = 0
    for _, block in span_blocks(kernel, inst.n, w0.bits, cap):
        w = row_weights(block)
        lo = int(w.min())
        if best is None or lo < best:
            best = lo
            best_row = block[int(np.argmax(w == lo))].copy()
            ties = int(np.count_nonzero(w == lo))
        elif lo == best:
            ties += int(np.count_nonzero(w == lo))
    assert best is not None and best_row is not None
    return CmldSolution(BitVec(unpack_words(best_row), inst.n), best, ties)


def cmld_decision(inst: CmldInstance, cap: int = DEFAULT_CAP) -> bool:
    """Is there ``w`` with ``|w| <= m`` and ``A w = y``?"""
    return cmld_exact(inst, cap).weight <= inst.m


def brute_force_cmld_min(A: BitMatrix, y: BitVec) -> int | None:
    """Minimum ``|w|`` over all ``2**n`` vectors with ``A w = y`` (independent oracle)."""
    n = A.ncols
    if n > 24:
        raise ValueError("brute force limited to n <= 24")
    allv = np.arange(1 << n, dtype=np.uint64)
    synd = np.zeros(1 << n, dtype=np.uint64)
    for i, row in enumerate(A.rows):
        par = np.bitwise_count(allv & np.uint64(row)) & np.uint8(1)
        synd |= par.astype(np.uint64) << np.uint64(i)
    hits = allv[synd == np.uint64(y.bits)]
    if hits.size == 0:
        return None
    return int(np.bitwise_count(hits).min())


# ---------------------------------------------------------------------------
# degeneracy witness search


@dataclass(frozen=True)
class DegeneracyWitness:
    """A syndrome where the most likely coset avoids every minimum-weight error.

    ``dqmld_probability`` and ``best_qmld_coset_probability`` are exact
    rationals at ``p``.
    """

    code: StabilizerCode
    gamma3: SympVec
    p: Fraction
    qmld: DecodeResult
    dqmld: DecodeResult
    dqmld_coset_min_weight: int
    dqmld_probability: Fraction
    best_qmld_coset_probability: Fraction


def find_degeneracy_witness(
    rng: random.Random,
    n_values: Sequence[int] = (3, 4, 5, 6),
    p_values: Sequence[Fraction] = (Fraction(1, 4), Fraction(1, 3), Fraction(2, 5), Fraction(9, 20)),
    max_codes: int = 500,
    cap: int = DEFAULT_CAP,
) -> DegeneracyWitness | None:
    """Random search for a code, syndrome and ``p`` where DQMLD and QMLD disagree.

    A witness requires that the DQMLD coset contains no error of the global
    minimum weight for the syndrome, that its exact probability strictly
    exceeds that of every coset which does contain one, and that it is not
    the coset of the QMLD answer.
    """
    for _ in range(max_codes):
        n = rng.choice(list(n_values))
        k = rng.randint(1, n - 1)
        code = StabilizerCode(random_canonical_basis(n, k, rng))
        for s in range(1 << code.r):
            gamma3 = code.gamma3_from_syndrome(BitVec(s, code.r))
            hists = coset_weight_histograms(code, gamma3, cap)
            coset_min = np.argmax(hists > 0, axis=1)
            global_min = int(coset_min.min())
            holding_min = np.nonzero(coset_min == global_min)[0]
            if holding_min.size == hists.shape[0]:
                continue
            for p in p_values:
                exact = [probability_from_histogram(h, n, p) for h in hists]
                best = max(range(len(exact)), key=lambda i: (exact[i], -i))
                if coset_min[best] == global_min:
                    continue
                rival = max(exact[i] for i in holding_min)
                if exact[best] <= rival:
                    continue
                q = qmld_exact(code, gamma3, cap)
                d = dqmld_exact(code, gamma3, float(p), cap)
                if d.index != best or d.ties != 1 or q.index == best:
                    continue
                return DegeneracyWitness(
                    code, gamma3, p, q, d, int(coset_min[best]), exact[best], rival
                )
    return None


__all__ = [
    "CmldInstance",
    "CmldSolution",
    "DecodeResult",
    "DegeneracyWitness",
    "brute_force_cmld_min",
    "cmld_decision",
    "cmld_exact",
    "coset_logs",
    "coset_probability",
    "coset_weight_histogram",
    "coset_weight_histograms",
    "dqmld_exact",
    "find_degeneracy_witness",
    "log_coset_probability",
    "probability_from_histogram",
    "qmld_exact",
    "select_max",
]
