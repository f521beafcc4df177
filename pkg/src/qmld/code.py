"""Stabilizer codes given by a canonical symplectic basis.

With ``r = n - k``:

* ``C_perp`` (stabilizer) is spanned by ``alpha_1..alpha_r``;
* ``T`` (pure syndrome errors) by ``beta_1..beta_r``;
* ``L`` (logical coset representatives) by ``alpha_{r+1}..alpha_n`` followed
  by ``beta_{r+1}..beta_n``;
* ``C`` (the symplectic dual of ``C_perp``) by ``C_perp`` and ``L`` together.

Subspaces are kept as generator lists and are only materialised on request.
Enumeration of ``L`` uses the generator order above, with the first
generator on the least significant bit of the enumeration counter.
"""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidBasis
from .gf2 import DEFAULT_CAP, BitVec, check_cap, in_span, span_array, span_blocks, span_ints, unpack_words
from .symplectic import CanonicalBasis, SympVec, packed_product, validate_canonical_basis

Syndrome = BitVec


class StabilizerCode:
    """An ``[[n, k]]`` stabilizer code in symplectic form."""

    def __init__(self, basis: CanonicalBasis, validate: bool = True) -> None:
        if validate:
            report = validate_canonical_basis(basis)
            if not report.ok:
                shown = ", ".join(str(v) for v in report.violations[:5])
                raise InvalidBasis(f"basis violates {len(report.violations)} relation(s): {shown}")
        self.basis = basis
        self.n = basis.n
        self.k = basis.k
        self.r = basis.r

    def __repr__(self) -> str:
        return f"StabilizerCode(n={self.n}, k={self.k})"

    # generator lists -----------------------------------------------------

    @property
    def stabilizers(self) -> tuple[SympVec, ...]:
        return self.basis.alphas[: self.r]

    @property
    def pure_errors(self) -> tuple[SympVec, ...]:
        return self.basis.betas[: self.r]

    @property
    def logicals(self) -> tuple[SympVec, ...]:
        return self.basis.alphas[self.r :] + self.basis.betas[self.r :]

    @property
    def code_generators(self) -> tuple[SympVec, ...]:
        return self.basis.alphas + self.basis.betas[self.r :]

    def _packed(self, vecs: Sequence[SympVec]) -> list[int]:
        return [v.packed for v in vecs]

    def _check(self, v: SympVec) -> None:
        if v.n != self.n:
            raise DimensionMismatch(f"vector has n={v.n}, code has n={self.n}")

    # syndromes and decomposition -----------------------------------------

    def syndrome(self, omega: SympVec) -> Syndrome:
        """``s_i = alpha_i . omega`` for the ``r`` stabilizer generators."""
        self._check(omega)
        w = omega.packed
        bits = 0
        for i, a in enumerate(self.stabilizers):
            if packed_product(a.packed, w, self.n):
                bits |= 1 << i
        return BitVec(bits, self.r)

    def gamma3_from_syndrome(self, s: Syndrome) -> SympVec:
        """``sum_i s_i beta_i``, the unique element of ``T`` with syndrome ``s``."""
        if s.length != self.r:
            raise DimensionMismatch(f"syndrome has length {s.length}, expected {self.r}")
        acc = 0
        for i, b in enumerate(self.pure_errors):
            if s[i]:
                acc ^= b.packed
        return SympVec.from_packed(acc, self.n)

    def decompose(self, gamma: SympVec) -> tuple[SympVec, SympVec, SympVec]:
        """Split ``gamma`` into its ``C_perp``, ``L`` and ``T`` components.

        The coefficient of ``alpha_j`` is ``gamma . beta_j`` and the
        coefficient of ``beta_j`` is ``gamma . alpha_j``.
        """
        self._check(gamma)
        n, r = self.n, self.r
        g = gamma.packed
        parts = [0, 0, 0]
        for j, (a, b) in enumerate(zip(self.basis.alphas, self.basis.betas)):
            ap, bp = a.packed, b.packed
            if packed_product(g, bp, n):
                parts[0 if j < r else 1] ^= ap
            if packed_product(g, ap, n):
                parts[2 if j < r else 1] ^= bp
        return tuple(SympVec.from_packed(v, n) for v in parts)  # type: ignore[return-value]

    def logical_index(self, gamma: SympVec) -> int:
        """Enumeration counter of the ``L`` component of ``gamma``."""
        self._check(gamma)
        n, r, k = self.n, self.r, self.k
        g = gamma.packed
        t = 0
        for j in range(k):
            if packed_product(g, self.basis.betas[r + j].packed, n):
                t |= 1 << j
            if packed_product(g, self.basis.alphas[r + j].packed, n):
                t |= 1 << (k + j)
        return t

    # membership ----------------------------------------------------------

    def _in(self, v: SympVec, gens: Sequence[SympVec]) -> bool:
        self._check(v)
        packed = BitVec(v.packed, 2 * self.n)
        return in_span(packed, [BitVec(g.packed, 2 * self.n) for g in gens])

    def in_cperp(self, v: SympVec) -> bool:
        return self._in(v, self.stabilizers)

    def in_L(self, v: SympVec) -> bool:
        return self._in(v, self.logicals)

    def in_T(self, v: SympVec) -> bool:
        return self._in(v, self.pure_errors)

    def in_C(self, v: SympVec) -> bool:
        return self._in(v, self.code_generators)

    # enumeration ---------------------------------------------------------

    def enumerate_L(self, cap: int = DEFAULT_CAP) -> Iterator[SympVec]:
        return _enumerate(self._packed(self.logicals), self.n, cap)

    def enumerate_cperp(self, cap: int = DEFAULT_CAP) -> Iterator[SympVec]:
        return _enumerate(self._packed(self.stabilizers), self.n, cap)

    def enumerate_T(self, cap: int = DEFAULT_CAP) -> Iterator[SympVec]:
        return _enumerate(self._packed(self.pure_errors), self.n, cap)

    def L_array(self, offset: int = 0, cap: int = DEFAULT_CAP) -> np.ndarray:
        return span_array(self._packed(self.logicals), 2 * self.n, offset, cap)

    def cperp_array(self, offset: int = 0, cap: int = DEFAULT_CAP) -> np.ndarray:
        return span_array(self._packed(self.stabilizers), 2 * self.n, offset, cap)

    def L_blocks(self, offset: int = 0, cap: int = DEFAULT_CAP):
        return span_blocks(self._packed(self.logicals), 2 * self.n, offset, cap)

    def cperp_ints(self) -> list[int]:
        return span_ints(self._packed(self.stabilizers))

    def L_ints(self) -> list[int]:
        return span_ints(self._packed(self.logicals))


def _enumerate(gens: list[int], n: int, cap: int) -> Iterator[SympVec]:
    check_cap(len(gens), cap)

    def gen() -> Iterator[SympVec]:
        for _, block in span_blocks(gens, 2 * n, 0, cap):
            for row in block:
                yield SympVec.from_packed(unpack_words(row), n)

    return gen()


def syndrome(code: StabilizerCode, omega: SympVec) -> Syndrome:
    return code.syndrome(omega)


def gamma3_from_syndrome(code: StabilizerCode, s: Syndrome) -> SympVec:
    return code.gamma3_from_syndrome(s)


def decompose(code: StabilizerCode, gamma: SympVec) -> tuple[SympVec, SympVec, SympVec]:
    return code.decompose(gamma)


def enumerate_L(code: StabilizerCode, cap: int = DEFAULT_CAP) -> Iterator[SympVec]:
    return code.enumerate_L(cap)


def enumerate_cperp(code: StabilizerCode, cap: int = DEFAULT_CAP) -> Iterator[SympVec]:
    return code.enumerate_cperp(cap)
