"""Symplectic vectors over (Z_2)^{2n} and canonical symplectic bases.

A vector ``(z|x)`` stands for the phase-free Pauli operator
``Z^z X^x``.  Packed form: z bits occupy positions ``0..n-1`` and x bits
positions ``n..2n-1`` of a single int.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import BadDimensions, DimensionMismatch, InvalidP
from .gf2 import BitMatrix, BitVec, rank

Prob = Union[float, Fraction]

_PAULI = {(0, 0): "I", (0, 1): "X", (1, 0): "Z", (1, 1): "Y"}
_PAULI_INV = {v: k for k, v in _PAULI.items()}


@dataclass(frozen=True, slots=True)
class SympVec:
    z: BitVec
    x: BitVec

    def __post_init__(self) -> None:
        if self.z.length != self.x.length:
            raise DimensionMismatch(f"z has length {self.z.length}, x has {self.x.length}")

    @property
    def n(self) -> int:
        return self.z.length

    @property
    def packed(self) -> int:
        return self.z.bits | (self.x.bits << self.n)

    @classmethod
    def from_packed(cls, bits: int, n: int) -> SympVec:
        mask = (1 << n) - 1
        return cls(BitVec(bits & mask, n), BitVec(bits >> n, n))

    @classmethod
    def zeros(cls, n: int) -> SympVec:
        return cls(BitVec(0, n), BitVec(0, n))

    @classmethod
    def from_str(cls, text: str) -> SympVec:
        """Parse ``"zz..|xx.."`` or a bare ``2n``-character string (z bits first)."""
        text = text.strip()
        if "|" in text:
            zs, xs = text.split("|")
        else:
            if len(text) % 2:
                raise ValueError(f"odd-length symplectic string {text!r}")
            half = len(text) // 2
            zs, xs = text[:half], text[half:]
        return cls(BitVec.from_str(zs), BitVec.from_str(xs))

    def __add__(self, other: SympVec) -> SympVec:
        if self.n != other.n:
            raise DimensionMismatch(f"n={self.n} and n={other.n}")
        return SympVec(self.z + other.z, self.x + other.x)

    __xor__ = __add__

    def __str__(self) -> str:
        return f"{self.z}|{self.x}"

    def to_bitstring(self) -> str:
        return f"{self.z}{self.x}"

    def is_zero(self) -> bool:
        return self.z.bits == 0 and self.x.bits == 0


def symp_product(a: SympVec, b: SympVec) -> int:
    """``a.z . b.x + a.x . b.z`` mod 2; 1 iff the two Paulis anticommute."""
    if a.n != b.n:
        raise DimensionMismatch(f"n={a.n} and n={b.n}")
    return ((a.z.bits & b.x.bits).bit_count() + (a.x.bits & b.z.bits).bit_count()) & 1


def packed_product(a: int, b: int, n: int) -> int:
    """Symplectic product on packed ints."""
    mask = (1 << n) - 1
    swapped = (b >> n) | ((b & mask) << n)
    return (a & swapped).bit_count() & 1


def weight(gamma: SympVec) -> int:
    """|z| + |x|; a Y on one qubit counts twice."""
    return gamma.z.weight() + gamma.x.weight()


def check_p(p: Prob) -> None:
    if not 0 < p < Fraction(1, 2):
        raise InvalidP(f"p must lie in (0, 1/2), got {p}")


def probability_of_weight(w: int, n: int, p: Prob) -> Prob:
    return p**w * (1 - p) ** (2 * n - w)


def log_probability_of_weight(w: int, n: int, p: float) -> float:
    return w * math.log(p) + (2 * n - w) * math.log1p(-p)


def error_probability(gamma: SympVec, p: Prob) -> Prob:
    """``p^wt (1-p)^(2n-wt)``; exact when ``p`` is a Fraction."""
    check_p(p)
    return probability_of_weight(weight(gamma), gamma.n, p)


def log_error_probability(gamma: SympVec, p: float) -> float:
    check_p(p)
    return log_probability_of_weight(weight(gamma), gamma.n, float(p))


def to_pauli_string(gamma: SympVec) -> str:
    return "".join(_PAULI[(gamma.z[i], gamma.x[i])] for i in range(gamma.n))


def from_pauli_string(text: str) -> SympVec:
    z = []
    x = []
    for c in text.strip().upper():
        try:
            zi, xi = _PAULI_INV[c]
        except KeyError:
            raise ValueError(f"not a Pauli symbol: {c!r}") from None
        z.append(zi)
        x.append(xi)
    return SympVec(BitVec.from_iterable(z), BitVec.from_iterable(x))


@dataclass(frozen=True)
class CanonicalBasis:
    """``alphas[:n-k]`` generate the stabilizer; ``betas[:n-k]`` are pure-syndrome errors.

    The remaining ``alphas[n-k:]`` and ``betas[n-k:]`` span the logical
    operators.  Construction checks shapes only; use
    :func:`validate_canonical_basis` for the symplectic relations.
    """

    alphas: tuple[SympVec, ...]
    betas: tuple[SympVec, ...]
    n: int
    k: int

    def __post_init__(self) -> None:
        if not 0 < self.k < self.n:
            raise BadDimensions(f"need 0 < k < n, got n={self.n}, k={self.k}")
        if len(self.alphas) != self.n or len(self.betas) != self.n:
            raise BadDimensions(f"need {self.n} alphas and {self.n} betas")
        n = self.n
        for v in self.alphas + self.betas:
            if v.z.length != n:
                raise DimensionMismatch(f"vector of length 2*{v.n} in basis with n={n}")

    @classmethod
    def from_vectors(cls, alphas: Sequence[SympVec], betas: Sequence[SympVec], k: int) -> CanonicalBasis:
        return cls(tuple(alphas), tuple(betas), len(alphas), k)

    @property
    def r(self) -> int:
        """Number of stabilizer generators, ``n - k``."""
        return self.n - self.k

    def replace(self, *, alphas: Sequence[SympVec] | None = None, betas: Sequence[SympVec] | None = None) -> CanonicalBasis:
        return CanonicalBasis(
            tuple(alphas) if alphas is not None else self.alphas,
            tuple(betas) if betas is not None else self.betas,
            self.n,
            self.k,
        )


@dataclass(frozen=True)
class Violation:
    relation: str
    i: int
    j: int

    def __str__(self) -> str:
        return f"{self.relation}(i={self.i}, j={self.j})"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def relations(self) -> set[str]:
        return {v.relation for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok


def validate_canonical_basis(basis: CanonicalBasis) -> ValidationReport:
    """Check all four product relations and linear independence.

    Indices in the report are 1-based.  Relation names:
    ``symp_basis1`` (alpha-alpha), ``symp_basis2`` (beta-beta),
    ``symp_basis3`` (alpha_i-beta_j, i != j), ``symp_basis4``
    (alpha_i-beta_i) and ``independence`` (reported with ``i = j = 0``).
    """
    n = basis.n
    a = [v.packed for v in basis.alphas]
    b = [v.packed for v in basis.betas]
    report = ValidationReport()
    for i in range(n):
        for j in range(i + 1, n):
            if packed_product(a[i], a[j], n):
                report.violations.append(Violation("symp_basis1", i + 1, j + 1))
    for i in range(n):
        for j in range(i + 1, n):
            if packed_product(b[i], b[j], n):
                report.violations.append(Violation("symp_basis2", i + 1, j + 1))
    for i in range(n):
        for j in range(n):
            if i != j and packed_product(a[i], b[j], n):
                report.violations.append(Violation("symp_basis3", i + 1, j + 1))
    for i in range(n):
        if not packed_product(a[i], b[i], n):
            report.violations.append(Violation("symp_basis4", i + 1, i + 1))
    if rank(BitMatrix(tuple(a + b), 2 * n)) < 2 * n:
        report.violations.append(Violation("independence", 0, 0))
    return report


def standard_basis(n: int, k: int) -> CanonicalBasis:
    """``alpha_i = (e_i|0)``, ``beta_i = (0|e_i)``."""
    zero = BitVec.zeros(n)
    alphas = tuple(SympVec(BitVec.unit(n, i), zero) for i in range(n))
    betas = tuple(SympVec(zero, BitVec.unit(n, i)) for i in range(n))
    return CanonicalBasis(alphas, betas, n, k)


def random_canonical_basis(n: int, k: int, rng: random.Random, rounds: int | None = None) -> CanonicalBasis:
    """A random canonical basis obtained from the standard one by symplectic transvections.

    Each transvection ``v -> v + (v . h) h`` preserves every product, so the
    result satisfies all relations by construction.
    """
    if rounds is None:
        rounds = 4 * n
    a = [v.packed for v in standard_basis(n, k).alphas]
    b = [v.packed for v in standard_basis(n, k).betas]
    for _ in range(rounds):
        h = rng.getrandbits(2 * n)
        if not h:
            continue
        a = [v ^ h if packed_product(v, h, n) else v for v in a]
        b = [v ^ h if packed_product(v, h, n) else v for v in b]
    return CanonicalBasis(
        tuple(SympVec.from_packed(v, n) for v in a),
        tuple(SympVec.from_packed(v, n) for v in b),
        n,
        k,
    )
