"""Plain-text instance files.

Two schemas; ``#`` starts a comment line and blank lines are ignored::

    cmld <n> <k> <m>
    A
    <n-k rows of n bits>
    y <n-k bits>

    qec <n> <k>
    alpha
    <n rows of 2n bits, z bits then x bits>
    beta
    <n rows of 2n bits>
    gamma3 <2n bits>

The leftmost bit of every row is coordinate 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .errors import ParseError
from .gf2 import BitMatrix, BitVec
from .symplectic import CanonicalBasis, SympVec


@dataclass(frozen=True)
class CmldFile:
    A: BitMatrix
    y: BitVec
    m: int

    @property
    def n(self) -> int:
        return self.A.ncols

    @property
    def k(self) -> int:
        return self.A.ncols - self.A.nrows


@dataclass(frozen=True)
class QecFile:
    basis: CanonicalBasis
    gamma3: SympVec


InstanceFile = Union[CmldFile, QecFile]


def _bits(text: str, length: int, what: str, lineno: int) -> BitVec:
    if len(text) != length or any(c not in "01" for c in text):
        raise ParseError(f"line {lineno}: {what} must be {length} characters of 0/1, got {text!r}")
    return BitVec.from_str(text)


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None


class _Lines:
    def __init__(self, text: str) -> None:
        self.items = [
            (i + 1, line.strip())
            for i, line in enumerate(text.splitlines())
            if line.strip() and not line.lstrip().startswith("#")
        ]
        self.pos = 0
        self.last = len(text.splitlines())

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.items):
            raise ParseError(f"line {self.last + 1}: unexpected end of file, expected {what}")
        item = self.items[self.pos]
        self.pos += 1
        return item

    def keyword(self, word: str) -> tuple[int, list[str]]:
        lineno, line = self.next(repr(word))
        tokens = line.split()
        if tokens[0] != word:
            raise ParseError(f"line {lineno}: expected {word!r}, got {tokens[0]!r}")
        return lineno, tokens[1:]

    def done(self) -> None:
        if self.pos != len(self.items):
            lineno, line = self.items[self.pos]
            raise ParseError(f"line {lineno}: trailing content {line!r}")


def parse_instance(text: str) -> InstanceFile:
    lines = _Lines(text)
    lineno, header = lines.next("header")
    tokens = header.split()
    kind = tokens[0]
    if kind == "cmld":
        if len(tokens) != 4:
            raise ParseError(f"line {lineno}: header must be 'cmld n k m'")
        n, k, m = _ints(tokens[1:], lineno)
        if not 0 <= k < n or m < 0:
            raise ParseError(f"line {lineno}: need 0 <= k < n and m >= 0")
        lines.keyword("A")
        rows = [_bits(row, n, "row of A", ln) for ln, row in (lines.next("row of A") for _ in range(n - k))]
        lineno, rest = lines.keyword("y")
        if len(rest) != 1:
            raise ParseError(f"line {lineno}: expected 'y <bits>'")
        y = _bits(rest[0], n - k, "y", lineno)
        lines.done()
        return CmldFile(BitMatrix.from_rows(rows, n), y, m)
    if kind == "qec":
        if len(tokens) != 3:
            raise ParseError(f"line {lineno}: header must be 'qec n k'")
        n, k = _ints(tokens[1:], lineno)
        if not 0 < k < n:
            raise ParseError(f"line {lineno}: need 0 < k < n")
        blocks = []
        for name in ("alpha", "beta"):
            lines.keyword(name)
            vecs = []
            for _ in range(n):
                ln, row = lines.next(f"{name} row")
                bits = _bits(row, 2 * n, f"{name} row", ln)
                vecs.append(SympVec.from_packed(bits.bits, n))
            blocks.append(tuple(vecs))
        lineno, rest = lines.keyword("gamma3")
        if len(rest) != 1:
            raise ParseError(f"line {lineno}: expected 'gamma3 <bits>'")
        g = _bits(rest[0], 2 * n, "gamma3", lineno)
        lines.done()
        return QecFile(CanonicalBasis(blocks[0], blocks[1], n, k), SympVec.from_packed(g.bits, n))
    raise ParseError(f"line {lineno}: unknown instance kind {kind!r}")


def format_instance(inst: InstanceFile, comments: list[str] | None = None) -> str:
    out = [f"# {c}" for c in comments or []]
    if isinstance(inst, CmldFile):
        out.append(f"cmld {inst.n} {inst.k} {inst.m}")
        out.append("A")
        out.extend(str(r) for r in inst.A.row_vectors())
        out.append(f"y {inst.y}")
    else:
        b = inst.basis
        out.append(f"qec {b.n} {b.k}")
        out.append("alpha")
        out.extend(v.to_bitstring() for v in b.alphas)
        out.append("beta")
        out.extend(v.to_bitstring() for v in b.betas)
        out.append(f"gamma3 {inst.gamma3.to_bitstring()}")
    return "\n".join(out) + "\n"


def read_instance(path: str | Path) -> InstanceFile:
    return parse_instance(Path(path).read_text())


def write_instance(path: str | Path, inst: InstanceFile, comments: list[str] | None = None) -> None:
    Path(path).write_text(format_instance(inst, comments))
