"""Dense linear algebra over GF(2) on bit-packed vectors.

Vectors are Python ints used as bitsets: bit ``j`` of the int holds
coordinate ``j`` (coordinate 0 is the leftmost character of the printed
form).  CPython stores ints as arrays of machine-word limbs, so XOR, AND and
``int.bit_count`` all run in O(len / word) time.

Exhaustive enumeration over a span is vectorised with numpy: vectors are
repacked as rows of little-endian ``uint64`` words and spans are built with a
meet-in-the-middle table so that element ``t`` of a span is
``hi[t >> h] ^ lo[t & (2**h - 1)]``.

Coefficient order convention: the ``j``-th generator of a span corresponds to
bit ``j`` of the enumeration counter, so element ``t`` of a span is the XOR of
the generators selected by the binary expansion of ``t``.  Enumeration starts
at ``t = 0`` (the zero combination) and ties are broken in favour of the
smallest counter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, Infeasible, RankDeficient, TooLarge

DEFAULT_CAP = 24
_BLOCK_BITS = 16


def _parity(v: int) -> int:
    return v.bit_count() & 1


@dataclass(frozen=True, slots=True)
class BitVec:
    """A fixed-length vector over GF(2)."""

    bits: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits {self.bits:#x} do not fit in length {self.length}")

    @classmethod
    def zeros(cls, length: int) -> BitVec:
        return cls(0, length)

    @classmethod
    def unit(cls, length: int, index: int) -> BitVec:
        if not 0 <= index < length:
            raise IndexError(index)
        return cls(1 << index, length)

    @classmethod
    def from_str(cls, text: str) -> BitVec:
        text = text.strip()
        if any(c not in "01" for c in text):
            raise ValueError(f"not a bit string: {text!r}")
        bits = 0
        for j, c in enumerate(text):
            if c == "1":
                bits |= 1 << j
        return cls(bits, len(text))

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> BitVec:
        bits = 0
        length = 0
        for j, b in enumerate(values):
            if int(b) & 1:
                bits |= 1 << j
            length = j + 1
        return cls(bits, length)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError(index)
        return (self.bits >> index) & 1

    def __iter__(self) -> Iterator[int]:
        for j in range(self.length):
            yield (self.bits >> j) & 1

    def __add__(self, other: BitVec) -> BitVec:
        if self.length != other.length:
            raise DimensionMismatch(f"lengths {self.length} and {other.length}")
        return BitVec(self.bits ^ other.bits, self.length)

    __xor__ = __add__

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> j) & 1 else "0" for j in range(self.length))

    def weight(self) -> int:
        """Hamming weight."""
        return self.bits.bit_count()

    def dot(self, other: BitVec) -> int:
        if self.length != other.length:
            raise DimensionMismatch(f"lengths {self.length} and {other.length}")
        return _parity(self.bits & other.bits)

    def concat(self, other: BitVec) -> BitVec:
        return BitVec(self.bits | (other.bits << self.length), self.length + other.length)

    def permute(self, perm: Sequence[int]) -> BitVec:
        """Return ``u`` with ``u[j] = self[perm[j]]``."""
        if len(perm) != self.length:
            raise DimensionMismatch("permutation length")
        bits = 0
        for j, src in enumerate(perm):
            if (self.bits >> src) & 1:
                bits |= 1 << j
        return BitVec(bits, self.length)

    def unpermute(self, perm: Sequence[int]) -> BitVec:
        """Inverse of :meth:`permute`: ``u[perm[j]] = self[j]``."""
        if len(perm) != self.length:
            raise DimensionMismatch("permutation length")
        bits = 0
        for j, dst in enumerate(perm):
            if (self.bits >> j) & 1:
                bits |= 1 << dst
        return BitVec(bits, self.length)

    def to_list(self) -> list[int]:
        return list(self)


def hamming_weight(v: BitVec) -> int:
    return v.weight()


@dataclass(frozen=True)
class BitMatrix:
    """A dense matrix over GF(2) stored as a tuple of packed rows."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self) -> None:
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[BitVec | str | Sequence[int]], ncols: int | None = None) -> BitMatrix:
        vecs = []
        for r in rows:
            if isinstance(r, BitVec):
                vecs.append(r)
            elif isinstance(r, str):
                vecs.append(BitVec.from_str(r))
            else:
                vecs.append(BitVec.from_iterable(r))
        if ncols is None:
            if not vecs:
                raise ValueError("ncols is required for an empty matrix")
            ncols = vecs[0].length
        for v in vecs:
            if v.length != ncols:
                raise DimensionMismatch(f"row length {v.length} != {ncols}")
        return cls(tuple(v.bits for v in vecs), ncols)

    @classmethod
    def from_numpy(cls, array: np.ndarray) -> BitMatrix:
        array = np.asarray(array) % 2
        nrows, ncols = array.shape
        return cls.from_rows((array[i].tolist() for i in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls((0,) * nrows, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def row(self, i: int) -> BitVec:
        return BitVec(self.rows[i], self.ncols)

    def row_vectors(self) -> list[BitVec]:
        return [BitVec(r, self.ncols) for r in self.rows]

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        return (self.rows[i] >> j) & 1

    def __matmul__(self, v: BitVec) -> BitVec:
        if v.length != self.ncols:
            raise DimensionMismatch(f"matrix has {self.ncols} columns, vector has length {v.length}")
        bits = 0
        for i, r in enumerate(self.rows):
            if _parity(r & v.bits):
                bits |= 1 << i
        return BitVec(bits, self.nrows)

    def transpose(self) -> BitMatrix:
        out = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                if (r >> j) & 1:
                    out[j] |= 1 << i
        return BitMatrix(tuple(out), self.nrows)

    def hstack(self, other: BitMatrix) -> BitMatrix:
        if self.nrows != other.nrows:
            raise DimensionMismatch("row counts differ")
        return BitMatrix(tuple(a | (b << self.ncols) for a, b in zip(self.rows, other.rows)), self.ncols + other.ncols)

    def vstack(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.ncols:
            raise DimensionMismatch("column counts differ")
        return BitMatrix(self.rows + other.rows, self.ncols)

    def column_slice(self, start: int, stop: int) -> BitMatrix:
        mask = (1 << (stop - start)) - 1
        return BitMatrix(tuple((r >> start) & mask for r in self.rows), stop - start)

    def permute_columns(self, perm: Sequence[int]) -> BitMatrix:
        """Return ``B`` with column ``j`` of ``B`` equal to column ``perm[j]`` of ``self``."""
        return BitMatrix(tuple(BitVec(r, self.ncols).permute(perm).bits for r in self.rows), self.ncols)

    def is_standard_form(self) -> bool:
        """True when the left square block is the identity."""
        m = self.nrows
        if m > self.ncols:
            return False
        mask = (1 << m) - 1
        return all((r & mask) == (1 << i) for i, r in enumerate(self.rows))

    def to_numpy(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def __str__(self) -> str:
        return "\n".join(str(BitVec(r, self.ncols)) for r in self.rows)


@dataclass(frozen=True)
class StandardFormResult:
    """``matrix == row_transform @ A[:, column_perm]`` and ``matrix = [I | P]``.

    ``column_perm[j]`` is the original column that ends up at position ``j``.
    """

    matrix: BitMatrix
    column_perm: tuple[int, ...]
    row_transform: BitMatrix

    @property
    def P(self) -> BitMatrix:
        return self.matrix.column_slice(self.matrix.nrows, self.matrix.ncols)


def _rref(rows: list[int], pivot_cols: int, track: list[int] | None = None) -> list[int]:
    """Reduce ``rows`` in place to reduced row echelon form.

    Only the low ``pivot_cols`` bits are eligible as pivots; higher bits ride
    along (augmented columns).  ``track``, if given, receives the same row
    operations.  Returns the pivot column of each of the leading rows.
    """
    pivots: list[int] = []
    r = 0
    m = len(rows)
    for col in range(pivot_cols):
        if r == m:
            break
        bit = 1 << col
        found = next((i for i in range(r, m) if rows[i] & bit), None)
        if found is None:
            continue
        if found != r:
            rows[r], rows[found] = rows[found], rows[r]
            if track is not None:
                track[r], track[found] = track[found], track[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
                if track is not None:
                    track[i] ^= track[r]
        pivots.append(col)
        r += 1
    return pivots


def rank(A: BitMatrix) -> int:
    """Dimension of the row space of ``A``."""
    return len(_rref(list(A.rows), A.ncols))


def in_span(v: BitVec, generators: Sequence[BitVec]) -> bool:
    """True when ``v`` is a GF(2) combination of ``generators``."""
    if not generators:
        return v.bits == 0
    width = v.length
    rows = [g.bits for g in generators]
    base = len(_rref(rows, width))
    return len(_rref(rows + [v.bits], width)) == base


def standard_form(A: BitMatrix) -> StandardFormResult:
    """Bring a full-row-rank matrix to ``[I | P]``.

    Columns are scanned left to right; row operations are preferred and a
    column swap is recorded only when the current column has no pivot.
    """
    m, n = A.shape
    if rank(A) < m:
        raise RankDeficient(f"rank {rank(A)} < {m} rows")
    rows = list(A.rows)
    track = [1 << i for i in range(m)]
    perm = list(range(n))

    def swap_columns(a: int, b: int) -> None:
        for i, r in enumerate(rows):
            ba, bb = (r >> a) & 1, (r >> b) & 1
            if ba != bb:
                rows[i] = r ^ ((1 << a) | (1 << b))
        perm[a], perm[b] = perm[b], perm[a]

    for r in range(m):
        bit = 1 << r
        found = next((i for i in range(r, m) if rows[i] & bit), None)
        if found is None:
            below = 0
            for i in range(r, m):
                below |= rows[i]
            below >>= r + 1
            # full rank guarantees a later pivot column exists
            j = r + 1 + ((below & -below).bit_length() - 1)
            swap_columns(r, j)
            found = next(i for i in range(r, m) if rows[i] & bit)
        if found != r:
            rows[r], rows[found] = rows[found], rows[r]
            track[r], track[found] = track[found], track[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
                track[i] ^= track[r]
    return StandardFormResult(BitMatrix(tuple(rows), n), tuple(perm), BitMatrix(tuple(track), m))


def solve(A: BitMatrix, y: BitVec) -> BitVec | None:
    """Some ``w`` with ``A @ w == y`` (free variables set to 0), or ``None``."""
    if y.length != A.nrows:
        raise DimensionMismatch(f"y has length {y.length}, A has {A.nrows} rows")
    n = A.ncols
    rows = [r | (((y.bits >> i) & 1) << n) for i, r in enumerate(A.rows)]
    pivots = _rref(rows, n)
    for r in rows[len(pivots):]:
        if r >> n:
            return None
    w = 0
    for r, col in zip(rows, pivots):
        if r >> n:
            w |= 1 << col
    return BitVec(w, n)


def kernel_basis(A: BitMatrix) -> list[BitVec]:
    """Basis of ``{w : A @ w == 0}``, one vector per free column, in column order."""
    n = A.ncols
    rows = list(A.rows)
    pivots = _rref(rows, n)
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, col in zip(rows, pivots):
            if (r >> f) & 1:
                v |= 1 << col
        basis.append(BitVec(v, n))
    return basis


def row_space_basis(A: BitMatrix) -> list[BitVec]:
    rows = list(A.rows)
    pivots = _rref(rows, A.ncols)
    return [BitVec(r, A.ncols) for r in rows[: len(pivots)]]


# ---------------------------------------------------------------------------
# vectorised span enumeration


def n_words(width: int) -> int:
    return max(1, (width + 63) // 64)


def pack_words(v: int, words: int) -> np.ndarray:
    return np.frombuffer(v.to_bytes(8 * words, "little"), dtype="<u8").astype(np.uint64)


def unpack_words(row: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(row, dtype="<u8").tobytes(), "little")


def pack_many(values: Sequence[int], words: int) -> np.ndarray:
    if not values:
        return np.zeros((0, words), dtype=np.uint64)
    return np.stack([pack_words(v, words) for v in values])


def row_weights(block: np.ndarray) -> np.ndarray:
    """Popcount of every packed row, as int64."""
    return np.bitwise_count(block).sum(axis=1, dtype=np.int64)


def _span_table(generators: np.ndarray, offset: np.ndarray) -> np.ndarray:
    table = offset[None, :].copy()
    for g in generators:
        table = np.concatenate([table, table ^ g[None, :]])
    return table


def check_cap(bits: int, cap: int, what: str = "enumeration") -> None:
    if bits > cap:
        raise TooLarge(bits, cap, what)


def span_blocks(
    generators: Sequence[int],
    width: int,
    offset: int = 0,
    cap: int = DEFAULT_CAP,
    block_bits: int = _BLOCK_BITS,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, block)`` covering ``offset + span(generators)`` in counter order.

    ``block[i]`` is the packed element with counter ``start + i``.
    """
    d = len(generators)
    check_cap(d, cap)
    words = n_words(width)
    gens = pack_many(list(generators), words)
    zero = np.zeros(words, dtype=np.uint64)
    lo_bits = min(d, block_bits)
    lo = _span_table(gens[:lo_bits], pack_words(offset, words))
    hi = _span_table(gens[lo_bits:], zero)
    for h in range(hi.shape[0]):
        yield h << lo_bits, lo ^ hi[h][None, :]


def span_array(generators: Sequence[int], width: int, offset: int = 0, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All ``2**len(generators)`` elements of ``offset + span``, packed, in counter order."""
    blocks = [b for _, b in span_blocks(generators, width, offset, cap)]
    return np.concatenate(blocks) if len(blocks) > 1 else blocks[0]


def span_ints(generators: Sequence[int], offset: int = 0) -> list[int]:
    """Plain-int enumeration of ``offset + span`` in counter order (small spans only)."""
    out = [offset]
    for g in generators:
        out = out + [v ^ g for v in out]
    return out


def enumerate_coset(A: BitMatrix, y: BitVec, limit: int = DEFAULT_CAP) -> Iterator[BitVec]:
    """Every solution of ``A @ w == y`` exactly once.

    Solutions are ordered by the counter over free-variable assignments (free
    columns taken left to right, first free column = least significant bit).
    """
    if y.length != A.nrows:
        raise DimensionMismatch(f"y has length {y.length}, A has {A.nrows} rows")
    w0 = solve(A, y)
    if w0 is None:
        raise Infeasible("A w = y has no solution")
    kernel = kernel_basis(A)
    check_cap(len(kernel), limit)
    return _iter_coset(w0, kernel, limit)


def _iter_coset(w0: BitVec, kernel: list[BitVec], limit: int) -> Iterator[BitVec]:
    n = w0.length
    for _, block in span_blocks([k.bits for k in kernel], n, w0.bits, limit):
        for row in block:
            yield BitVec(unpack_words(row), n)
