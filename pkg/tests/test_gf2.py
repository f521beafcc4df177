import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import brute_rank, brute_solutions, kernel_weights, span_set
from qmld.errors import DimensionMismatch, Infeasible, RankDeficient, TooLarge
from qmld.gf2 import (
    BitMatrix,
    BitVec,
    enumerate_coset,
    in_span,
    kernel_basis,
    rank,
    solve,
    span_array,
    span_ints,
    standard_form,
    unpack_words,
)


@st.composite
def matrices(draw, max_rows=6, max_cols=12, full_rank=False):
    ncols = draw(st.integers(1, max_cols))
    nrows = draw(st.integers(1, min(max_rows, ncols) if full_rank else max_rows))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), min_size=nrows, max_size=nrows))
    A = BitMatrix(tuple(rows), ncols)
    if full_rank:
        assume(rank(A) == nrows)
    return A


def test_bitvec_roundtrip_and_weight():
    v = BitVec.from_str("10110")
    assert str(v) == "10110"
    assert v.weight() == 3
    assert v[0] == 1 and v[1] == 0
    assert (v + v).weight() == 0
    with pytest.raises(DimensionMismatch):
        v + BitVec.zeros(3)
    with pytest.raises(ValueError):
        BitVec(8, 3)


def test_permute_inverse():
    v = BitVec.from_str("1100101")
    perm = (3, 0, 6, 1, 2, 5, 4)
    assert v.permute(perm).unpermute(perm) == v
    assert v.permute(perm).weight() == v.weight()


@pytest.mark.parametrize(
    "rows, ncols, expected",
    [
        (["100", "010", "001"], 3, 3),
        (["0000", "0000"], 4, 0),
    ],
)
def test_rank_identity_and_zero(rows, ncols, expected):
    assert rank(BitMatrix.from_rows(rows, ncols)) == expected


def test_rank_derived():
    A = BitMatrix.from_rows(["1100", "0110", "1010"])
    assert brute_rank(list(A.rows)) == 2
    assert rank(A) == 2


@given(matrices())
def test_rank_matches_span_size(A):
    assert rank(A) == brute_rank(list(A.rows))
    assert rank(A) <= min(A.nrows, A.ncols)


def test_standard_form_fixed_point():
    A = BitMatrix.from_rows(["10110", "01011"])
    sf = standard_form(A)
    assert sf.matrix == A
    assert sf.column_perm == tuple(range(5))


def test_standard_form_prefers_row_swap():
    sf = standard_form(BitMatrix.from_rows(["01", "10"]))
    assert sf.matrix == BitMatrix.identity(2)
    assert sf.column_perm == (0, 1)


def test_standard_form_row_space_preserved():
    A = BitMatrix.from_rows(["110", "011"])
    sf = standard_form(A)
    assert sf.matrix.is_standard_form()
    assert str(sf.P) == "1\n1"
    back = [BitVec(r, 3).unpermute(sf.column_perm).bits for r in sf.matrix.rows]
    assert span_set(back) == span_set(list(A.rows))


def test_standard_form_column_swap_recorded():
    A = BitMatrix.from_rows(["110", "111"])
    sf = standard_form(A)
    assert sf.column_perm == (0, 2, 1)
    assert sf.matrix.is_standard_form()


def test_standard_form_rank_deficient():
    with pytest.raises(RankDeficient):
        standard_form(BitMatrix.from_rows(["11", "11"]))


@settings(max_examples=60)
@given(matrices(max_rows=5, max_cols=10, full_rank=True))
def test_standard_form_properties(A):
    sf = standard_form(A)
    m = A.nrows
    assert sf.matrix.is_standard_form()
    assert rank(sf.matrix) == rank(A) == m
    permuted = A.permute_columns(sf.column_perm)
    T = sf.row_transform
    for i in range(m):
        row = 0
        for j in range(m):
            if T[i, j]:
                row ^= permuted.rows[j]
        assert row == sf.matrix.rows[i]
    assert kernel_weights(list(A.rows), A.ncols) == kernel_weights(list(sf.matrix.rows), A.ncols)
    mapped = sorted(BitVec(w, A.ncols).permute(sf.column_perm).bits for w in brute_solutions(list(A.rows), A.ncols, 0))
    assert mapped == sorted(brute_solutions(list(sf.matrix.rows), A.ncols, 0))


def test_solve_examples():
    assert solve(BitMatrix.identity(3), BitVec.from_str("101")) == BitVec.from_str("101")
    w = solve(BitMatrix.from_rows(["11"]), BitVec.from_str("0"))
    assert str(w) in {"00", "11"}
    assert solve(BitMatrix.from_rows(["11", "11"]), BitVec.from_str("01")) is None
    with pytest.raises(DimensionMismatch):
        solve(BitMatrix.identity(2), BitVec.from_str("1"))


@given(matrices(), st.data())
def test_solve_consistency(A, data):
    y = BitVec(data.draw(st.integers(0, (1 << A.nrows) - 1)), A.nrows)
    w = solve(A, y)
    feasible = bool(brute_solutions(list(A.rows), A.ncols, y.bits))
    assert (w is not None) == feasible
    if w is not None:
        assert A @ w == y


def test_enumerate_coset_examples():
    assert [str(v) for v in enumerate_coset(BitMatrix.identity(2), BitVec.from_str("10"))] == ["10"]
    assert [str(v) for v in enumerate_coset(BitMatrix.from_rows(["11"]), BitVec.from_str("1"))] == ["10", "01"]
    A = BitMatrix.from_rows(["110", "011"])
    got = sorted(v.bits for v in enumerate_coset(A, BitVec.from_str("11")))
    want = sorted(brute_solutions(list(A.rows), 3, 0b11))
    assert got == want and len(got) == 2 ** (3 - 2)


def test_enumerate_coset_errors():
    with pytest.raises(Infeasible):
        list(enumerate_coset(BitMatrix.from_rows(["11", "11"]), BitVec.from_str("01")))
    with pytest.raises(TooLarge):
        enumerate_coset(BitMatrix.from_rows(["1" + "0" * 9]), BitVec.from_str("0"), limit=8)


@settings(max_examples=80)
@given(matrices(), st.data())
def test_enumerate_coset_exhaustive(A, data):
    y = BitVec(data.draw(st.integers(0, (1 << A.nrows) - 1)), A.nrows)
    brute = brute_solutions(list(A.rows), A.ncols, y.bits)
    if not brute:
        with pytest.raises(Infeasible):
            enumerate_coset(A, y)
        return
    got = [v.bits for v in enumerate_coset(A, y)]
    assert len(got) == len(set(got)) == 2 ** (A.ncols - rank(A))
    assert sorted(got) == sorted(brute)


def test_kernel_basis_is_basis():
    A = BitMatrix.from_rows(["1011", "0110"])
    basis = kernel_basis(A)
    assert len(basis) == 2
    assert span_set([b.bits for b in basis]) == set(brute_solutions(list(A.rows), 4, 0))


def test_in_span():
    gens = [BitVec.from_str("110"), BitVec.from_str("011")]
    assert in_span(BitVec.from_str("101"), gens)
    assert not in_span(BitVec.from_str("100"), gens)
    assert in_span(BitVec.zeros(3), [])


@pytest.mark.parametrize("width", [5, 64, 70, 130])
def test_span_array_counter_order(width):
    gens = [(1 << (width - 1)) | 1, 0b110, 1 << (width // 2), 0b1000]
    arr = span_array(gens, width, offset=0b1)
    assert [unpack_words(r) for r in arr] == span_ints(gens, 0b1)
