"""Reduction from classical bounded-weight decoding to QMLD and DQMLD.

Given ``A = [I_r | P]`` (``r = n - k``), target ``y`` and bound ``m``, build a
canonical basis whose alphas are the rows of::

    [ I_r  P   | 0 ]
    [ 0    I_k | 0 ]

and whose betas are the rows of::

    [ 0 | I_r  0   ]
    [ 0 | P^T  I_k ]

and set ``gamma3 = (0|z)`` with ``z = (y, 0, ..., 0)``.  Any exact QMLD or
DQMLD answer ``(u|v)`` on this instance yields a minimum-weight solution
``v + z`` of ``A w = y``.

:func:`verify_reduction_identities` checks every structural fact the argument
relies on by enumeration, and :func:`corrupt_instance` produces negative
controls for it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .code import StabilizerCode
from .decoders import (
    CmldInstance,
    DecodeResult,
    cmld_exact,
    coset_weight_histogram,
    dqmld_exact,
    probability_from_histogram,
    qmld_exact,
)
from .errors import BadDimensions, InconsistentResult, NotStandardForm, QmldError
from .gf2 import (
    DEFAULT_CAP,
    BitMatrix,
    BitVec,
    check_cap,
    kernel_basis,
    pack_words,
    span_ints,
    standard_form,
)
from .symplectic import CanonicalBasis, Prob, SympVec, check_p, validate_canonical_basis

FLOAT_RTOL = 1e-12


@dataclass(frozen=True)
class ReducedInstance:
    code: StabilizerCode
    gamma3: SympVec
    z: BitVec
    source: CmldInstance
    column_perm: tuple[int, ...] | None = None

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k


def reduce_cmld(inst: CmldInstance, validate: bool = False) -> ReducedInstance:
    """Build the QMLD/DQMLD instance for ``inst`` in O(n^2) bit operations."""
    A = inst.A
    n, r = A.ncols, A.nrows
    k = n - r
    if not 1 <= k < n:
        raise BadDimensions(f"need 1 <= k < n, got n={n}, k={k}")
    if not A.is_standard_form():
        raise NotStandardForm("A must have the form [I | P]")
    # column l of P becomes the first n-k bits of beta_{n-k+l}
    pt = [1 << (r + l) for l in range(k)]
    for i, row in enumerate(A.rows):
        for l in range(k):
            if (row >> (r + l)) & 1:
                pt[l] |= 1 << i
    zero = BitVec.zeros(n)
    alphas = [SympVec(BitVec(row, n), zero) for row in A.rows]
    alphas += [SympVec(BitVec(1 << j, n), zero) for j in range(r, n)]
    betas = [SympVec(zero, BitVec(1 << i, n)) for i in range(r)]
    betas += [SympVec(zero, BitVec(row, n)) for row in pt]
    basis = CanonicalBasis(tuple(alphas), tuple(betas), n, k)
    z = BitVec(inst.y.bits, n)
    return ReducedInstance(StabilizerCode(basis, validate=validate), SympVec(zero, z), z, inst)


def standardize_cmld(A: BitMatrix, y: BitVec, m: int) -> tuple[CmldInstance, tuple[int, ...]]:
    """Equivalent standard-form instance plus the column permutation used.

    A solution ``w'`` of the returned instance maps back to the original
    coordinates as ``w'.unpermute(perm)``; weights are unchanged.
    """
    sf = standard_form(A)
    return CmldInstance(sf.matrix, sf.row_transform @ y, m), sf.column_perm


def reduce_any(A: BitMatrix, y: BitVec, m: int) -> ReducedInstance:
    """Standardise ``A`` if needed, then reduce, recording the permutation."""
    if A.is_standard_form():
        return reduce_cmld(CmldInstance(A, y, m))
    inst, perm = standardize_cmld(A, y, m)
    red = reduce_cmld(inst)
    return ReducedInstance(red.code, red.gamma3, red.z, red.source, perm)


def recover_cmld_answer(red: ReducedInstance, result: DecodeResult) -> tuple[BitVec, int]:
    """``(v_hat + z, |v_hat + z|)`` from a decoder output ``(u_hat|v_hat)``.

    The vector is in the coordinates of ``red.source``; use
    :func:`original_coordinates` to undo a standardising permutation.
    """
    v = result.gamma_hat.x + red.z
    if red.source.A @ v != red.source.y:
        raise InconsistentResult(f"A(v_hat + z) != y for v_hat + z = {v}")
    return v, v.weight()


def original_coordinates(red: ReducedInstance, v: BitVec) -> BitVec:
    if red.column_perm is None:
        return v
    return v.unpermute(red.column_perm)


def corrupt_instance(red: ReducedInstance, which: str = "beta", index: int = 0, position: int = 0) -> ReducedInstance:
    """Flip one bit (packed position, z bits first) of one basis vector."""
    basis = red.code.basis
    vecs = list(basis.betas if which == "beta" else basis.alphas)
    vecs[index] = SympVec.from_packed(vecs[index].packed ^ (1 << position), red.n)
    if which == "beta":
        bad = basis.replace(betas=vecs)
    elif which == "alpha":
        bad = basis.replace(alphas=vecs)
    else:
        raise ValueError(f"which must be 'alpha' or 'beta', got {which!r}")
    return ReducedInstance(StabilizerCode(bad, validate=False), red.gamma3, red.z, red.source, red.column_perm)


# ---------------------------------------------------------------------------
# identity verification


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    checked: int = 0
    counterexample: str | None = None

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f" counterexample: {self.counterexample}" if self.counterexample else ""
        return f"{status} {self.name} ({self.checked} checked){tail}"


@dataclass
class IdentityReport:
    checks: dict[str, IdentityCheck] = field(default_factory=dict)
    kappa: dict[str, float] = field(default_factory=dict)
    lam: dict[int, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed(self) -> list[IdentityCheck]:
        return [c for c in self.checks.values() if not c.passed]

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.checks.values())


def _sym(v: int, n: int) -> str:
    return str(SympVec.from_packed(v, n))


def _set_check(name: str, got: Sequence[int], want: Sequence[int], n: int) -> IdentityCheck:
    got_set, want_set = set(got), set(want)
    if len(got_set) != len(got):
        return IdentityCheck(name, False, len(got), "enumeration produced duplicates")
    extra = got_set - want_set
    missing = want_set - got_set
    if extra or missing:
        ex = f"unexpected {_sym(min(extra), n)}" if extra else f"missing {_sym(min(missing), n)}"
        return IdentityCheck(name, False, len(got), ex)
    return IdentityCheck(name, True, len(got))


def verify_reduction_identities(
    red: ReducedInstance,
    p: Prob = 0.1,
    exact_p: Fraction = Fraction(1, 4),
    cap: int = DEFAULT_CAP,
) -> IdentityReport:
    """Check the structural identities behind the reduction by enumeration.

    Checks (by name):

    ``canonical_basis``
        the four product relations and independence;
    ``c_perp``
        ``C_perp == {(u|0) : u in rowspace(A)}``;
    ``t_subspace``
        ``T == {(0|b, 0...0)}``;
    ``gamma3``
        ``gamma3 == (0|z)`` and lies in ``T``;
    ``gamma3_plus_L``
        ``gamma3 + L == {(u|v) : u in R, v in z + C1}`` with ``R`` the
        vectors supported on the last ``k`` coordinates and ``C1 = ker A``;
    ``weight_identity``
        ``wt(w + mu) == |v| + wt(mu + (u|0))`` for every ``w = (u|v)`` in
        ``gamma3 + L`` and ``mu`` in ``C_perp``;
    ``factorization`` / ``factorization_exact``
        ``sum_mu Pr(mu + tau) == kappa_u * lambda_v`` at ``p`` in floating point
        (relative ``1e-12``) and exactly at the rational ``exact_p``;
    ``qmld_u_zero``
        the QMLD answer has zero z-part;
    ``lambda_max``
        the DQMLD answer maximises ``lambda_v`` over ``gamma3 + L``;
    ``cmld_agreement``
        QMLD and DQMLD recover the brute-force CMLD minimum weight.
    """
    check_p(p)
    check_p(exact_p)
    code = red.code
    n, k, r = code.n, code.k, code.r
    check_cap(n + k, cap, "identity verification")
    A = red.source.A
    report = IdentityReport()
    zmask = (1 << n) - 1

    def run(name: str, fn: Callable[[], IdentityCheck]) -> None:
        try:
            report.checks[name] = fn()
        except (QmldError, AssertionError) as exc:
            report.checks[name] = IdentityCheck(name, False, 0, f"{type(exc).__name__}: {exc}")

    def canonical() -> IdentityCheck:
        rep = validate_canonical_basis(code.basis)
        first = str(rep.violations[0]) if rep.violations else None
        return IdentityCheck("canonical_basis", rep.ok, 4, first)

    cperp = code.cperp_ints()
    logical_plus_g3 = span_ints([g.packed for g in code.logicals], red.gamma3.packed)
    row_space = span_ints(list(A.rows))
    c1 = span_ints([v.bits for v in kernel_basis(A)])
    R = [c << r for c in range(1 << k)]

    run("canonical_basis", canonical)
    run("c_perp", lambda: _set_check("c_perp", cperp, row_space, n))
    run(
        "t_subspace",
        lambda: _set_check("t_subspace", span_ints([b.packed for b in code.pure_errors]), [b << n for b in range(1 << r)], n),
    )

    def gamma3_check() -> IdentityCheck:
        want = red.z.bits << n
        if red.gamma3.packed != want:
            return IdentityCheck("gamma3", False, 1, f"gamma3 = {red.gamma3}, expected (0|{red.z})")
        if not code.in_T(red.gamma3):
            return IdentityCheck("gamma3", False, 1, "gamma3 not in T")
        return IdentityCheck("gamma3", True, 1)

    run("gamma3", gamma3_check)
    run(
        "gamma3_plus_L",
        lambda: _set_check(
            "gamma3_plus_L", logical_plus_g3, [u | ((red.z.bits ^ c) << n) for u in R for c in c1], n
        ),
    )

    omega = np.array(logical_plus_g3, dtype=object)
    words = max(1, (2 * n + 63) // 64)

    def weight_identity() -> IdentityCheck:
        om = np.stack([pack_words(v, words) for v in logical_plus_g3])
        mu = np.stack([pack_words(v, words) for v in cperp])
        zm = pack_words(zmask, words)
        xm = pack_words(zmask << n, words)
        lhs = np.bitwise_count(om[:, None, :] ^ mu[None, :, :]).sum(axis=2)
        u_part = om & zm
        v_weight = np.bitwise_count(om & xm).sum(axis=1)
        rhs = v_weight[:, None] + np.bitwise_count(u_part[:, None, :] ^ mu[None, :, :]).sum(axis=2)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            i, j = bad[0]
            return IdentityCheck(
                "weight_identity", False, lhs.size,
                f"omega={_sym(int(omega[i]), n)}, mu={_sym(cperp[j], n)}: {lhs[i, j]} != {rhs[i, j]}",
            )
        return IdentityCheck("weight_identity", True, lhs.size)

    run("weight_identity", weight_identity)

    def factorization(prob: Prob, name: str) -> IdentityCheck:
        exact = isinstance(prob, Fraction)
        kappa_cache: dict[int, Prob] = {}
        ratio = prob / (1 - prob)
        for tau in logical_plus_g3:
            u, v = tau & zmask, tau >> n
            lhs = probability_from_histogram(coset_weight_histogram(code, SympVec.from_packed(tau, n), cap), n, prob)
            if u not in kappa_cache:
                kappa_cache[u] = probability_from_histogram(
                    coset_weight_histogram(code, SympVec.from_packed(u, n), cap), n, prob
                )
            rhs = kappa_cache[u] * ratio ** v.bit_count()
            good = lhs == rhs if exact else abs(lhs - rhs) <= FLOAT_RTOL * abs(rhs)
            if not good:
                return IdentityCheck(name, False, len(logical_plus_g3), f"tau={_sym(tau, n)}: {lhs} != {rhs}")
        if not exact:
            for u, val in sorted(kappa_cache.items())[:16]:
                report.kappa[str(BitVec(u, n))] = float(val)
            for w in range(n + 1):
                report.lam[w] = float(ratio**w)
        return IdentityCheck(name, True, len(logical_plus_g3))

    run("factorization", lambda: factorization(float(p), "factorization"))
    run("factorization_exact", lambda: factorization(Fraction(exact_p), "factorization_exact"))
    if isinstance(p, Fraction) and p != exact_p:
        run("factorization_exact_p", lambda: factorization(p, "factorization_exact_p"))

    def qmld_u_zero() -> IdentityCheck:
        res = qmld_exact(code, red.gamma3, cap)
        if res.gamma_hat.z.bits:
            return IdentityCheck("qmld_u_zero", False, 1, f"gamma_hat = {res.gamma_hat}")
        return IdentityCheck("qmld_u_zero", True, 1)

    run("qmld_u_zero", qmld_u_zero)

    def lambda_max() -> IdentityCheck:
        res = dqmld_exact(code, red.gamma3, float(p), cap)
        got = (res.gamma_hat.x + red.z).weight()
        best = min((tau >> n).bit_count() for tau in logical_plus_g3)
        if got != best:
            return IdentityCheck("lambda_max", False, len(logical_plus_g3), f"|v_hat+z| = {got}, min |v| = {best}")
        return IdentityCheck("lambda_max", True, len(logical_plus_g3))

    run("lambda_max", lambda_max)

    def cmld_agreement() -> IdentityCheck:
        want = cmld_exact(red.source, cap).weight
        for res in (qmld_exact(code, red.gamma3, cap), dqmld_exact(code, red.gamma3, float(p), cap)):
            _, got = recover_cmld_answer(red, res)
            if got != want:
                return IdentityCheck("cmld_agreement", False, 2, f"{res.problem} recovered {got}, CMLD min {want}")
        return IdentityCheck("cmld_agreement", True, 2)

    run("cmld_agreement", cmld_agreement)
    return report


def reduction_from_basis(code: StabilizerCode, gamma3: SympVec, m: int = 0) -> ReducedInstance | None:
    """Recognise a basis built by :func:`reduce_cmld` and recover its source instance.

    Returns ``None`` when ``code``/``gamma3`` is not of that shape.
    """
    n, r = code.n, code.r
    rows = tuple(a.z.bits for a in code.basis.alphas[:r])
    A = BitMatrix(rows, n)
    if not A.is_standard_form() or gamma3.z.bits or gamma3.x.bits >> r:
        return None
    try:
        inst = CmldInstance(A, BitVec(gamma3.x.bits, r), m)
        red = reduce_cmld(inst)
    except QmldError:
        return None
    if red.code.basis != code.basis:
        return None
    return red


__all__ = [
    "IdentityCheck",
    "IdentityReport",
    "ReducedInstance",
    "corrupt_instance",
    "original_coordinates",
    "recover_cmld_answer",
    "reduce_any",
    "reduce_cmld",
    "reduction_from_basis",
    "standardize_cmld",
    "verify_reduction_identities",
]
