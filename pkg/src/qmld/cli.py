"""Command-line interface: ``qmld {gen,decode,reduce,verify,simulate,bench}``.

Exit codes: 0 success, 2 usage or parse error, 3 enumeration cap exceeded,
4 invalid ``p``, 5 verification failure.
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import channel
from .code import StabilizerCode
from .decoders import CmldInstance, cmld_exact, dqmld_exact, qmld_exact
from .errors import InvalidP, QmldError, TooLarge
from .gf2 import DEFAULT_CAP, BitMatrix, BitVec
from .instance_io import CmldFile, QecFile, format_instance, read_instance
from .reduction import (
    ReducedInstance,
    reduce_any,
    reduce_cmld,
    reduction_from_basis,
    standardize_cmld,
    verify_reduction_identities,
)
from .symplectic import check_p, to_pauli_string, validate_canonical_basis

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_P, EXIT_VERIFY = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def parse_p(text: str) -> Fraction:
    """Exact value of a decimal (``0.1``) or rational (``1/4``) string."""
    try:
        p = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse p from {text!r}") from None
    check_p(p)
    return p


def random_cmld(n: int, k: int, rng: random.Random) -> CmldInstance:
    if not 1 <= k < n:
        raise UsageError(f"need 1 <= k < n, got n={n}, k={k}")
    r = n - k
    P = BitMatrix(tuple(rng.getrandbits(k) for _ in range(r)), k)
    return CmldInstance.from_P(P, BitVec(rng.getrandbits(r), r), rng.randint(0, n))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args: argparse.Namespace) -> int:
    inst = random_cmld(args.n, args.k, random.Random(args.seed))
    comment = [f"generated: kind={args.kind} n={args.n} k={args.k} seed={args.seed}"]
    if args.kind == "cmld":
        body = format_instance(CmldFile(inst.A, inst.y, inst.m), comment)
    else:
        red = reduce_cmld(inst)
        body = format_instance(QecFile(red.code.basis, red.gamma3), comment)
    _emit(body, args.out)
    return EXIT_OK


def _load_code(path: str) -> tuple[StabilizerCode, QecFile]:
    inst = read_instance(path)
    if not isinstance(inst, QecFile):
        raise UsageError(f"{path}: expected a qec instance")
    return StabilizerCode(inst.basis), inst


def cmd_decode(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    if args.problem == "cmld":
        inst = read_instance(args.instance)
        if not isinstance(inst, CmldFile):
            raise UsageError(f"{args.instance}: expected a cmld instance")
        std, perm = standardize_cmld(inst.A, inst.y, inst.m)
        sol = cmld_exact(std, args.cap)
        w = sol.w.unpermute(perm)
        lines = [
            "problem: cmld",
            f"w: {w}",
            f"objective: {sol.weight}",
            f"ties: {sol.ties}",
            f"decision: {'yes' if sol.weight <= inst.m else 'no'} (m={inst.m})",
        ]
    else:
        if args.problem == "dqmld":
            if args.p is None:
                raise UsageError("--p is required for dqmld")
            p = parse_p(args.p)
        code, inst = _load_code(args.instance)
        if args.problem == "qmld":
            res = qmld_exact(code, inst.gamma3, args.cap)
        else:
            res = dqmld_exact(code, inst.gamma3, float(p), args.cap)
        lines = [
            f"problem: {args.problem}",
            f"gamma_hat: {res.gamma_hat.to_bitstring()}",
            f"pauli: {to_pauli_string(res.gamma_hat)}",
            f"objective: {res.objective}",
            f"ties: {res.ties}",
        ]
    lines.append(f"wall_time_s: {time.perf_counter() - t0:.6f}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    if not isinstance(inst, CmldFile):
        raise UsageError(f"{args.instance}: expected a cmld instance")
    red = reduce_any(inst.A, inst.y, inst.m)
    comments = [f"reduction of {args.instance} (m={inst.m})"]
    if red.column_perm is not None:
        comments.append("column_perm " + " ".join(str(c) for c in red.column_perm))
    _emit(format_instance(QecFile(red.code.basis, red.gamma3), comments), args.out)
    return EXIT_OK


def _print_report(red: ReducedInstance, p: Fraction, cap: int) -> int:
    report = verify_reduction_identities(red, p, cap=cap)
    print(report)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_verify(args: argparse.Namespace) -> int:
    p = parse_p(args.p) if args.p is not None else Fraction(1, 10)
    inst = read_instance(args.instance)
    if isinstance(inst, CmldFile):
        return _print_report(reduce_any(inst.A, inst.y, inst.m), p, args.cap)
    rep = validate_canonical_basis(inst.basis)
    if not rep.ok:
        for v in rep.violations:
            print(f"FAIL {v}")
        return EXIT_VERIFY
    print("PASS canonical_basis")
    code = StabilizerCode(inst.basis)
    if not code.in_T(inst.gamma3):
        print("FAIL gamma3 not in T")
        return EXIT_VERIFY
    print("PASS gamma3_in_T")
    red = reduction_from_basis(code, inst.gamma3)
    if red is None:
        print("basis is not a reduction instance; identity checks skipped")
        return EXIT_OK
    return _print_report(red, p, args.cap)


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    p_values = [parse_p(s) for s in args.p]
    inst = read_instance(args.instance)
    if isinstance(inst, CmldFile):
        code = reduce_any(inst.A, inst.y, inst.m).code
    else:
        code = StabilizerCode(inst.basis)
    decoders = channel.DECODERS if args.decoder == "both" else (args.decoder,)
    rows = channel.sweep(code, [float(p) for p in p_values], args.trials, args.seed, decoders, args.cap, args.workers)
    for row, p in zip(rows, [p for p in p_values for _ in decoders]):
        row["p"] = str(p) if p.denominator != 1 else str(p.numerator)
    if args.out:
        with open(args.out, "w") as fh:
            channel.write_csv(rows, fh, {"n": code.n, "k": code.k})
    else:
        channel.write_csv(rows, sys.stdout, {"n": code.n, "k": code.k})
    return EXIT_OK


def bench_construction(sizes: Sequence[int], repeats: int, seed: int) -> list[tuple[int, int, float]]:
    """Median wall time of :func:`reduce_cmld` for ``k = n // 2`` at each size."""
    rng = random.Random(seed)
    out = []
    for n in sizes:
        inst = random_cmld(n, n // 2, rng)
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            reduce_cmld(inst)
            times.append(time.perf_counter() - t0)
        out.append((n, n // 2, statistics.median(times)))
    return out


def cmd_bench(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    rows = ["n,k,construct_s,validate_s,solve_k,qmld_s"]
    for n, k, construct in bench_construction(args.sizes, args.repeats, args.seed):
        red = reduce_cmld(random_cmld(n, k, rng))
        t0 = time.perf_counter()
        validate_canonical_basis(red.code.basis)
        validate = time.perf_counter() - t0
        ks = min(args.solve_k, n - 1)
        small = reduce_cmld(random_cmld(n, ks, rng))
        t0 = time.perf_counter()
        qmld_exact(small.code, small.gamma3, args.cap)
        solve = time.perf_counter() - t0
        rows.append(f"{n},{k},{construct:.6g},{validate:.6g},{ks},{solve:.6g}")
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmld", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_cap(p: argparse.ArgumentParser) -> None:
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap as a power of two")

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("kind", choices=["cmld", "qec"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("decode", help="solve QMLD, DQMLD or CMLD exactly")
    d.add_argument("instance")
    d.add_argument("--problem", choices=["qmld", "dqmld", "cmld"], required=True)
    d.add_argument("--p")
    add_cap(d)
    d.set_defaults(func=cmd_decode)

    r = sub.add_parser("reduce", help="reduce a CMLD instance to a QEC instance")
    r.add_argument("instance")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="check canonical relations and reduction identities")
    v.add_argument("instance")
    v.add_argument("--p")
    add_cap(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="Monte Carlo logical error rates, CSV output")
    s.add_argument("instance")
    s.add_argument("--p", nargs="+", required=True)
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--decoder", choices=["qmld", "dqmld", "both"], default="both")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    add_cap(s)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="time reduction construction and QMLD solving")
    b.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--solve-k", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    add_cap(b)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InvalidP as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_P
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, QmldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
