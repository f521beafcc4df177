"""Monte Carlo and exact logical error rates on the independent X/Z channel.

Every qubit suffers a Z flip and an X flip independently with probability
``p``.  A trial samples ``omega``, decodes its syndrome to a correction
``gamma_hat + gamma3`` and succeeds when the residual
``omega + gamma_hat + gamma3`` lies in the stabilizer ``C_perp``.

Random streams are counter based: trials are grouped in fixed blocks of
``TRIAL_BLOCK`` and block ``b`` draws from ``Philox(key=seed)`` started at
counter ``(0, b, 0, 0)``.  Sample ``i`` is therefore a function of
``(seed, i)`` alone, whatever the chunking or number of workers.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .code import StabilizerCode
from .decoders import dqmld_exact, qmld_exact
from .errors import InvalidP
from .gf2 import DEFAULT_CAP, BitVec
from .symplectic import Prob, SympVec, probability_of_weight

TRIAL_BLOCK = 1024
DECODERS = ("qmld", "dqmld")
CSV_COLUMNS = ["p", "decoder", "trials", "failures", "rate", "stderr", "seed"]


@dataclass(frozen=True)
class ChannelModel:
    p: float
    n: int

    def __post_init__(self) -> None:
        # p = 0 is allowed here: the noiseless channel is a useful limit for sampling
        if not 0 <= self.p < 0.5:
            raise InvalidP(f"p must lie in [0, 1/2), got {self.p}")
        if self.n < 1:
            raise ValueError("n must be positive")


@dataclass(frozen=True)
class TrialRecord:
    omega: SympVec
    syndrome: BitVec
    gamma_hat: SympVec
    success: bool


@dataclass(frozen=True)
class ErrorRate:
    failures: int
    trials: int

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def stderr(self) -> float:
        r = self.rate
        return math.sqrt(r * (1 - r) / self.trials)


def _bits_to_symp(row: np.ndarray, n: int) -> SympVec:
    return SympVec(BitVec.from_iterable(row[:n]), BitVec.from_iterable(row[n:]))


def sample_error(model: ChannelModel, rng: np.random.Generator) -> SympVec:
    """One error with every one of the ``2n`` bits set independently with probability ``p``."""
    return _bits_to_symp(rng.random(2 * model.n) < model.p, model.n)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, block, 0, 0]))


def sample_errors(model: ChannelModel, seed: int, start: int, count: int) -> np.ndarray:
    """Boolean array ``(count, 2n)`` (z bits then x bits) for trials ``start..start+count-1``."""
    width = 2 * model.n
    out = np.empty((count, width), dtype=bool)
    filled = 0
    while filled < count:
        t = start + filled
        block, offset = divmod(t, TRIAL_BLOCK)
        take = min(TRIAL_BLOCK - offset, count - filled)
        u = _block_rng(seed, block).random((TRIAL_BLOCK, width))
        out[filled : filled + take] = u[offset : offset + take] < model.p
        filled += take
    return out


def _vec_bits(v: SympVec) -> np.ndarray:
    return np.array(list(v.z) + list(v.x), dtype=np.int64)


class SyndromeDecoder:
    """Caches the correction ``gamma_hat + gamma3`` for each syndrome seen."""

    def __init__(self, code: StabilizerCode, decoder: str, p: float, cap: int = DEFAULT_CAP) -> None:
        if decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}, got {decoder!r}")
        self.code = code
        self.decoder = decoder
        self.p = p
        self.cap = cap
        self._cache: dict[int, tuple[SympVec, SympVec]] = {}

    def decode(self, s: int) -> tuple[SympVec, SympVec]:
        """``(gamma_hat, correction)`` for syndrome index ``s``."""
        if s not in self._cache:
            gamma3 = self.code.gamma3_from_syndrome(BitVec(s, self.code.r))
            if self.decoder == "qmld":
                res = qmld_exact(self.code, gamma3, self.cap)
            else:
                # the noiseless limit has no coset probabilities; any p < 1/2 ranks cosets identically there
                res = dqmld_exact(self.code, gamma3, self.p if self.p > 0 else 0.1, self.cap)
            self._cache[s] = (res.gamma_hat, res.gamma_hat + gamma3)
        return self._cache[s]


def _products(bits: np.ndarray, vecs: Sequence[SympVec], n: int) -> np.ndarray:
    """Symplectic products of every sampled row with every vector in ``vecs``."""
    if not vecs:
        return np.zeros((bits.shape[0], 0), dtype=np.int64)
    # (z|x) . (z'|x') = z.x' + x.z'
    swapped = np.stack([np.concatenate([_vec_bits(v)[n:], _vec_bits(v)[:n]]) for v in vecs], axis=1)
    return (bits.astype(np.int64) @ swapped) & 1


def _count_failures(code: StabilizerCode, dec: SyndromeDecoder, bits: np.ndarray) -> int:
    n = code.n
    synd = _products(bits, code.stabilizers, n)
    idx = synd @ (1 << np.arange(code.r, dtype=np.int64))
    corrections = {}
    for s in np.unique(idx):
        corrections[int(s)] = _vec_bits(dec.decode(int(s))[1])
    corr = np.stack([corrections[int(s)] for s in idx]) if len(idx) else np.zeros_like(bits, dtype=np.int64)
    residual = bits.astype(np.int64) ^ corr
    logical_parts = code.basis.alphas[code.r :] + code.basis.betas[code.r :]
    return int(np.count_nonzero(_products(residual, logical_parts, n).any(axis=1)))


def _failures_in_range(args: tuple) -> int:
    code, decoder, p, seed, start, count, cap = args
    dec = SyndromeDecoder(code, decoder, p, cap)
    model = ChannelModel(p, code.n)
    failures = 0
    for s in range(start, start + count, TRIAL_BLOCK):
        c = min(TRIAL_BLOCK, start + count - s)
        failures += _count_failures(code, dec, sample_errors(model, seed, s, c))
    return failures


def logical_error_rate(
    code: StabilizerCode,
    decoder: str,
    p: float,
    trials: int,
    seed: int,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> ErrorRate:
    """Monte Carlo failure rate; identical for any ``workers`` given the seed."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if decoder not in DECODERS:
        raise ValueError(f"decoder must be one of {DECODERS}, got {decoder!r}")
    ChannelModel(p, code.n)
    if workers <= 1:
        return ErrorRate(_failures_in_range((code, decoder, p, seed, 0, trials, cap)), trials)
    nblocks = -(-trials // TRIAL_BLOCK)
    per = -(-nblocks // workers) * TRIAL_BLOCK
    jobs = [(code, decoder, p, seed, s, min(per, trials - s), cap) for s in range(0, trials, per)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        failures = sum(pool.map(_failures_in_range, jobs))
    return ErrorRate(failures, trials)


def simulate_trials(
    code: StabilizerCode, decoder: str, p: float, trials: int, seed: int, cap: int = DEFAULT_CAP
) -> Iterator[TrialRecord]:
    """Per-trial records on the same random stream as :func:`logical_error_rate`.

    Success is decided by a span-membership test, independently of the
    vectorised path.
    """
    model = ChannelModel(p, code.n)
    dec = SyndromeDecoder(code, decoder, p, cap)
    for s in range(0, trials, TRIAL_BLOCK):
        bits = sample_errors(model, seed, s, min(TRIAL_BLOCK, trials - s))
        for row in bits:
            omega = _bits_to_symp(row, code.n)
            syn = code.syndrome(omega)
            gamma_hat, corr = dec.decode(syn.bits)
            yield TrialRecord(omega, syn, gamma_hat, code.in_cperp(omega + corr))


def exact_failure_probability(
    code: StabilizerCode, decoder: str, p: Prob, decode_p: float | None = None, cap: int = DEFAULT_CAP
) -> Prob:
    """Sum of ``Pr(omega)`` over every error the decoder fails on (all ``4**n`` errors).

    Exact when ``p`` is a Fraction.  ``decode_p`` is the channel parameter
    handed to DQMLD (defaults to ``p``).
    """
    n = code.n
    if n > 10:
        raise ValueError("exhaustive failure probability limited to n <= 10")
    dec = SyndromeDecoder(code, decoder, float(decode_p if decode_p is not None else p), cap)
    stabilizer = set(code.cperp_ints())
    stabs = [a.packed for a in code.stabilizers]
    mask = (1 << n) - 1
    by_weight = [0] * (2 * n + 1)
    for omega in range(1 << (2 * n)):
        swapped = (omega >> n) | ((omega & mask) << n)
        s = 0
        for i, a in enumerate(stabs):
            if (a & swapped).bit_count() & 1:
                s |= 1 << i
        corr = dec.decode(s)[1].packed
        if (omega ^ corr) not in stabilizer:
            by_weight[omega.bit_count()] += 1
    terms = [c * probability_of_weight(w, n, p) for w, c in enumerate(by_weight) if c]
    if isinstance(p, Fraction):
        return sum(terms, Fraction(0))
    return math.fsum(terms)


def sweep(
    code: StabilizerCode,
    p_values: Iterable[float],
    trials: int,
    seed: int,
    decoders: Sequence[str] = DECODERS,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> list[dict]:
    rows = []
    for p in p_values:
        for d in decoders:
            r = logical_error_rate(code, d, p, trials, seed, cap, workers)
            rows.append(
                {
                    "p": p,
                    "decoder": d,
                    "trials": trials,
                    "failures": r.failures,
                    "rate": r.rate,
                    "stderr": r.stderr,
                    "seed": seed,
                }
            )
    return rows


def write_csv(rows: Iterable[dict], fh: IO[str], prefix: dict | None = None) -> None:
    prefix = prefix or {}
    writer = csv.DictWriter(fh, fieldnames=list(prefix) + CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**prefix, **row})
