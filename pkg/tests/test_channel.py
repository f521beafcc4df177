import io
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from oracles import pr, span_set, symp
from qmld.channel import (
    CSV_COLUMNS,
    ChannelModel,
    ErrorRate,
    exact_failure_probability,
    logical_error_rate,
    sample_error,
    sample_errors,
    simulate_trials,
    sweep,
    write_csv,
)
from qmld.code import StabilizerCode
from qmld.decoders import dqmld_exact, find_degeneracy_witness, qmld_exact
from qmld.errors import InvalidP
from qmld.gf2 import BitVec
from qmld.symplectic import random_canonical_basis


def random_code(n, k, seed):
    return StabilizerCode(random_canonical_basis(n, k, random.Random(seed)))


def oracle_failure(code, decoder, p):
    """Exhaustive failure probability with syndromes and membership from scratch."""
    n = code.n
    stabs = [a.packed for a in code.stabilizers]
    cperp = span_set(stabs)
    total = Fraction(0)
    corrections = {}
    for omega in range(1 << (2 * n)):
        s = sum(symp(a, omega, n) << i for i, a in enumerate(stabs))
        if s not in corrections:
            g3 = code.gamma3_from_syndrome(BitVec(s, code.r))
            res = qmld_exact(code, g3) if decoder == "qmld" else dqmld_exact(code, g3, float(p))
            corrections[s] = (res.gamma_hat + g3).packed
        if omega ^ corrections[s] not in cperp:
            total += pr(omega, n, p)
    return total


def test_zero_p_samples_are_zero():
    bits = sample_errors(ChannelModel(0.0, 5), seed=3, start=0, count=5000)
    assert not bits.any()
    assert sample_error(ChannelModel(0.0, 3), np.random.default_rng(1)).is_zero()


def test_zero_p_rate_is_zero():
    code = random_code(4, 2, 0)
    for d in ("qmld", "dqmld"):
        assert logical_error_rate(code, d, 0.0, 3000, seed=1).failures == 0


def test_model_rejects_bad_p():
    with pytest.raises(InvalidP):
        ChannelModel(0.5, 2)
    with pytest.raises(InvalidP):
        ChannelModel(-0.01, 2)


def test_single_qubit_y_rate():
    p = 0.1
    trials = 10**6
    bits = sample_errors(ChannelModel(p, 1), seed=2024, start=0, count=trials)
    y = np.count_nonzero(bits[:, 0] & bits[:, 1]) / trials
    sigma = math.sqrt(p * p * (1 - p * p) / trials)
    assert abs(y - p * p) <= 3 * sigma
    marg = bits.mean(axis=0)
    assert np.all(np.abs(marg - p) <= 3 * math.sqrt(p * (1 - p) / trials))


def test_samples_independent_of_chunking():
    model = ChannelModel(0.1, 4)
    whole = sample_errors(model, 7, 0, 5000)
    parts = np.concatenate([sample_errors(model, 7, s, c) for s, c in [(0, 1), (1, 1500), (1501, 3499)]])
    assert whole.tobytes() == parts.tobytes()
    assert whole.tobytes() == sample_errors(model, 7, 0, 5000).tobytes()
    assert whole.tobytes() != sample_errors(model, 8, 0, 5000).tobytes()


def test_rate_independent_of_workers():
    code = random_code(4, 2, 1)
    one = logical_error_rate(code, "qmld", 0.1, 5000, seed=11)
    two = logical_error_rate(code, "qmld", 0.1, 5000, seed=11, workers=2)
    assert one == two


def test_error_rate_stats():
    r = ErrorRate(25, 100)
    assert r.rate == 0.25
    assert r.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 100))


@pytest.mark.parametrize("seed", range(3))
def test_exact_failure_matches_oracle(seed):
    code = random_code(3, 1 + seed % 2, seed)
    for d in ("qmld", "dqmld"):
        got = exact_failure_probability(code, d, Fraction(1, 5))
        assert got == oracle_failure(code, d, Fraction(1, 5))


def test_simulate_trials_agrees_with_vectorised():
    code = random_code(4, 2, 5)
    records = list(simulate_trials(code, "dqmld", 0.15, 3000, seed=4))
    fails = sum(not r.success for r in records)
    assert fails == logical_error_rate(code, "dqmld", 0.15, 3000, seed=4).failures
    for r in records[:200]:
        # correction restores the zero syndrome
        assert code.syndrome(r.omega + r.gamma_hat + code.gamma3_from_syndrome(r.syndrome)).weight() == 0


@pytest.mark.parametrize("p", [0.05, 0.2, 0.35])
def test_monte_carlo_matches_exact(p):
    code = random_code(4, 2, 8)
    trials = 40000
    for d in ("qmld", "dqmld"):
        exact = exact_failure_probability(code, d, p)
        mc = logical_error_rate(code, d, p, trials, seed=99)
        sigma = math.sqrt(exact * (1 - exact) / trials)
        assert abs(mc.rate - exact) <= 3 * sigma + 1e-12


def test_dqmld_never_worse_exactly():
    rng = random.Random(123)
    for _ in range(15):
        n = rng.randint(2, 4)
        code = StabilizerCode(random_canonical_basis(n, rng.randint(1, n - 1), rng))
        for p in (Fraction(1, 10), Fraction(3, 10)):
            assert exact_failure_probability(code, "dqmld", p) <= exact_failure_probability(code, "qmld", p)


def test_dqmld_strictly_better_on_witness():
    wit = find_degeneracy_witness(random.Random(1), max_codes=200)
    q = exact_failure_probability(wit.code, "qmld", wit.p)
    d = exact_failure_probability(wit.code, "dqmld", wit.p)
    assert d < q


def test_sweep_and_csv():
    code = random_code(3, 1, 2)
    rows = sweep(code, [0.05, 0.1], trials=500, seed=1)
    assert [(r["p"], r["decoder"]) for r in rows] == [(0.05, "qmld"), (0.05, "dqmld"), (0.1, "qmld"), (0.1, "dqmld")]
    buf = io.StringIO()
    write_csv(rows, buf, prefix={"n": 3, "k": 1})
    lines = buf.getvalue().splitlines()
    assert lines[0].split(",") == ["n", "k"] + CSV_COLUMNS
    assert len(lines) == 5


def test_invalid_trials():
    with pytest.raises(ValueError):
        logical_error_rate(random_code(3, 1, 0), "qmld", 0.1, 0, seed=1)
