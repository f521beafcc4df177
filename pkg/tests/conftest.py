import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qmld import BitMatrix, BitVec, CmldInstance  # noqa: E402
from qmld.cli import random_cmld  # noqa: E402
from qmld.reduction import reduce_cmld  # noqa: E402


@pytest.fixture
def worked():
    """n=2, k=1, A=[1 1], y=(1), m=1."""
    return CmldInstance(BitMatrix.from_rows(["11"]), BitVec.from_str("1"), 1)


@pytest.fixture
def worked_reduced(worked):
    return reduce_cmld(worked)


@pytest.fixture
def rng():
    return random.Random(20240601)


def random_instances(count, n_range, seed, k_max=None):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(*n_range)
        hi = n - 1 if k_max is None else min(n - 1, k_max(n))
        k = rng.randint(1, max(1, hi))
        out.append(random_cmld(n, k, rng))
    return out
