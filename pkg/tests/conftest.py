import sys
from pathlib import Path

import numpy as np
import pytest

TESTS_DIR = Path(__file__).parent
REPO_DIR = TESTS_DIR.parent
sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_front(rng, k, lo=0.0, hi=10.0):
    """A random mutually non-dominated 2-D front with k points."""
    f1 = np.sort(rng.uniform(lo, hi, k))
    f2 = np.sort(rng.uniform(lo, hi, k))[::-1]
    # enforce strict monotonicity so the set is strictly non-dominated
    f1 += np.arange(k) * 1e-9
    f2 -= np.arange(k) * 1e-9
    return np.stack([f1, f2], axis=1)
