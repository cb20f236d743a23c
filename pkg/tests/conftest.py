import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dradapt.data import Dataset


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240817))


@pytest.fixture
def small_dataset(rng):
    return Dataset(points=rng.standard_normal((40, 6)), name="blob40")


def make_dataset(rng, n, d, name="ds"):
    return Dataset(points=rng.standard_normal((n, d)), name=name)
