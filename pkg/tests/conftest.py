import numpy as np
import pytest
from hypothesis import settings

from comspect.cutoffs import make_cutoff_pair

settings.register_profile("ci", max_examples=60, derandomize=True, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def pair():
    return make_cutoff_pair()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
