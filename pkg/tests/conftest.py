import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
