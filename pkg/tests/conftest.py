import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=30)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, grid):
    from nonlocalqm.grid import WaveFunction
    amp = rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points)
    return WaveFunction(grid, amp).normalized()
