from functools import lru_cache

import pytest
from hypothesis import settings

from solitonsurf.sigma import build_tower, seed_from_ints
from solitonsurf.surfaces import build_surfaces

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# Seeds of the acceptance suites, as ascending coefficient lists.
SEEDS = {
    "1,xi": ([1], [0, 1]),
    "1,xi,xi2": ([1], [0, 1], [0, 0, 1]),
    "1,xi,xi2+1": ([1], [0, 1], [1, 0, 1]),
    "1,xi,xi2,xi3": ([1], [0, 1], [0, 0, 1], [0, 0, 0, 1]),
}


@lru_cache(maxsize=None)
def tower_for(name):
    return build_tower(seed_from_ints(*SEEDS[name]))


@lru_cache(maxsize=None)
def surfaces_for(name):
    return build_surfaces(tower_for(name))


@pytest.fixture(params=list(SEEDS))
def seed_name(request):
    return request.param
