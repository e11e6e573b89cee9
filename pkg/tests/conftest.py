import random

import pytest
from hypothesis import settings

from mugl import corpus
from mugl.randgen import random_structure

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def toggle():
    return corpus.load_structure("toggle")


@pytest.fixture
def rng():
    return random.Random(1234)


def structure_from_seed(seed: int):
    r = random.Random(seed)
    return r, random_structure(r)
