import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from matchprobe import Instance, PreferenceProfile, Realization  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def instances(draw, min_n: int = 1, max_n: int = 5) -> Instance:
    n = draw(st.integers(min_n, max_n))
    perm = st.permutations(list(range(n))).map(tuple)
    a_rows = tuple(draw(perm) for _ in range(n))
    b_rows = tuple(draw(perm) for _ in range(n))
    return Instance(PreferenceProfile(a_rows), Realization(b_rows), None, f"hyp-n{n}")


@pytest.fixture
def rng():
    return random.Random(20240611)
