import random

import pytest
from hypothesis import settings, strategies as st

from rotsynth.angle import PI, ZERO, Angle
from rotsynth.rbdd import Manager, all_assignments

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ANGLES = [ZERO, Angle(1, 4), Angle(-1, 4), Angle(1, 2), Angle(-1, 2), PI]
NAMES = ["a", "b", "c", "d"]


def bool_fn(fn):
    """Wrap a 0/1-valued bit function as an angle-valued one."""
    return lambda bits: PI if fn(bits) else ZERO


def random_table(rng: random.Random, n: int, boolean: bool):
    pool = [ZERO, PI] if boolean else ANGLES
    return {bits: rng.choice(pool) for bits in all_assignments(n)}


def random_cases(count=200, seed=1234):
    """(names, table) pairs: half Boolean, half general, on 1..4 variables."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(1, 4)
        out.append((NAMES[:n], random_table(rng, n, boolean=(k % 2 == 0))))
    return out


angles = st.builds(Angle, st.integers(-64, 64), st.sampled_from([1, 2, 4, 8, 16, 3, 5]))


@st.composite
def tables(draw, boolean=False, max_vars=4):
    n = draw(st.integers(1, max_vars))
    pool = [ZERO, PI] if boolean else ANGLES
    vals = draw(st.lists(st.sampled_from(pool), min_size=1 << n, max_size=1 << n))
    return NAMES[:n], dict(zip(all_assignments(n), vals))


@pytest.fixture
def mgr3():
    return Manager(["a", "b", "c"])
