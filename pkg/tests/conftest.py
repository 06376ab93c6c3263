import itertools
import random
from fractions import Fraction as Q

from hypothesis import settings, strategies as st

from doubling.finite import FiniteSpace
from doubling.realline import IntervalSet
from doubling.symbolic import CylinderSet

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


# -- hypothesis strategies ------------------------------------------------------

quarter = st.integers(-24, 24).map(lambda k: Q(k, 4))


@st.composite
def interval_sets(draw, max_components=3):
    n = draw(st.integers(1, max_components))
    pairs = []
    for _ in range(n):
        a = draw(quarter)
        length = draw(st.integers(1, 12).map(lambda k: Q(k, 4)))
        pairs.append((a, a + length))
    return IntervalSet(pairs)


@st.composite
def cylinder_sets(draw, k=2, max_depth=4, max_words=3):
    words = draw(
        st.lists(
            st.lists(st.integers(0, k - 1), min_size=0, max_size=max_depth).map(tuple),
            min_size=1,
            max_size=max_words,
        )
    )
    return CylinderSet(k, words)


# -- seeded generators for sweeps -----------------------------------------------


def random_interval_set(rng: random.Random, max_components=3, span=24) -> IntervalSet:
    pairs = []
    for _ in range(rng.randint(1, max_components)):
        a = Q(rng.randint(-span, span), 4)
        pairs.append((a, a + Q(rng.randint(1, 12), 4)))
    return IntervalSet(pairs)


def random_cylinder_set(rng: random.Random, k=2, max_depth=4, max_words=3) -> CylinderSet:
    words = [
        tuple(rng.randrange(k) for _ in range(rng.randint(0 if rng.random() < 0.05 else 1, max_depth)))
        for _ in range(rng.randint(1, max_words))
    ]
    return CylinderSet(k, words)


def random_space(rng: random.Random, n: int, menu=(1, 2, 3)) -> FiniteSpace:
    """Rejection-sample a triangle-valid matrix over a distance menu."""
    while True:
        D = [[Q(0)] * n for _ in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            D[i][j] = D[j][i] = Q(rng.choice(menu))
        if all(D[i][k] <= D[i][j] + D[j][k] for i, j, k in itertools.product(range(n), repeat=3)):
            return FiniteSpace(D)


def all_spaces(max_points: int, menu=(1, 2, 3)):
    """Every triangle-valid distance matrix on up to ``max_points`` points over ``menu``."""
    for n in range(1, max_points + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for vals in itertools.product(menu, repeat=len(pairs)):
            D = [[0] * n for _ in range(n)]
            for (i, j), v in zip(pairs, vals):
                D[i][j] = D[j][i] = v
            if all(D[i][k] <= D[i][j] + D[j][k] for i, j, k in itertools.product(range(n), repeat=3)):
                yield FiniteSpace(D)
