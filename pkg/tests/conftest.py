import random

import pytest


def random_unimodular(n, rng, steps=12, bound=2):
    """Product of elementary integer row operations; determinant +-1."""
    M = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        kind = rng.randrange(3)
        i = rng.randrange(n)
        j = rng.randrange(n)
        if kind == 0 and i != j:
            q = rng.randint(-bound, bound)
            for k in range(n):
                M[i][k] += q * M[j][k]
        elif kind == 1 and i != j:
            M[i], M[j] = M[j], M[i]
        elif kind == 2:
            M[i] = [-x for x in M[i]]
    return M


@pytest.fixture
def rng():
    return random.Random(20260810)
