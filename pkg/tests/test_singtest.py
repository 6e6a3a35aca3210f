import itertools
import random

import pytest

from fanoforge.degmat import DegreeMatrix, TorsionRow, from_weights, is_almost_free, simplex
from fanoforge.errors import ValidationError
from fanoforge.singtest import (
    SingularityClass,
    classify,
    lattice_point_oracle,
    r_value,
    simplex_lattice_points,
)

WORKED_EXAMPLE = DegreeMatrix((1, 1, 1), (TorsionRow(3, (0, 1, 2)),))


class TestRValue:
    def test_worked_example_column_two(self):
        # c = 0, b = (1) at the third column: values 1 and 2, age exactly one
        assert r_value(WORKED_EXAMPLE, 2, 0, 0, (1,)) == 1
        assert r_value(WORKED_EXAMPLE, 2, 1, 0, (1,)) == 2

    def test_torsion_free_112(self):
        Q = from_weights((1, 1, 2))
        assert r_value(Q, 2, 0, 1, ()) == 1
        assert r_value(Q, 2, 1, 1, ()) == 1

    def test_range_validation(self):
        with pytest.raises(ValidationError):
            r_value(WORKED_EXAMPLE, 2, 0, 1, (0,))  # c >= w_i
        with pytest.raises(ValidationError):
            r_value(WORKED_EXAMPLE, 2, 0, 0, (3,))
        with pytest.raises(ValidationError):
            r_value(WORKED_EXAMPLE, 2, 0, 0, (0,))  # (c, b) = 0
        with pytest.raises(ValidationError):
            r_value(WORKED_EXAMPLE, 2, 2, 0, (1,))

    def test_values_in_range(self):
        Q = DegreeMatrix((1, 1, 2), (TorsionRow(2, (0, 1, 1)),))
        for i, j in itertools.permutations(range(3), 2):
            for c in range(Q.weights[i]):
                for b in range(2):
                    if c == 0 and b == 0:
                        continue
                    v = r_value(Q, i, j, c, (b,))
                    assert 0 <= v < 2 * Q.weights[i]


class TestClassify:
    def test_projective_spaces_terminal(self):
        assert classify(from_weights((1, 1, 1))) is SingularityClass.TERMINAL
        assert classify(from_weights((1, 1, 1, 1, 2))) is SingularityClass.TERMINAL

    def test_worked_example_strictly_canonical(self):
        assert classify(WORKED_EXAMPLE) is SingularityClass.CANONICAL_STRICT

    def test_small_weighted_planes(self):
        assert classify(from_weights((1, 1, 2))) is SingularityClass.CANONICAL_STRICT
        assert classify(from_weights((1, 2, 3))) is SingularityClass.CANONICAL_STRICT

    def test_non_canonical(self):
        assert classify(from_weights((1, 1, 4))) is SingularityClass.NON_CANONICAL

    def test_column_permutation_invariance_of_sums(self):
        # permuting the columns j != i leaves each (i, c, b) sum unchanged
        Q = DegreeMatrix((1, 1, 2), (TorsionRow(2, (0, 1, 1)),))
        i = 2
        for c in range(2):
            for b in range(2):
                if c == 0 and b == 0:
                    continue
                vals = sorted(r_value(Q, i, j, c, (b,)) for j in (0, 1))
                assert vals == sorted(
                    r_value(Q, i, j, c, (b,)) for j in (1, 0))


class TestOracle:
    def test_projective_plane(self):
        assert lattice_point_oracle(simplex(from_weights((1, 1, 1)))) is \
            SingularityClass.TERMINAL

    def test_worked_example(self):
        assert lattice_point_oracle(simplex(WORKED_EXAMPLE)) is \
            SingularityClass.CANONICAL_STRICT

    def test_113_triangle_two_interior_points(self):
        P = [[1, 0, -1], [0, 1, -3]]
        interior, boundary = simplex_lattice_points(P)
        assert interior == [(0, -1), (0, 0)]
        assert lattice_point_oracle(P) is SingularityClass.NON_CANONICAL

    def test_degenerate_rejected(self):
        with pytest.raises(ValidationError):
            lattice_point_oracle([[1, 0, -1], [0, 0, 0]])


def random_degree_matrix(rng, n, torsion=True):
    while True:
        w = tuple(sorted(rng.randint(1, 6) for _ in range(n + 1)))
        from fanoforge.degmat import validate_weight_vector
        if not validate_weight_vector(w):
            continue
        if not torsion or rng.random() < 0.3:
            return from_weights(w)
        mu = rng.choice([2, 2, 3, 3, 4, 5])
        eta = tuple(rng.randrange(mu) for _ in range(n + 1))
        try:
            Q = DegreeMatrix(w, (TorsionRow(mu, eta),))
        except ValidationError:
            continue
        if is_almost_free(Q):
            return Q


@pytest.mark.parametrize("n", [2, 3])
def test_oracle_equivalence_random(n):
    rng = random.Random(100 + n)
    for _ in range(150):
        Q = random_degree_matrix(rng, n)
        assert classify(Q) == lattice_point_oracle(simplex(Q)), Q


def test_partial_row_monotonicity():
    # deleting torsion rows preserves the class or improves it
    cases = [
        DegreeMatrix((1, 1, 1), (TorsionRow(3, (0, 1, 2)),)),
        DegreeMatrix((1, 1, 2), (TorsionRow(2, (0, 1, 1)),)),
        DegreeMatrix((1, 1, 1, 1), (TorsionRow(2, (0, 0, 1, 1)),
                                    TorsionRow(2, (0, 1, 0, 1)))),
        DegreeMatrix((1, 1, 1, 1, 1), (TorsionRow(5, (0, 1, 2, 3, 4)),)),
    ]
    rank = {SingularityClass.NON_CANONICAL: 0,
            SingularityClass.CANONICAL_STRICT: 1,
            SingularityClass.TERMINAL: 2}
    for Q in cases:
        cls = classify(Q)
        sub = Q
        while sub.rows:
            sub = sub.drop_last_row()
            assert rank[classify(sub)] >= rank[cls]
