import pytest

from fanoforge import abelian, intmat
from fanoforge.census import minimal_representative
from fanoforge.degmat import (
    DegreeMatrix,
    TorsionRow,
    degree_data_from_generator_matrix,
    from_weights,
    is_almost_free,
    simplex,
    validate_weight_vector,
)
from fanoforge.errors import ValidationError

WORKED_EXAMPLE = DegreeMatrix((1, 1, 1), (TorsionRow(3, (0, 1, 2)),))


def test_validate_weight_vector():
    assert validate_weight_vector((1, 1, 1, 1, 1))
    assert not validate_weight_vector((1, 2, 2))  # pair gcd 2 after deletion
    assert validate_weight_vector((1, 2, 3))
    assert not validate_weight_vector((2, 1, 3))  # unsorted
    assert not validate_weight_vector((0, 1, 1))
    assert not validate_weight_vector((2, 2, 2))


def test_almost_free_cases():
    assert is_almost_free(from_weights((1, 1, 1)))
    assert is_almost_free(WORKED_EXAMPLE)
    assert not is_almost_free(from_weights((1, 2, 2)))
    # duplicated torsion column blocks generation after deleting another one
    bad = DegreeMatrix((1, 1, 1), (TorsionRow(2, (0, 1, 1)),))
    assert not is_almost_free(bad)


def test_degree_matrix_validation():
    with pytest.raises(ValidationError):
        DegreeMatrix((1, 1), (TorsionRow(2, (0, 1)),))  # s > n - 1
    with pytest.raises(ValidationError):
        DegreeMatrix((1, 1, 1), (TorsionRow(2, (0, 1, 1)),
                                 TorsionRow(4, (0, 1, 2, 3))))
    with pytest.raises(ValidationError):
        TorsionRow(3, (0, 3, 1))  # lift out of range


def test_simplex_projective_plane():
    P = simplex(from_weights((1, 1, 1)))
    assert len(P) == 2 and len(P[0]) == 3
    assert all(sum(row) == 0 for row in P)
    minors = [intmat.det([[P[0][a], P[0][b]], [P[1][a], P[1][b]]])
              for a, b in [(0, 1), (0, 2), (1, 2)]]
    assert all(abs(m) == 1 for m in minors)


def test_simplex_worked_example_matches_normal_form():
    P = simplex(WORKED_EXAMPLE)
    # GL(2,Z)-equivalent to the reference matrix; the Hermite normalization
    # reproduces it on the nose
    assert P == [[1, 1, -2], [0, 3, -3]]


def test_simplex_weighted():
    Q = from_weights((1, 1, 2))
    P = simplex(Q)
    w = (1, 1, 2)
    for row in P:
        assert sum(wi * x for wi, x in zip(w, row)) == 0
    assert simplex(Q) == P  # deterministic


def test_simplex_bitwise_deterministic_across_equal_inputs():
    Q1 = DegreeMatrix((1, 1, 1), (TorsionRow(3, (0, 1, 2)),))
    Q2 = DegreeMatrix((1, 1, 1), (TorsionRow(3, (0, 1, 2)),))
    assert simplex(Q1) == simplex(Q2)


@pytest.mark.parametrize("Q", [
    from_weights((1, 1, 1)),
    from_weights((1, 1, 2)),
    from_weights((1, 2, 3)),
    WORKED_EXAMPLE,
    DegreeMatrix((1, 1, 2), (TorsionRow(2, (0, 1, 1)),)),
    from_weights((1, 1, 1, 1, 4)),
    DegreeMatrix((1, 1, 1, 1), (TorsionRow(2, (0, 0, 1, 1)),
                                TorsionRow(2, (0, 1, 0, 1)))),
])
def test_roundtrip_through_generator_matrix(Q):
    P = simplex(Q)
    back = degree_data_from_generator_matrix(P)
    assert back.weights == Q.weights
    assert back.group.factors == Q.group.factors
    assert minimal_representative(back) == minimal_representative(Q)


def test_dropping_torsion_row_keeps_almost_freeness():
    Q = DegreeMatrix((1, 1, 1, 1), (TorsionRow(2, (0, 0, 1, 1)),
                                    TorsionRow(2, (0, 1, 0, 1))))
    assert is_almost_free(Q)
    assert is_almost_free(Q.drop_last_row())
    assert is_almost_free(Q.drop_last_row().drop_last_row())


def test_rejects_bad_reconstruction_input():
    with pytest.raises(ValidationError):
        # rank-two class group: the square's generator matrix
        degree_data_from_generator_matrix([[1, 0, -1, 0], [0, 1, 0, -1]])
