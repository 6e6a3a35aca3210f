import random

import pytest
import sympy

from fanoforge import intmat


def assert_snf_contract(M):
    U, D, V = intmat.smith_decomposition(M)
    assert intmat.matmul(intmat.matmul(U, M), V) == D
    assert abs(intmat.det(U)) == 1
    assert abs(intmat.det(V)) == 1
    d = intmat.diagonal(D)
    for a, b in zip(d, d[1:]):
        if b != 0:
            assert a != 0 and b % a == 0
        # zeros only at the tail
        if a == 0:
            assert b == 0
    return d


def test_snf_identity():
    d = assert_snf_contract(intmat.identity(2))
    assert d == [1, 1]


def test_snf_diag_2_3():
    # hand elimination: gcd moves give diag(1, 6)
    d = assert_snf_contract([[2, 0], [0, 3]])
    assert d == [1, 6]


def test_snf_worked_surface_example():
    # transposed generator matrix of the order-3 quotient of the plane;
    # cokernel must read off as Z x Z/3
    Pt = [[1, 0], [1, 3], [-2, -3]]
    d = assert_snf_contract(Pt)
    assert d == [1, 3]


@pytest.mark.parametrize("shape", [(2, 2), (3, 3), (3, 5), (5, 3), (4, 4)])
def test_snf_random_matches_sympy(shape):
    rng = random.Random(hash(shape) & 0xFFFF)
    for _ in range(25):
        M = [[rng.randint(-9, 9) for _ in range(shape[1])]
             for _ in range(shape[0])]
        d = assert_snf_contract(M)
        expected = sympy.matrices.normalforms.invariant_factors(sympy.Matrix(M))
        got = [x for x in d if x != 0]
        exp = [int(abs(x)) for x in expected if x != 0]
        assert got == exp


def test_hermite_row_form_canonical():
    rng = random.Random(7)
    from conftest import random_unimodular
    for _ in range(20):
        M = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(3)]
        H1, U1 = intmat.hermite_row_form(M)
        assert intmat.matmul(U1, M) == H1
        assert abs(intmat.det(U1)) == 1
        # same row lattice -> same Hermite form
        T = random_unimodular(3, rng)
        H2, _ = intmat.hermite_row_form(intmat.matmul(T, M))
        assert H1 == H2


def test_hermite_pivots_reduced():
    H, _ = intmat.hermite_row_form([[4, 2, 0], [2, 8, 2]])
    pivots = []
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            pivots.append((nz[0], row[nz[0]]))
    for (c, p), row_above in zip(pivots[1:], H):
        assert p > 0
        assert 0 <= row_above[c] < p


def test_right_kernel_basis():
    M = [[1, 1, 1], [0, 2, 4]]
    kern = intmat.right_kernel_basis(M)
    assert len(kern) == 1
    v = kern[0]
    assert any(v)
    assert all(sum(r * x for r, x in zip(row, v)) == 0 for row in M)


def test_det_bareiss():
    assert intmat.det([[2, 0], [0, 3]]) == 6
    assert intmat.det([[0, 1], [1, 0]]) == -1
    rng = random.Random(3)
    for n in (2, 3, 4):
        for _ in range(10):
            M = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
            assert intmat.det(M) == int(sympy.Matrix(M).det())
