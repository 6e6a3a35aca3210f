import itertools

import pytest

from fanoforge import abelian, intmat
from fanoforge.errors import ResourceCapError, ValidationError


def brute_force_automorphism_count(factors):
    """Independent count: all lift matrices that act bijectively."""
    group = abelian.TorsionGroup(factors)
    elements = list(group.elements())
    count = 0
    s = len(factors)
    for picks in itertools.product(*[range(factors[i])
                                     for i in range(s) for _ in range(s)]):
        A = [list(picks[i * s:(i + 1) * s]) for i in range(s)]
        # must be well defined: A maps the order-mu_j generator to an
        # element killed by mu_j
        ok = True
        for j in range(s):
            for i in range(s):
                if A[i][j] * factors[j] % factors[i]:
                    ok = False
        if not ok:
            continue
        images = {tuple(sum(A[i][j] * e.lifts[j] for j in range(s)) % factors[i]
                        for i in range(s)) for e in elements}
        if len(images) == len(elements):
            count += 1
    return count


def test_cyclic3():
    auts = abelian.automorphisms(abelian.TorsionGroup((3,)))
    assert len(auts) == 2
    assert auts[0] == [[1]]


@pytest.mark.parametrize("factors,expected", [((2, 2), 6), ((4, 2), 8)])
def test_small_groups(factors, expected):
    auts = abelian.automorphisms(abelian.TorsionGroup(factors))
    assert len(auts) == expected


@pytest.mark.parametrize("factors", [(2,), (3,), (4,), (6,), (9,),
                                     (2, 2), (4, 2), (6, 2), (6, 3),
                                     (8, 2), (9, 3), (12, 2), (4, 4),
                                     (4, 2, 2), (8, 4, 2)])
def test_counts_match_brute_force(factors):
    group = abelian.TorsionGroup(factors)
    assert group.order <= 200
    assert len(abelian.automorphisms(group)) == \
        brute_force_automorphism_count(factors)


def test_automorphisms_unique_and_identity_first():
    group = abelian.TorsionGroup((4, 2))
    auts = abelian.automorphisms(group)
    assert auts[0] == intmat.identity(2)
    seen = set()
    for A in auts:
        img = tuple(tuple(abelian.apply_automorphism(A, e).lifts)
                    for e in group.elements())
        assert img not in seen
        seen.add(img)


def test_order_cap():
    with pytest.raises(ResourceCapError):
        abelian.automorphisms(abelian.TorsionGroup((101, 101)), order_cap=100)


def test_group_validation():
    with pytest.raises(ValidationError):
        abelian.TorsionGroup((2, 4))  # chain must descend
    with pytest.raises(ValidationError):
        abelian.TorsionGroup((3, 1))


def test_cokernel_worked_example():
    # Z^3 / im(P^T) for the order-3 quotient surface: Z x Z/3
    coker = abelian.cokernel([[1, 0], [1, 3], [-2, -3]])
    assert coker.free_rank == 1
    assert coker.group.factors == (3,)


def test_cokernel_trivial_cases():
    coker = abelian.cokernel(intmat.identity(3))
    assert coker.free_rank == 0
    assert coker.group.is_trivial()
    coker = abelian.cokernel([[0]])
    assert coker.free_rank == 1
    assert coker.group.is_trivial()


def test_cokernel_projection_is_homomorphism():
    M = [[2, 0], [0, 4], [1, 1]]
    coker = abelian.cokernel(M)
    # image columns must project to zero
    for j in range(2):
        col = [M[i][j] for i in range(3)]
        free, tors = coker.project(col)
        assert all(x == 0 for x in free)
        assert tors.is_zero()


def test_lattice_kernel_basis_projective_plane():
    group = abelian.TRIVIAL_GROUP
    cols = [(1, group.zero())] * 3
    P = abelian.lattice_kernel_basis(cols)
    assert len(P) == 2 and len(P[0]) == 3
    # weighted column relation and unimodular 2x2 minors
    assert all(sum(row) == 0 for row in P)
    minors = [intmat.det([[P[0][a], P[0][b]], [P[1][a], P[1][b]]])
              for a, b in [(0, 1), (0, 2), (1, 2)]]
    assert all(abs(m) == 1 for m in minors)


def test_lattice_kernel_basis_torsion_example():
    group = abelian.TorsionGroup((3,))
    cols = [(1, group.element((e,))) for e in (0, 1, 2)]
    P = abelian.lattice_kernel_basis(cols)
    coker = abelian.cokernel(intmat.transpose(P))
    assert coker.free_rank == 1
    assert coker.group.factors == (3,)
    assert all(sum(row) == 0 for row in P)


def test_lattice_kernel_basis_weighted():
    group = abelian.TRIVIAL_GROUP
    cols = [(1, group.zero()), (1, group.zero()), (2, group.zero())]
    P = abelian.lattice_kernel_basis(cols)
    weights = (1, 1, 2)
    for row in P:
        assert sum(w * x for w, x in zip(weights, row)) == 0


def test_lattice_kernel_rejects_non_almost_free():
    group = abelian.TorsionGroup((2,))
    # two identical columns cannot present a rank-one quotient with Z/2
    cols = [(1, group.element((1,))), (1, group.element((1,))),
            (2, group.element((0,)))]
    with pytest.raises(ValidationError):
        abelian.lattice_kernel_basis(cols)
