"""Degree matrices of fake weighted projective spaces.

A degree matrix stacks a sorted positive weight vector with torsion rows
over Z/mu, the moduli forming a divisibility chain mu_s | ... | mu_1.  Its
columns live in Z x Gamma and the matrix is almost free when any n of the
n+1 columns generate the whole group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from . import abelian, intmat
from .errors import ValidationError


def validate_weight_vector(w) -> bool:
    """Positive, sorted, and every n-subset coprime."""
    w = list(w)
    if len(w) < 2 or any(x < 1 for x in w):
        return False
    if any(a > b for a, b in zip(w, w[1:])):
        return False
    return _n_subsets_coprime(w)


def _n_subsets_coprime(w) -> bool:
    # gcd of all-but-one entry, via prefix/suffix gcds
    n1 = len(w)
    pre = [0] * (n1 + 1)
    suf = [0] * (n1 + 1)
    for i in range(n1):
        pre[i + 1] = gcd(pre[i], w[i])
    for i in range(n1 - 1, -1, -1):
        suf[i] = gcd(suf[i + 1], w[i])
    return all(gcd(pre[i], suf[i + 1]) == 1 for i in range(n1))


@dataclass(frozen=True)
class TorsionRow:
    modulus: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 2:
            raise ValidationError("torsion modulus must be >= 2")
        if any(not 0 <= e < self.modulus for e in self.entries):
            raise ValidationError("torsion entries must be canonical lifts")


@dataclass(frozen=True)
class DegreeMatrix:
    """Weight vector plus torsion rows, ordered by non-increasing modulus."""

    weights: tuple[int, ...]
    rows: tuple[TorsionRow, ...] = field(default_factory=tuple)

    def __post_init__(self):
        w = self.weights
        if len(w) < 2 or any(x < 1 for x in w):
            raise ValidationError("weights must be positive, length >= 2")
        if any(a > b for a, b in zip(w, w[1:])):
            raise ValidationError("weights must be sorted non-decreasing")
        moduli = [r.modulus for r in self.rows]
        for a, b in zip(moduli, moduli[1:]):
            if b > a or a % b != 0:
                raise ValidationError("row moduli must form a divisibility chain")
        if len(self.rows) > self.dim - 1:
            raise ValidationError("too many torsion rows for an almost-free matrix")
        for r in self.rows:
            if len(r.entries) != len(w):
                raise ValidationError("torsion row length mismatch")

    @property
    def dim(self) -> int:
        return len(self.weights) - 1

    @property
    def group(self) -> abelian.TorsionGroup:
        return abelian.TorsionGroup(tuple(r.modulus for r in self.rows))

    def column(self, i: int) -> tuple[int, abelian.TorsionElement]:
        return self.weights[i], self.group.element(r.entries[i] for r in self.rows)

    def columns(self):
        return [self.column(i) for i in range(len(self.weights))]

    def stack(self, modulus: int, entries) -> "DegreeMatrix":
        return DegreeMatrix(self.weights,
                            self.rows + (TorsionRow(modulus, tuple(entries)),))

    def drop_last_row(self) -> "DegreeMatrix":
        return DegreeMatrix(self.weights, self.rows[:-1])

    def signature(self):
        return tuple((r.modulus, r.entries) for r in self.rows)


def from_weights(w) -> DegreeMatrix:
    return DegreeMatrix(tuple(w))


def is_almost_free(Q: DegreeMatrix) -> bool:
    """Do any n of the n+1 columns generate Z x Gamma?"""
    w = Q.weights
    s = len(Q.rows)
    if not _n_subsets_coprime(list(w)):
        return False
    if s == 0:
        return True
    moduli = [r.modulus for r in Q.rows]
    for drop in range(len(w)):
        keep = [j for j in range(len(w)) if j != drop]
        # present (Z x Gamma) / <kept columns>: trivial iff generating
        pres = [[w[j] for j in keep] + [0] * s]
        for l in range(s):
            pres.append([Q.rows[l].entries[j] for j in keep]
                        + [moduli[l] if t == l else 0 for t in range(s)])
        _, D, _ = intmat.smith_decomposition(pres)
        d = intmat.diagonal(D)
        if len([x for x in d if x != 0]) < 1 + s or any(x not in (0, 1) for x in d):
            return False
    return True


def simplex(Q: DegreeMatrix) -> intmat.Matrix:
    """Generator matrix of the Fano simplex dual to Q.

    Returns the n x (n+1) integer matrix of primitive vertex columns v_i with
    sum_i w_i v_i = 0, normalized by row Hermite form so that equal degree
    matrices give bit-identical output.
    """
    if not is_almost_free(Q):
        raise ValidationError("degree matrix is not almost free")
    P = abelian.lattice_kernel_basis(Q.columns())
    w = Q.weights
    if any(sum(P[i][j] * w[j] for j in range(len(w))) != 0 for i in range(len(P))):
        raise ValidationError("kernel basis lost the weight relation")
    return P


def degree_data_from_generator_matrix(P: intmat.Matrix) -> DegreeMatrix:
    """Recover a degree matrix from a generator matrix, weights sorted.

    The free coordinate is sign-normalized so weights are positive; columns
    are permuted to sort the weights, so the result is only canonical up to
    the usual equivalence (use classify.minimal_representative to compare).
    """
    coker = abelian.cokernel(intmat.transpose(P))
    if coker.free_rank != 1:
        raise ValidationError("generator matrix does not have Picard rank one")
    r = len(P[0])
    weights = []
    etas = []
    for i in range(r):
        e = [1 if t == i else 0 for t in range(r)]
        free, tors = coker.project(e)
        weights.append(free[0])
        etas.append(tors)
    if all(x < 0 for x in weights):
        weights = [-x for x in weights]
        etas = [-e for e in etas]
    if any(x <= 0 for x in weights):
        raise ValidationError("mixed-sign weights; not a Fano simplex matrix")
    order = sorted(range(r), key=lambda i: weights[i])
    w = tuple(weights[i] for i in order)
    group = coker.group
    rows = tuple(
        TorsionRow(group.factors[l], tuple(etas[i].lifts[l] for i in order))
        for l in range(group.rank)
    )
    return DegreeMatrix(w, rows)
