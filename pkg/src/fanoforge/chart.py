"""Stabilizer group and age profiles of a single maximal cone.

Works on any rank-n integer generator matrix, not just the Picard rank one
case: pick n linearly independent columns sigma; the local class group acts
on the corresponding affine slice with eigenvalue fractional parts read off
from the degree matrix columns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import abelian, intmat
from .errors import ValidationError
from .polytope import _solve_unique
from .singtest import SingularityClass


@dataclass(frozen=True)
class ChartElement:
    """Group element as exact fractional coordinates, with its origin pair."""

    a: tuple  # in (Q/Z)^k, canonical representatives in [0, 1)
    b: tuple  # in (Q_mu/Z)^s
    c_rep: tuple
    eta: abelian.TorsionElement

    def is_identity(self) -> bool:
        return all(x == 0 for x in self.a) and all(x == 0 for x in self.b)


@dataclass(frozen=True)
class AgeProfile:
    alphas: tuple
    age: Fraction


@dataclass(frozen=True)
class ChartData:
    P: tuple
    sigma: tuple
    complement: tuple
    free_rank: int
    group: abelian.TorsionGroup
    weights: tuple  # Z^k parts per column
    etas: tuple     # torsion parts per column


def chart_data(P, sigma) -> ChartData:
    n = len(P)
    r = len(P[0])
    sigma = tuple(sorted(sigma))
    if len(sigma) != n or any(not 0 <= i < r for i in sigma):
        raise ValidationError("sigma must pick n distinct column indices")
    if intmat.det([[P[i][j] for j in sigma] for i in range(n)]) == 0:
        raise ValidationError("sigma columns are linearly dependent")
    coker = abelian.cokernel(intmat.transpose(P))
    k = coker.free_rank
    weights = []
    etas = []
    for i in range(r):
        e = [1 if t == i else 0 for t in range(r)]
        free, tors = coker.project(e)
        weights.append(free)
        etas.append(tors)
    comp = tuple(i for i in range(r) if i not in sigma)
    return ChartData(
        P=tuple(tuple(row) for row in P),
        sigma=sigma,
        complement=comp,
        free_rank=k,
        group=coker.group,
        weights=tuple(weights),
        etas=tuple(etas),
    )


def _b_of(eta: abelian.TorsionElement):
    return tuple(Fraction(e, m) for e, m in zip(eta.lifts, eta.group.factors))


def _quotient_reps(W):
    """Coset representatives of Z^k / im(W) for square nonsingular W."""
    k = len(W)
    if k == 0:
        return [()]
    U, D, _ = intmat.smith_decomposition(W)
    d = intmat.diagonal(D)
    if any(x == 0 for x in d):
        raise ValidationError("rank failure: quotient is infinite")
    uinv = _integer_inverse(U)
    reps = []
    for y in itertools.product(*(range(x) for x in d)):
        reps.append(tuple(intmat.matvec(uinv, list(y))))
    return reps


def _integer_inverse(U):
    k = len(U)
    cols = []
    for j in range(k):
        rhs = [Fraction(1 if i == j else 0) for i in range(k)]
        sol = _solve_unique(U, rhs)
        if sol is None or any(x.denominator != 1 for x in sol):
            raise ValidationError("matrix is not unimodular")
        cols.append([int(x) for x in sol])
    return [[cols[j][i] for j in range(k)] for i in range(k)]


def chart_group(P, sigma, data: ChartData | None = None):
    """Every element of the stabilizer of the sigma-slice, identity first."""
    data = data or chart_data(P, sigma)
    k = data.free_rank
    comp = data.complement
    W = [[data.weights[i][t] for t in range(k)] for i in comp]
    E = [list(data.etas[i].lifts) for i in comp]
    reps = _quotient_reps(W)
    out = []
    for c in reps:
        for eta in data.group.elements():
            b = _b_of(eta)
            if k:
                rhs = [Fraction(c[t]) - sum(Fraction(E[t][l]) * b[l]
                                            for l in range(data.group.rank))
                       for t in range(k)]
                a = _solve_unique(W, rhs)
                if a is None:
                    raise ValidationError("rank failure of the complement block")
                a = tuple(x % 1 for x in a)
            else:
                a = ()
            out.append(ChartElement(a=a, b=b, c_rep=tuple(c), eta=eta))
    out.sort(key=lambda e: (not e.is_identity(), e.a, e.b))
    return out


def ages(P, sigma, element: ChartElement, data: ChartData | None = None) -> AgeProfile:
    """Fractional eigenvalue exponents on the slice, one per sigma column."""
    data = data or chart_data(P, sigma)
    k = data.free_rank
    s = data.group.rank

    def pairing(i):
        val = sum(Fraction(data.weights[i][t]) * element.a[t] for t in range(k))
        val += sum(Fraction(data.etas[i].lifts[l]) * element.b[l] for l in range(s))
        return val

    for i in data.complement:
        if pairing(i) % 1 != 0:
            raise ValidationError("element does not stabilize the slice")
    alphas = tuple(pairing(i) % 1 for i in data.sigma)
    return AgeProfile(alphas=alphas, age=sum(alphas, Fraction(0)))


def classify_chart(P, sigma) -> SingularityClass:
    data = chart_data(P, sigma)
    has_equality = False
    for el in chart_group(P, sigma, data):
        if el.is_identity():
            continue
        age = ages(P, sigma, el, data).age
        if age < 1:
            return SingularityClass.NON_CANONICAL
        if age == 1:
            has_equality = True
    return (SingularityClass.CANONICAL_STRICT if has_equality
            else SingularityClass.TERMINAL)
