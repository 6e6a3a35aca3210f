"""Finitely generated abelian groups Z^k x Z/mu_1 x ... x Z/mu_s.

Invariant factors are stored largest first (mu_1 >= ... >= mu_s >= 2 with
mu_{l+1} | mu_l), matching the column group of a degree matrix.  Torsion
elements always carry their canonical lifts 0 <= e_l < mu_l; all equality
and ordering is on lifts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod

from . import intmat
from .errors import ResourceCapError, ValidationError

AUTOMORPHISM_ORDER_CAP = 10**6


@dataclass(frozen=True)
class TorsionGroup:
    """Product of cyclic groups given by a divisibility chain of moduli."""

    factors: tuple[int, ...]

    def __post_init__(self):
        fs = self.factors
        if any(f < 2 for f in fs):
            raise ValidationError("invariant factors must be >= 2")
        for a, b in zip(fs, fs[1:]):
            if b > a or a % b != 0:
                raise ValidationError("moduli must form a divisibility chain")

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return prod(self.factors)

    def element(self, lifts) -> "TorsionElement":
        return TorsionElement(self, tuple(l % m for l, m in zip(lifts, self.factors)))

    def zero(self) -> "TorsionElement":
        return TorsionElement(self, (0,) * len(self.factors))

    def elements(self):
        for lifts in itertools.product(*(range(m) for m in self.factors)):
            yield TorsionElement(self, lifts)

    def is_trivial(self) -> bool:
        return not self.factors


TRIVIAL_GROUP = TorsionGroup(())


@dataclass(frozen=True)
class TorsionElement:
    group: TorsionGroup
    lifts: tuple[int, ...]

    def __post_init__(self):
        if len(self.lifts) != len(self.group.factors):
            raise ValidationError("lift length does not match group rank")
        if any(not 0 <= l < m for l, m in zip(self.lifts, self.group.factors)):
            raise ValidationError("lifts must be canonical, in [0, mu)")

    def __add__(self, other: "TorsionElement") -> "TorsionElement":
        return self.group.element(a + b for a, b in zip(self.lifts, other.lifts))

    def __neg__(self) -> "TorsionElement":
        return self.group.element(-a for a in self.lifts)

    def scale(self, k: int) -> "TorsionElement":
        return self.group.element(k * a for a in self.lifts)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.lifts)


@dataclass(frozen=True)
class CokernelData:
    """Invariant-factor presentation of Z^rows / im(M).

    ``free_rows`` and ``torsion_rows`` are rows of the Smith transform U;
    applying them to a column vector x in Z^rows gives its class in
    Z^k x Gamma (torsion coordinates taken mod the matching factor).
    """

    free_rank: int
    group: TorsionGroup
    free_rows: tuple[tuple[int, ...], ...]
    torsion_rows: tuple[tuple[int, ...], ...]  # ordered with group.factors

    def project(self, x) -> tuple[tuple[int, ...], TorsionElement]:
        free = tuple(sum(r * v for r, v in zip(row, x)) for row in self.free_rows)
        tors = self.group.element(
            sum(r * v for r, v in zip(row, x)) for row in self.torsion_rows
        )
        return free, tors


def cokernel(M: intmat.Matrix) -> CokernelData:
    """Decompose Z^rows / im(M) into free rank and invariant factors."""
    m = len(M)
    U, D, _ = intmat.smith_decomposition(M)
    d = intmat.diagonal(D)
    rank = sum(1 for x in d if x != 0)
    # Smith diagonal is ascending; invariant factors of the group descend.
    torsion = [(d[i], tuple(U[i])) for i in range(rank) if d[i] >= 2]
    torsion.reverse()
    free_rows = tuple(tuple(U[i]) for i in range(rank, m))
    group = TorsionGroup(tuple(t[0] for t in torsion))
    return CokernelData(
        free_rank=m - rank,
        group=group,
        free_rows=free_rows,
        torsion_rows=tuple(t[1] for t in torsion),
    )


def lattice_kernel_basis(columns) -> intmat.Matrix:
    """Gale-dual generator matrix of an almost-free degree matrix.

    ``columns`` is a sequence of (weight, TorsionElement) pairs describing a
    map Z^(n+1) -> Z x Gamma.  Returns an integer n x (n+1) matrix P whose
    rows span the kernel lattice of that map, normalized to row Hermite form
    so equal inputs give identical output.  Columns of P are the primitive
    ray generators; sum_i w_i v_i = 0 holds by construction.
    """
    cols = list(columns)
    r = len(cols)
    if r < 2:
        raise ValidationError("need at least two columns")
    group = cols[0][1].group
    s = group.rank
    # kernel of x -> (w.x, eta.x mod mu) == projection of the kernel of the
    # integer matrix [[w, 0], [eta_rows, diag(mu)]] to the first r coords
    B = [[c[0] for c in cols] + [0] * s]
    for l in range(s):
        B.append([c[1].lifts[l] for c in cols] + [
            group.factors[l] if j == l else 0 for j in range(s)
        ])
    kern = intmat.right_kernel_basis(B)
    rows = [[v[i] for i in range(r)] for v in kern]
    if len(rows) != r - 1:
        raise ValidationError("columns do not present a rank-one quotient; "
                              "input is not an almost-free degree matrix")
    H, _ = intmat.hermite_row_form(rows)
    P = [row for row in H if any(row)]
    if len(P) != r - 1:
        raise ValidationError("kernel lattice is degenerate")
    for j in range(r):
        if not intmat.is_primitive([P[i][j] for i in range(r - 1)]):
            raise ValidationError("non-primitive ray generator; "
                                  "input is not almost free")
    # the quotient by the kernel must reproduce the input group, otherwise
    # the columns were not almost free
    coker = cokernel(intmat.transpose(P))
    if coker.free_rank != 1 or coker.group.factors != group.factors:
        raise ValidationError("kernel cokernel does not match the input "
                              "group; input is not almost free")
    return P


def _endomorphism_entry_ranges(factors):
    # entry (i, j) maps the order-mu_j generator into Z/mu_i, so it must be
    # a multiple of mu_i/mu_j whenever mu_j < mu_i (here j > i)
    s = len(factors)
    ranges = []
    for i in range(s):
        row = []
        for j in range(s):
            if j > i:
                step = factors[i] // factors[j]
                row.append(range(0, factors[i], step))
            else:
                row.append(range(factors[i]))
        ranges.append(row)
    return ranges


def _is_bijective_endo(A, factors):
    s = len(factors)
    rel = [[A[i][j] for j in range(s)] + [factors[i] if j == i else 0 for j in range(s)]
           for i in range(s)]
    _, D, _ = intmat.smith_decomposition(rel)
    d = intmat.diagonal(D)
    return all(x == 1 for x in d[:s])


def automorphisms(group: TorsionGroup, order_cap: int = AUTOMORPHISM_ORDER_CAP):
    """All automorphisms of a finite abelian group, as lift matrices.

    Each automorphism is an s x s integer matrix A acting on canonical lifts
    by e -> A e (coordinates mod the matching factor).  The identity comes
    first; every automorphism appears exactly once.
    """
    if group.order > order_cap:
        raise ResourceCapError(
            f"|Gamma| = {group.order} exceeds automorphism cap {order_cap}",
            context={"order": group.order, "cap": order_cap},
        )
    s = group.rank
    if s == 0:
        return [[]]
    ranges = _endomorphism_entry_ranges(group.factors)
    flat = [ranges[i][j] for i in range(s) for j in range(s)]
    out = []
    for picks in itertools.product(*flat):
        A = [list(picks[i * s:(i + 1) * s]) for i in range(s)]
        if _is_bijective_endo(A, group.factors):
            out.append(A)
    ident = intmat.identity(s)
    out.sort(key=lambda A: (A != ident, A))
    return out


def apply_automorphism(A, e: TorsionElement) -> TorsionElement:
    if e.group.rank == 0:
        return e
    return e.group.element(
        sum(A[i][j] * e.lifts[j] for j in range(e.group.rank))
        for i in range(e.group.rank)
    )


def weight_fixing_automorphisms(group: TorsionGroup,
                                order_cap: int = AUTOMORPHISM_ORDER_CAP):
    """Automorphisms of Z x Gamma that fix every positive first coordinate.

    Torsion admits no homomorphism to Z and the weights pin the sign on the
    free factor, so the stabilizer is exactly the set of pairs (delta, A)
    acting by (x, g) -> (x, x*delta + A(g)).
    """
    auts = automorphisms(group, order_cap)
    total = group.order * len(auts)
    if total > order_cap:
        raise ResourceCapError(
            f"|Gamma| * |Aut(Gamma)| = {total} exceeds cap {order_cap}",
            context={"orbit": total, "cap": order_cap},
        )
    return [(delta, A) for delta in group.elements() for A in auts]
