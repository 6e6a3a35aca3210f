"""Terminal / canonical / neither, decided two independent ways.

The primary route is an integer criterion on the degree matrix: for each
column i and each nonzero pair (c, b) with 0 <= c < w_i and b ranging over
canonical torsion lifts, the values

    R_ij(c, b) = mu_1 (w_j c + (w_i eta_j - w_j eta_i) . b)  mod  mu_1 w_i

are summed over j != i and compared against mu_1 w_i.  Everything is
integral because the moduli form a divisibility chain.  The secondary route
enumerates lattice points of the dual simplex.
"""

from __future__ import annotations

import itertools
from enum import Enum

from . import polytope
from .degmat import DegreeMatrix
from .errors import ValidationError


class SingularityClass(Enum):
    TERMINAL = "terminal"
    CANONICAL_STRICT = "canonical_strict"
    NON_CANONICAL = "non_canonical"

    @property
    def is_canonical(self) -> bool:
        return self is not SingularityClass.NON_CANONICAL

    @property
    def is_terminal(self) -> bool:
        return self is SingularityClass.TERMINAL


def _row_data(Q: DegreeMatrix):
    moduli = [r.modulus for r in Q.rows]
    mu1 = moduli[0] if moduli else 1
    return moduli, mu1


def r_value(Q: DegreeMatrix, i: int, j: int, c: int, b) -> int:
    """Single criterion summand, reduced into [0, mu_1 w_i)."""
    if i == j:
        raise ValidationError("need distinct column indices")
    w = Q.weights
    moduli, mu1 = _row_data(Q)
    b = tuple(b)
    if len(b) != len(moduli):
        raise ValidationError("b has wrong length")
    if not 0 <= c < w[i]:
        raise ValidationError("c out of range")
    if any(not 0 <= bl < ml for bl, ml in zip(b, moduli)):
        raise ValidationError("b out of range")
    if c == 0 and all(x == 0 for x in b):
        raise ValidationError("(c, b) must be nonzero")
    modulus = mu1 * w[i]
    acc = mu1 * w[j] * c
    for l, ml in enumerate(moduli):
        coef = w[i] * Q.rows[l].entries[j] - w[j] * Q.rows[l].entries[i]
        acc += coef * b[l] * (mu1 // ml)
    return acc % modulus


def classify(Q: DegreeMatrix) -> SingularityClass:
    """Exact three-way classification of an almost-free degree matrix."""
    w = Q.weights
    n1 = len(w)
    moduli, mu1 = _row_data(Q)
    s = len(moduli)
    scale = [mu1 // m for m in moduli]
    has_equality = False
    for i in range(n1):
        modulus = mu1 * w[i]
        if modulus == 1:
            continue
        wcoef = [mu1 * w[j] % modulus for j in range(n1)]
        bcoef = [[(w[i] * Q.rows[l].entries[j] - w[j] * Q.rows[l].entries[i])
                  * scale[l] % modulus for j in range(n1)]
                 for l in range(s)]
        for c in range(w[i]):
            for b in itertools.product(*(range(m) for m in moduli)):
                if c == 0 and not any(b):
                    continue
                total = 0
                for j in range(n1):
                    if j == i:
                        continue
                    r = wcoef[j] * c
                    for l in range(s):
                        r += bcoef[l][j] * b[l]
                    total += r % modulus
                    if total > modulus:
                        break  # strict already; the sum only grows
                if total < modulus:
                    return SingularityClass.NON_CANONICAL
                if total == modulus:
                    has_equality = True
    return (SingularityClass.CANONICAL_STRICT if has_equality
            else SingularityClass.TERMINAL)


def matches_mode(cls: SingularityClass, mode: str) -> bool:
    if mode == "canonical":
        return cls.is_canonical
    if mode == "terminal":
        return cls.is_terminal
    raise ValidationError(f"unknown mode {mode!r}")


def simplex_lattice_points(P, volume_cap: int = 5_000_000):
    """Lattice points of conv(columns of P), split into interior and
    boundary-non-vertex points.

    Works through the fundamental parallelepiped of the cone over the
    simplex at height one: the runtime scales with the normalized volume,
    not with the bounding box, so heavily skewed simplices stay cheap.
    """
    from fractions import Fraction

    from . import intmat
    from .errors import ResourceCapError

    n = len(P)
    r = len(P[0])
    if r != n + 1:
        raise ValidationError("generator matrix must have n+1 columns")
    lifted = [[P[i][j] for j in range(r)] for i in range(n)]
    lifted.append([1] * r)
    vol = intmat.det(lifted)
    sign = 1 if vol > 0 else -1
    vol = abs(vol)
    if vol == 0:
        raise ValidationError("degenerate simplex")
    if vol > volume_cap:
        raise ResourceCapError("simplex volume exceeds the oracle cap",
                               context={"volume": vol, "cap": volume_cap})
    # integer adjugate: lifted^{-1} = adj / (sign * vol)
    inv_cols = []
    for j in range(r):
        rhs = [Fraction(1 if t == j else 0) for t in range(r)]
        sol = polytope._solve_unique(lifted, rhs)
        inv_cols.append([int(x * vol * sign) for x in sol])
    adj = [[inv_cols[j][i] for j in range(r)] for i in range(r)]

    U, D, _ = intmat.smith_decomposition(lifted)
    diag = intmat.diagonal(D)
    uinv_cols = []
    for j in range(r):
        rhs = [Fraction(1 if t == j else 0) for t in range(r)]
        sol = polytope._solve_unique(U, rhs)
        uinv_cols.append([int(x) for x in sol])

    interior, boundary = [], []
    import itertools as _it
    for y in _it.product(*(range(d) for d in diag)):
        x = [sum(uinv_cols[t][i] * y[t] for t in range(r)) for i in range(r)]
        # barycentric numerators modulo the volume pick the parallelepiped
        # representative of this residue class
        nums = [(sum(adj[i][t] * x[t] for t in range(r)) * sign) % vol
                for i in range(r)]
        total = sum(nums)
        if total != vol:  # not at height one (the apex has total 0)
            continue
        pt = tuple(sum(P[i][t] * nums[t] for t in range(r)) // vol
                   for i in range(n))
        if all(nums):
            interior.append(pt)
        else:
            boundary.append(pt)
    return sorted(interior), sorted(boundary)


def lattice_point_oracle(P) -> SingularityClass:
    """Classification by exhaustive lattice point enumeration of conv(P).

    Independent of the integer criterion: terminal means the lattice points
    are exactly the vertices and the origin; canonical means the origin is
    the only interior point.
    """
    n = len(P)
    cols = {tuple(P[i][j] for i in range(n)) for j in range(n + 1)}
    if len(cols) != n + 1:
        raise ValidationError("repeated simplex vertices")
    interior, boundary = simplex_lattice_points(P)
    origin = (0,) * n
    if interior != [origin]:
        return SingularityClass.NON_CANONICAL
    if boundary:
        return SingularityClass.CANONICAL_STRICT
    return SingularityClass.TERMINAL
