"""Exact rational convex geometry in low dimension.

Polytopes carry both a vertex and a halfspace description, kept consistent.
Halfspaces are pairs (a, beta) with a a primitive integer normal and beta a
rational offset, meaning <x, a> >= beta.  Everything is exact: Fractions and
Python ints only, with a guarded int64 numpy fast path for bulk lattice
point filtering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import intmat
from .errors import DimensionCapError, ResourceCapError, UnboundedRegionError, ValidationError

MAX_DIM = 6
_INT64_SAFE = 2**62


def _frac_floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _frac_ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _solve_unique(rows, rhs):
    """Solve a square rational system; None when singular."""
    n = len(rows)
    A = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(rhs[i])]
         for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return None
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return tuple(A[i][n] for i in range(n))


def _normalize_halfspace(a, beta):
    g = 0
    for x in a:
        g = gcd(g, x)
    if g == 0:
        raise ValidationError("zero normal vector in halfspace")
    return tuple(x // g for x in a), Fraction(beta) / g


def _feasible(halfspaces, n):
    """Fourier-Motzkin feasibility for a small system <a,x> >= beta."""
    cons = [(list(a), Fraction(beta)) for a, beta in halfspaces]
    for k in range(n - 1, -1, -1):
        pos = [c for c in cons if c[0][k] > 0]
        neg = [c for c in cons if c[0][k] < 0]
        zero = [c for c in cons if c[0][k] == 0]
        new = list(zero)
        for ap, bp in pos:
            for an, bn in neg:
                # x_k >= (bp - rest_p)/ap and x_k <= (rest_n - bn)/(-an)
                coef = [Fraction(ap[k]) * an[j] - Fraction(an[k]) * ap[j]
                        for j in range(k)]
                rhs = Fraction(ap[k]) * bn - Fraction(an[k]) * bp
                new.append((coef, rhs))
        cons = [(a[:k], b) for a, b in new]
    return all(b <= 0 for _, b in cons)


@dataclass(frozen=True)
class RationalPolytope:
    ambient_dim: int
    vertices: tuple
    halfspaces: tuple

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def dim(self) -> int:
        if not self.vertices:
            return -1
        v0 = self.vertices[0]
        diffs = [[p[i] - v0[i] for i in range(self.ambient_dim)]
                 for p in self.vertices[1:]]
        return _rational_rank(diffs)

    def contains(self, point, strict=False) -> bool:
        for a, beta in self.halfspaces:
            val = sum(Fraction(x) * c for x, c in zip(point, a))
            if val < beta or (strict and val == beta):
                return False
        return True


def _rational_rank(rows) -> int:
    rows = [list(map(Fraction, r)) for r in rows if any(r)]
    rank = 0
    cols = len(rows[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        rank += 1
    return rank


def dual_description(halfspaces, ambient_dim):
    """Exact vertex set of the polytope cut out by the halfspaces.

    Empty regions give an empty tuple; unbounded ones raise
    UnboundedRegionError.  Brute force over normal subsets; fine for the
    small systems this package produces.
    """
    if ambient_dim > MAX_DIM:
        raise DimensionCapError(f"dimension {ambient_dim} exceeds {MAX_DIM}")
    hs = [_normalize_halfspace(a, b) for a, b in halfspaces]
    # keep only the tightest offset per normal direction
    tight = {}
    for a, b in hs:
        if a not in tight or b > tight[a]:
            tight[a] = b
    hs = sorted(tight.items())
    n = ambient_dim
    cand = {}
    for subset in itertools.combinations(range(len(hs)), n):
        rows = [hs[i][0] for i in subset]
        rhs = [hs[i][1] for i in subset]
        x = _solve_unique(rows, rhs)
        if x is None:
            continue
        ok = True
        for a, b in hs:
            if sum(xi * ai for xi, ai in zip(x, a)) < b:
                ok = False
                break
        if ok:
            cand[x] = True
    if cand:
        if _has_recession_direction(hs, n):
            raise UnboundedRegionError("feasible region is unbounded")
        return tuple(sorted(cand))
    # no basic feasible point: empty, or an unbounded region without vertices
    normals = [list(a) for a, _ in hs]
    if normals and _rational_rank(normals) == n:
        return ()
    if _feasible(hs, n):
        raise UnboundedRegionError("feasible region has no vertices")
    return ()


def _has_recession_direction(hs, n):
    normals = [list(a) for a, _ in hs]
    if not normals or _rational_rank(normals) < n:
        return True
    for subset in itertools.combinations(range(len(normals)), n - 1):
        rows = [normals[i] for i in subset]
        kern = intmat.right_kernel_basis(rows) if rows else [[1]]
        if len(kern) != 1:
            continue
        d = kern[0]
        for cand in (d, [-x for x in d]):
            if all(sum(c * a for c, a in zip(cand, a_)) >= 0 for a_ in normals):
                return True
    return False


def from_halfspaces(halfspaces, ambient_dim) -> RationalPolytope:
    verts = dual_description(halfspaces, ambient_dim)
    if not verts:
        return RationalPolytope(ambient_dim, (), ())
    hs = [_normalize_halfspace(a, b) for a, b in halfspaces]
    tight = {}
    for a, b in hs:
        if a not in tight or b > tight[a]:
            tight[a] = b
    kept = []
    for a, b in sorted(tight.items()):
        hit = any(sum(v[i] * a[i] for i in range(ambient_dim)) == b for v in verts)
        if hit:
            kept.append((a, b))
    return RationalPolytope(ambient_dim, verts, tuple(kept))


def facet_description(vertices, ambient_dim):
    """Facet halfspaces of a full-dimensional polytope from its vertices."""
    pts = [tuple(map(Fraction, p)) for p in vertices]
    if not pts:
        return ()
    facets = {}
    for subset in itertools.combinations(range(len(pts)), ambient_dim):
        base = pts[subset[0]]
        diffs = [[pts[i][k] - base[k] for k in range(ambient_dim)]
                 for i in subset[1:]]
        # integer normal of the hyperplane spanned by the subset
        den = lcm(*[f.denominator for row in diffs for f in row]) if diffs else 1
        int_rows = [[int(f * den) for f in row] for row in diffs]
        kern = intmat.right_kernel_basis(int_rows) if int_rows else []
        if len(kern) != 1:
            continue
        a = tuple(intmat.primitive_vector(kern[0]))
        beta = sum(x * c for x, c in zip(base, a))
        vals = [sum(x * c for x, c in zip(p, a)) for p in pts]
        if all(v >= beta for v in vals) and any(v > beta for v in vals):
            facets[(a, beta)] = True
        else:
            a2 = tuple(-x for x in a)
            beta2 = -beta
            if all(v <= beta for v in vals) and any(v < beta for v in vals):
                facets[(a2, beta2)] = True
    return tuple(sorted(facets))


def from_vertices(vertices, ambient_dim) -> RationalPolytope:
    """Polytope from points; requires a full-dimensional hull."""
    pts = sorted({tuple(map(Fraction, p)) for p in vertices})
    if not pts:
        return RationalPolytope(ambient_dim, (), ())
    hs = facet_description(pts, ambient_dim)
    if not hs:
        raise ValidationError("hull is not full-dimensional; "
                              "use convex_hull_2d or span reduction")
    verts = []
    for p in pts:
        tight = [a for a, b in hs if sum(x * c for x, c in zip(p, a)) == b]
        if len(tight) >= ambient_dim and _rational_rank(tight) == ambient_dim:
            verts.append(p)
    return RationalPolytope(ambient_dim, tuple(verts), hs)


def simplex_polytope(P) -> RationalPolytope:
    """Polytope of a generator matrix: convex hull of its columns.

    The columns must positively span, i.e. the simplex has 0 in its interior.
    """
    n = len(P)
    r = len(P[0])
    if r != n + 1:
        raise ValidationError("generator matrix must have n+1 columns")
    verts = [tuple(Fraction(P[i][j]) for i in range(n)) for j in range(r)]
    hs = []
    for drop in range(r):
        rows = []
        base = verts[(drop + 1) % r]
        for j in range(r):
            if j == drop or j == (drop + 1) % r:
                continue
            rows.append([int(verts[j][k] - base[k]) for k in range(n)])
        kern = intmat.right_kernel_basis(rows) if rows else [[1]]
        if len(kern) != 1:
            raise ValidationError("degenerate simplex")
        a = intmat.primitive_vector(kern[0])
        beta = sum(x * c for x, c in zip(base, a))
        opp = sum(x * c for x, c in zip(verts[drop], a))
        if opp < beta:
            a = [-x for x in a]
            beta = -beta
            opp = -opp
        if opp == beta:
            raise ValidationError("degenerate simplex")
        hs.append((tuple(a), beta))
    if any(beta >= 0 for _, beta in hs):
        raise ValidationError("origin is not interior; columns do not positively span")
    return RationalPolytope(n, tuple(sorted(verts)), tuple(sorted(hs)))


def lattice_points(poly: RationalPolytope, interior_only: bool = False):
    """All integer points of the polytope, coordinate-sorted.

    Interior mode uses strict inequalities on every halfspace, which is the
    topological interior for full-dimensional polytopes and empty otherwise.
    """
    if poly.ambient_dim > MAX_DIM:
        raise DimensionCapError(f"dimension {poly.ambient_dim} exceeds {MAX_DIM}")
    if poly.is_empty:
        return []
    n = poly.ambient_dim
    lo = [_frac_ceil(min(v[i] for v in poly.vertices)) for i in range(n)]
    hi = [_frac_floor(max(v[i] for v in poly.vertices)) for i in range(n)]
    if any(l > h for l, h in zip(lo, hi)):
        return []
    # integer thresholds: <a,x> >= beta  <=>  <a,x> >= ceil(beta); strict uses
    # floor(beta)+1 since the left side is an integer
    thr = []
    for a, beta in poly.halfspaces:
        t = _frac_floor(beta) + 1 if interior_only else _frac_ceil(beta)
        thr.append((a, t))
    counts = [h - l + 1 for l, h in zip(lo, hi)]
    total = 1
    for c in counts:
        total *= c
    max_abs_coord = max(max(abs(l), abs(h)) for l, h in zip(lo, hi))
    max_abs_normal = max((abs(x) for a, _ in thr for x in a), default=0)
    if total <= 4_000_000 and max_abs_coord * max_abs_normal * n < _INT64_SAFE:
        grids = np.meshgrid(*[np.arange(l, h + 1, dtype=np.int64)
                              for l, h in zip(lo, hi)], indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        keep = np.ones(len(pts), dtype=bool)
        for a, t in thr:
            keep &= pts @ np.asarray(a, dtype=np.int64) >= t
            if not keep.any():
                return []
        got = pts[keep]
        return sorted(map(tuple, got.tolist()))
    out = []
    for pt in itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        ok = True
        for a, t in thr:
            if sum(x * c for x, c in zip(pt, a)) < t:
                ok = False
                break
        if ok:
            out.append(pt)
    return out


def convex_hull_2d(points):
    """Vertices of the convex hull of exact 2D points, counterclockwise."""
    pts = sorted({(Fraction(x), Fraction(y)) for x, y in points})
    if len(pts) <= 2:
        return pts
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# canonical forms under GL(n, Z), linear only (no translations)

_CANON_NODE_CAP = 500_000


def _span_coordinates(vertices, ambient_dim):
    """Map vertices into Z^d coordinates of the saturated linear span.

    Returns (d, lcd, columns) where columns are integer coordinate vectors.
    The basis is only canonical up to GL(d, Z), which the caller minimizes
    over anyway.
    """
    lcd = 1
    for v in vertices:
        for x in v:
            lcd = lcm(lcd, Fraction(x).denominator)
    cols = [[int(Fraction(x) * lcd) for x in v] for v in vertices]
    B = [[cols[j][i] for j in range(len(cols))] for i in range(ambient_dim)]
    U, D, _ = intmat.smith_decomposition(B)
    d = sum(1 for x in intmat.diagonal(D) if x != 0)
    coords = []
    for col in cols:
        y = intmat.matvec(U, col)
        if any(y[i] != 0 for i in range(d, ambient_dim)):
            raise ValidationError("span reduction failed")
        coords.append(y[:d])
    return d, lcd, coords


def _hnf_colmajor_key(cols, d):
    M = [[c[i] for c in cols] for i in range(d)]
    H, _ = intmat.hermite_row_form(M)
    return tuple(H[i][j] for j in range(len(cols)) for i in range(d))


def _min_column_order_key(cols, d):
    """Lexicographically least column-major Hermite form over column orders.

    The Hermite form of a column prefix is a prefix of the full form, so the
    search extends only currently-minimal prefixes.
    """
    m = len(cols)
    best = None
    frontier = [((), frozenset(range(m)), ())]
    nodes = 0
    while frontier:
        chosen, remaining, key = frontier.pop()
        if not remaining:
            if best is None or key < best:
                best = key
            continue
        if best is not None and key > best[: len(key)]:
            continue
        buckets = {}
        for c in remaining:
            k2 = _hnf_colmajor_key([cols[i] for i in chosen] + [cols[c]], d)
            buckets.setdefault(k2, []).append(c)
        kmin = min(buckets)
        # tied prefixes can differ in their completions, so extend every
        # column achieving the minimal prefix key
        for c in buckets[kmin]:
            frontier.append((chosen + (c,), remaining - {c}, kmin))
            nodes += 1
            if nodes > _CANON_NODE_CAP:
                raise ResourceCapError("canonical form search exceeded node cap",
                                       context={"vertices": m})
    return best


def segment_normal_form(poly: RationalPolytope):
    """Normal form (p, q) of a one-dimensional polytope, meaning [-p, q].

    The carrier line is mapped to the first axis; orientation is fixed by
    p <= q.
    """
    if poly.dim != 1:
        raise ValidationError("not a segment")
    d, lcd, coords = _span_coordinates(poly.vertices, poly.ambient_dim)
    if d != 1:
        raise ValidationError("span reduction disagrees with dimension")
    ys = sorted(c[0] for c in coords)
    a, b = ys[0], ys[-1]
    if -a > b:
        a, b = -b, -a
    return Fraction(-a, lcd), Fraction(b, lcd)


def unimodular_key(poly: RationalPolytope) -> str:
    """Canonical byte string for linear GL(n, Z) equivalence.

    Scales to a lattice polytope by the least common denominator, reduces to
    the saturated linear span, then minimizes the column-major Hermite form
    over vertex orders.  Equal keys identify equivalent polytopes;
    translations are deliberately not quotiented out.
    """
    if poly.is_empty:
        return "empty"
    d, lcd, coords = _span_coordinates(poly.vertices, poly.ambient_dim)
    if d == 0:
        return f"lcd={lcd};d=0;m={len(coords)}"
    if d == 1:
        p, q = segment_normal_form(poly) if poly.dim == 1 else (None, None)
        if p is not None:
            return f"lcd={lcd};d=1;seg=[-{p},{q}]"
    key = _min_column_order_key(coords, d)
    return f"lcd={lcd};d={d};m={len(coords)};" + ",".join(map(str, key))
