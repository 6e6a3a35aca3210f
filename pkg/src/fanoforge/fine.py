"""Fine interiors of lattice polytopes and derived birational invariants.

The Fine interior is the intersection over all nonzero integer directions v
of the halfspaces <x, v> >= ord(v) + 1, where ord(v) is the minimum of
<., v> over the polytope.  Only finitely many directions matter; they are
found by rounds of cutting:

  1. start from the facet constraints shifted inward by one,
  2. collect the primitive lattice directions whose shifted halfspace still
     cuts the current body (a bounded search region, one piece per vertex),
  3. add the cuts and repeat until nothing cuts.

Directions that are multiples of a used one are implied and never enter the
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import intmat, polytope
from .errors import DimensionCapError, FanoForgeError, ValidationError

DEFAULT_DIM_CAP = 4
_ROUND_CAP = 256


@dataclass(frozen=True)
class FineResult:
    polytope: polytope.RationalPolytope
    dim: int  # -1 when empty
    certificate: tuple

    @property
    def is_empty(self) -> bool:
        return self.dim < 0


def ord_value(poly: polytope.RationalPolytope, v) -> Fraction:
    """min over the polytope of the pairing with v (attained at a vertex)."""
    if poly.is_empty:
        raise ValidationError("ord of an empty polytope")
    return min(sum(Fraction(x) * c for x, c in zip(p, v)) for p in poly.vertices)


def _candidate_directions(F, delta):
    """Primitive v whose shifted halfspace cuts F, by vertexwise regions.

    For a vertex u of F the region {v : <u - w, v> <= 1 for all vertices w}
    is bounded because u lies interior to delta, and every cutting direction
    lies in one of these regions.
    """
    n = delta.ambient_dim
    seen = set()
    for u in F.vertices:
        hs = []
        for wv in delta.vertices:
            diff = [u[i] - wv[i] for i in range(n)]
            den = lcm(*[f.denominator for f in diff]) if diff else 1
            a = [int(f * den) for f in diff]
            if all(x == 0 for x in a):
                continue
            # <diff, v> <= 1  as  <-a, v> >= -den
            hs.append((tuple(-x for x in a), Fraction(-den)))
        region = polytope.from_halfspaces(hs, n)
        for v in polytope.lattice_points(region):
            if all(x == 0 for x in v):
                continue
            pv = tuple(intmat.primitive_vector(list(v)))
            seen.add(pv)
    return sorted(seen)


def fine_interior(delta: polytope.RationalPolytope,
                  dim_cap: int = DEFAULT_DIM_CAP) -> FineResult:
    """Exact Fine interior of a full-dimensional lattice polytope."""
    n = delta.ambient_dim
    if n > dim_cap:
        raise DimensionCapError(f"dimension {n} exceeds the cap {dim_cap}")
    if delta.is_empty or delta.dim != n:
        raise ValidationError("need a full-dimensional polytope")
    for v in delta.vertices:
        if any(Fraction(x).denominator != 1 for x in v):
            raise ValidationError("need a lattice polytope")

    cuts = {}
    for a, beta in delta.halfspaces:
        cuts[a] = beta + 1
    F = polytope.from_halfspaces(sorted(cuts.items()), n)
    rounds = 0
    while not F.is_empty:
        rounds += 1
        if rounds > _ROUND_CAP:
            raise FanoForgeError("cutting rounds exceeded the safety cap")
        new = []
        for v in _candidate_directions(F, delta):
            if v in cuts:
                continue
            bound = ord_value(delta, v) + 1
            if ord_value(F, v) < bound:
                new.append((v, bound))
        if not new:
            break
        for v, bound in new:
            cuts[v] = bound
        F = polytope.from_halfspaces(sorted(cuts.items()), n)
    return FineResult(polytope=F, dim=F.dim, certificate=tuple(sorted(cuts)))


def kodaira_dimension(delta: polytope.RationalPolytope,
                      dim_cap: int = DEFAULT_DIM_CAP):
    """min(dim F, n-1); None when F is empty (no canonical model)."""
    res = fine_interior(delta, dim_cap=dim_cap)
    if res.is_empty:
        return None
    return min(res.dim, delta.ambient_dim - 1)


def plurigenus(p, q, m: int) -> int:
    """m-th plurigenus of the model attached to the segment [-p, q]."""
    p = Fraction(p)
    q = Fraction(q)
    if p < 0 or q < 0 or m < 0:
        raise ValidationError("need p, q, m >= 0")
    return (m * p).numerator // (m * p).denominator \
        + (m * q).numerator // (m * q).denominator + 1
