"""Full enumeration pipeline for canonical and terminal degree matrices.

The run for one dimension factors through weight vectors: enumerate the
admissible weight vectors, compute for each the row-minimal torsion vectors,
then stack torsion rows recursively, keeping one minimal representative per
equivalence class.  Weight vectors never mix under equivalence, so the work
shards cleanly and a final sort makes the output independent of the worker
count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Callable, Sequence

import numpy as np

from . import abelian, singtest
from .degmat import DegreeMatrix, TorsionRow, is_almost_free, validate_weight_vector
from .errors import FanoForgeError, ResourceCapError, ValidationError
from .singtest import SingularityClass, matches_mode

_INT64_SAFE = 2**62
_BOX_CAP = 10**10
_SURVIVOR_CAP = 10**6


def sylvester(i: int) -> int:
    """Sylvester numbers 2, 3, 7, 43, 1807, ..."""
    if i < 1:
        raise ValidationError("index must be >= 1")
    s = 2
    for _ in range(i - 1):
        s = s * s - s + 1
    return s


def weight_sum_cap(n: int) -> int:
    """Hard search bound (s_{n+1} - 1)^n on the weight sum."""
    return (sylvester(n + 1) - 1) ** n


def torsion_order_cap(w) -> int:
    """Bound on the product of the torsion moduli for a weight vector."""
    w = tuple(w)
    h = sum(w)
    n = len(w) - 1
    return (h ** (n - 1)) // prod(w[1:])


# Practical weight-sum caps, far below the hard bound.  They were fixed by
# cap-doubling runs: the classification output is unchanged when the cap is
# doubled, and for n <= 3 it also matches an exhaustive unpruned run.  The
# hard bound stays available via h_cap.  Dimension-four canonical runs are
# not desk scale; they require an explicit cap or an ingested weight list.
DEFAULT_WEIGHT_SUM_CAPS = {
    (1, "canonical"): 2,
    (1, "terminal"): 2,
    (2, "canonical"): 36,
    (2, "terminal"): 36,
    (3, "canonical"): 126,
    (3, "terminal"): 126,
    (4, "terminal"): 150,
}


def default_weight_sum_cap(n: int, mode: str) -> int:
    cap = DEFAULT_WEIGHT_SUM_CAPS.get((n, mode))
    if cap is None:
        if n <= 2:
            return weight_sum_cap(n)
        raise ResourceCapError(
            f"no practical default weight-sum cap for dimension {n} mode "
            f"{mode!r}; pass h_cap explicitly or ingest a weight-vector file",
            context={"dim": n, "mode": mode, "hard_cap": weight_sum_cap(n)},
        )
    return cap


def _wps_class(w) -> SingularityClass:
    """Torsion-free classification, inlined for the enumeration hot path."""
    if max(w) > 64:
        # random rejects fail at small c; only near-misses pay the full scan
        for i, wi in enumerate(w):
            if wi <= 1:
                continue
            for c in range(1, min(wi, 24)):
                total = 0
                for j, wj in enumerate(w):
                    if j != i:
                        total += (c * wj) % wi
                        if total > wi:
                            break
                if total < wi:
                    return SingularityClass.NON_CANONICAL
        return _wps_class_numpy(w)
    has_eq = False
    for i, wi in enumerate(w):
        if wi == 1:
            continue
        for c in range(1, wi):
            total = 0
            for j, wj in enumerate(w):
                if j == i:
                    continue
                total += (c * wj) % wi
                if total > wi:
                    break
            if total < wi:
                return SingularityClass.NON_CANONICAL
            if total == wi:
                has_eq = True
    return (SingularityClass.CANONICAL_STRICT if has_eq
            else SingularityClass.TERMINAL)


def _wps_class_numpy(w) -> SingularityClass:
    has_eq = False
    for i, wi in enumerate(w):
        if wi == 1:
            continue
        c = np.arange(1, wi, dtype=np.int64)
        total = np.zeros(wi - 1, dtype=np.int64)
        for j, wj in enumerate(w):
            if j != i:
                total += (c * wj) % wi
        if (total < wi).any():
            return SingularityClass.NON_CANONICAL
        if (total == wi).any():
            has_eq = True
    return (SingularityClass.CANONICAL_STRICT if has_eq
            else SingularityClass.TERMINAL)


_PREFIX_C_CAP = 6


def _prefix_viable(acc, slots_left, strict, c_cap=_PREFIX_C_CAP):
    """Admissible fail-fast on a descending prefix.

    Every unplaced weight is at most the last placed one, so its criterion
    contribution at (i, c) is at most min(c * acc[-1], acc[i] - 1).  If even
    that optimistic total cannot reach the threshold, no completion works.
    """
    u_min = acc[-1]
    for i, ui in enumerate(acc):
        if ui == 1:
            break
        for c in range(1, min(ui, c_cap)):
            total = slots_left * min(c * u_min, ui - 1)
            if total > ui:
                continue
            for j, uj in enumerate(acc):
                if j != i:
                    total += (c * uj) % ui
                    if total > ui:
                        break
            if total < ui or (strict and total == ui):
                return False
    return True


def _descending_partitions(h, n, ratio_prune, mode=None):
    """Descending (n+1)-tuples summing to h, with admissible pruning.

    Two conjectural-but-validated conditions narrow the search when
    ratio_prune is set: the k-th largest weight is at most h/(k+1) for
    k <= n, and the tail sum from position j onward is at least
    h/(s_j - 1).  Both are cross-checked against unpruned enumeration in
    the test suite and against the published classification counts.  The
    prefix fail-fast derived from the criterion itself is exact and always
    safe.
    """
    syl1 = [sylvester(i) - 1 for i in range(1, n + 3)]  # s_j - 1, 1-based pad
    strict = mode == "terminal"
    check_prefix = mode is not None
    out = []

    def rec(k, rem, prev, acc):
        slots = n + 1 - k
        if slots == 1:
            if 1 <= rem <= prev and (not ratio_prune or rem * syl1[n] >= h):
                out.append(acc + (rem,))
            return
        hi = min(prev, rem - (slots - 1))
        if ratio_prune:
            if k < n:
                hi = min(hi, h // (k + 2))
            # keep enough budget for the tail starting at position k+2
            hi = min(hi, rem - -(-h // syl1[k + 1]))
        lo = -(-rem // slots)
        for u in range(hi, lo - 1, -1):
            nxt = acc + (u,)
            if check_prefix and not _prefix_viable(nxt, slots - 1, strict):
                continue
            rec(k + 1, rem - u, u, nxt)

    rec(0, h, h, ())
    return out


def _weights_for_sum_numpy(h, mode, ratio_prune=True):
    """Vectorized weight scan for one value of the weight sum; n = 4 only.

    The two largest weights are scanned in Python; the third and fourth
    live on a bounded integer grid filtered by the range constraints, an
    exact well-formedness gcd test, and the c <= 3 slice of the criterion.
    The rare survivors get the exact classification afterwards.
    """
    n = 4
    strict = mode == "terminal"
    syl1 = [sylvester(i) - 1 for i in range(1, n + 3)]
    out = []
    u1_hi = min(h // 2, h - n) if ratio_prune else h - n
    u1_lo = -(-h // (n + 1))
    for u1 in range(u1_hi, u1_lo - 1, -1):
        rem1 = h - u1
        u2_hi = min(u1, rem1 - (n - 1))
        if ratio_prune:
            u2_hi = min(u2_hi, h // 3, rem1 - -(-h // syl1[2]))
        u2_lo = -(-rem1 // n)
        for u2 in range(u2_hi, u2_lo - 1, -1):
            rem2 = rem1 - u2
            u3_hi = min(u2, rem2 - (n - 2))
            if ratio_prune:
                u3_hi = min(u3_hi, h // 4, rem2 - -(-h // syl1[3]))
            u3_lo = -(-rem2 // (n - 1))
            if u3_hi < u3_lo:
                continue
            u4_hi = min(u3_hi, rem2 - u3_lo - 1)
            if ratio_prune:
                u4_hi = min(u4_hi, h // 5)
            if u4_hi < 1:
                continue
            u3 = np.arange(u3_lo, u3_hi + 1, dtype=np.int64)[:, None]
            u4 = np.arange(1, u4_hi + 1, dtype=np.int64)[None, :]
            u5 = (rem2 - u3) - u4
            mask = (u4 <= u3) & (u5 >= 1) & (u5 <= u4)
            if ratio_prune:
                mask &= u5 * syl1[n] >= h
            # fold the cheapest criterion slices into the grid mask before
            # compressing: c = 1 at the two largest columns
            if u1 > 1:
                t = (u2 % u1) + (u3 % u1) + (u4 % u1) + (u5 % u1)
                mask &= (t > u1) if strict else (t >= u1)
            if u2 > 1:
                t = (u1 % u2) + (u3 % u2) + (u4 % u2) + (u5 % u2)
                mask &= (t > u2) if strict else (t >= u2)
            if not mask.any():
                continue
            cnt = int(mask.sum())
            u3b, u4b = np.broadcast_arrays(u3, u4)
            cand = np.stack([np.full(cnt, u1, dtype=np.int64),
                             np.full(cnt, u2, dtype=np.int64),
                             u3b[mask], u4b[mask], u5[mask]], axis=1)
            # remaining small-c criterion slices, cheap columns first
            tests = [(i, 1) for i in (2, 3, 4)] + \
                    [(i, c) for c in range(2, 9) for i in range(5)]
            for i, c in tests:
                if not len(cand):
                    break
                wi = cand[:, i]
                active = wi > c
                if not active.any():
                    continue
                total = np.zeros(len(cand), dtype=np.int64)
                for j in range(5):
                    if j != i:
                        total += (c * cand[:, j]) % wi
                bad = active & ((total < wi) | (strict & (total == wi)))
                if bad.any():
                    cand = cand[~bad]
            if not len(cand):
                continue
            # well-formedness: dropping any column leaves gcd one
            keep = np.ones(len(cand), dtype=bool)
            for drop in range(5):
                cols = [j for j in range(5) if j != drop]
                g = cand[:, cols[0]].copy()
                for j in cols[1:]:
                    np.gcd(g, cand[:, j], out=g)
                keep &= g == 1
            cand = cand[keep]
            for row in cand.tolist():
                w = tuple(int(x) for x in reversed(row))
                if matches_mode(_wps_class(w), mode):
                    out.append(w)
    return out


def enumerate_weight_vectors(n, mode, h_cap=None, ratio_prune=True):
    """All weight vectors of the given class with weight sum <= the cap.

    The default pruning caps the k-th largest weight by h/(k+1) and bounds
    the tails from below by h/(s_j - 1).  Every cap is cross-checked in the
    test suite against unpruned enumeration at small scale and against the
    published classification counts.
    """
    if n < 1:
        raise ValidationError("dimension must be >= 1")
    cap = h_cap if h_cap is not None else default_weight_sum_cap(n, mode)
    cap = min(cap, weight_sum_cap(n))
    out = []
    for h in range(n + 1, cap + 1):
        if n == 4:
            for w in _weights_for_sum_numpy(h, mode, ratio_prune):
                if validate_weight_vector(w):
                    out.append(w)
            continue
        for desc in _descending_partitions(h, n, ratio_prune, mode):
            w = tuple(reversed(desc))
            if not validate_weight_vector(w):
                continue
            if matches_mode(_wps_class(w), mode):
                out.append(w)
    out.sort()
    return out


# ---------------------------------------------------------------------------
# row-minimal torsion vectors


def shift_bounds(w, mu):
    """Componentwise bounds d_i of the shift-normalized representative.

    d_i = mu * g_i / g_{i-1} with g_i = gcd(mu, w_0, ..., w_i) and
    g_{-1} = mu; each row-equivalence class has a unique member with
    0 <= eta_i < d_i.
    """
    g = mu
    out = []
    for wi in w:
        g2 = gcd(g, wi)
        out.append(mu * g2 // g)
        g = g2
    return out


def eta_normal_form(w, mu, eta, kappa):
    """The shift-normalized representative of kappa * eta.

    Lexicographic minimum of kappa*eta + m*w over m, which is exactly the
    unique representative inside the shift_bounds box.
    """
    if gcd(kappa, mu) != 1:
        raise ValidationError("kappa must be a unit modulo mu")
    base = [kappa * e % mu for e in eta]
    best = None
    for m in range(mu):
        cand = tuple((b + m * wi) % mu for b, wi in zip(base, w))
        if best is None or cand < best:
            best = cand
    return best


def is_row_minimal(w, mu, eta) -> bool:
    """Inside the shift box and below every unit multiple's normal form."""
    eta = tuple(eta)
    d = shift_bounds(w, mu)
    if any(not 0 <= e < di for e, di in zip(eta, d)):
        return False
    for kappa in range(2, mu):
        if gcd(kappa, mu) != 1:
            continue
        if eta_normal_form(w, mu, eta, kappa) < eta:
            return False
    return True


def _criterion_tests(w, mu):
    tests = []
    for i, wi in enumerate(w):
        for c in range(wi):
            for b in range(mu):
                if c == 0 and b == 0:
                    continue
                tests.append((i, c, b))
    return tests


def _survivors_numpy(w, mu, mode, chunk=1 << 19):
    n1 = len(w)
    d = shift_bounds(w, mu)
    box = prod(d)
    if box > _BOX_CAP:
        raise ResourceCapError("torsion search box too large",
                               context={"weights": w, "mu": mu, "box": box})
    strict = mode == "terminal"
    tests = _criterion_tests(w, mu)
    wv = np.asarray(w, dtype=np.int64)
    radix = np.asarray(d, dtype=np.int64)
    out = []
    for start in range(0, box, chunk):
        stop = min(start + chunk, box)
        idx = np.arange(start, stop, dtype=np.int64)
        cand = np.empty((stop - start, n1), dtype=np.int64)
        for col in range(n1 - 1, -1, -1):
            cand[:, col] = idx % radix[col]
            idx //= radix[col]
        # entries must generate Z/mu, otherwise the row belongs to a
        # smaller modulus and would duplicate work
        g = np.full(len(cand), mu, dtype=np.int64)
        for col in range(n1):
            np.gcd(g, cand[:, col], out=g)
        cand = cand[g == 1]
        for i, c, b in tests:
            if not len(cand):
                break
            modulus = mu * w[i]
            total = np.zeros(len(cand), dtype=np.int64)
            etai = cand[:, i]
            for j in range(n1):
                if j == i:
                    continue
                term = (mu * w[j] * c + (w[i] * cand[:, j] - w[j] * etai) * b) % modulus
                total += term
            keep = total > modulus if strict else total >= modulus
            cand = cand[keep]
        out.extend(map(tuple, cand.tolist()))
        if len(out) > _SURVIVOR_CAP:
            raise ResourceCapError("criterion survivor cap exceeded",
                                   context={"weights": w, "mu": mu})
    return out


def _survivors_python(w, mu, mode):
    n1 = len(w)
    d = shift_bounds(w, mu)
    strict = mode == "terminal"
    tests = _criterion_tests(w, mu)
    out = []
    for eta in itertools.product(*(range(x) for x in d)):
        g = mu
        for e in eta:
            g = gcd(g, e)
        if g != 1:
            continue
        ok = True
        for i, c, b in tests:
            modulus = mu * w[i]
            total = 0
            for j in range(n1):
                if j == i:
                    continue
                total += (mu * w[j] * c + (w[i] * eta[j] - w[j] * eta[i]) * b) % modulus
                if total > modulus:
                    break
            if total < modulus or (strict and total == modulus):
                ok = False
                break
        if ok:
            out.append(eta)
    return out


def minimal_torsion_rows(w, mode, torsion_cap=None):
    """All row-minimal mode-compatible mu-torsion vectors for w.

    Pairs (eta, mu) with 2 <= mu <= the torsion-order cap; every stacked
    2 x (n+1) matrix is almost free and of the requested class.
    """
    w = tuple(w)
    cap = torsion_cap if torsion_cap is not None else torsion_order_cap(w)
    out = []
    for mu in range(2, cap + 1):
        # int64 headroom for mu*w*c and w*eta*b products
        bound = mu * max(w) * max(mu, max(w))
        if bound * len(w) < _INT64_SAFE and prod(shift_bounds(w, mu)) > 512:
            survivors = _survivors_numpy(w, mu, mode)
        else:
            survivors = _survivors_python(w, mu, mode)
        for eta in survivors:
            eta = tuple(int(x) for x in eta)
            Q = DegreeMatrix(w, (TorsionRow(mu, eta),))
            if not is_almost_free(Q):
                continue
            cls = singtest.classify(Q)
            if not matches_mode(cls, mode):
                continue
            if is_row_minimal(w, mu, eta):
                out.append((eta, mu))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


# ---------------------------------------------------------------------------
# minimality sieve for stacked matrices


def _block_rows(Q: DegreeMatrix):
    return tuple(r.entries for r in Q.rows)


def _transformed_columns(Q: DegreeMatrix, delta, A):
    s = len(Q.rows)
    w = Q.weights
    factors = [r.modulus for r in Q.rows]
    cols = []
    for i in range(len(w)):
        e = [Q.rows[l].entries[i] for l in range(s)]
        cols.append(tuple(
            (sum(A[l][t] * e[t] for t in range(s)) + w[i] * delta.lifts[l])
            % factors[l]
            for l in range(s)
        ))
    return cols


def _weight_blocks(w):
    blocks = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] != w[start]:
            blocks.append((start, i))
            start = i
    return blocks


def matrix_row_minimal(Q: DegreeMatrix, stabilizer=None,
                       order_cap=abelian.AUTOMORPHISM_ORDER_CAP) -> bool:
    """Least in its orbit under automorphisms fixing the weight row."""
    if not Q.rows:
        return True
    base = _block_rows(Q)
    stab = stabilizer if stabilizer is not None else \
        abelian.weight_fixing_automorphisms(Q.group, order_cap)
    ncol = len(Q.weights)
    s = len(Q.rows)
    for delta, A in stab:
        cols = _transformed_columns(Q, delta, A)
        rows = tuple(tuple(cols[i][l] for i in range(ncol)) for l in range(s))
        if rows < base:
            return False
    return True


def minimal_representative(Q: DegreeMatrix,
                           order_cap=abelian.AUTOMORPHISM_ORDER_CAP) -> DegreeMatrix:
    """Least matrix in the full equivalence orbit (automorphisms and column
    permutations fixing the weight vector); idempotent."""
    if not Q.rows:
        return Q
    stab = abelian.weight_fixing_automorphisms(Q.group, order_cap)
    blocks = _weight_blocks(Q.weights)
    ncol = len(Q.weights)
    s = len(Q.rows)
    best = None
    for delta, A in stab:
        cols = _transformed_columns(Q, delta, A)
        order = []
        for lo, hi in blocks:
            order.extend(sorted(range(lo, hi), key=lambda i: cols[i]))
        rows = tuple(tuple(cols[i][l] for i in order) for l in range(s))
        if best is None or rows < best:
            best = rows
    factors = [r.modulus for r in Q.rows]
    return DegreeMatrix(Q.weights,
                        tuple(TorsionRow(m, r) for m, r in zip(factors, best)))


# ---------------------------------------------------------------------------
# the recursion over stacked torsion rows


@dataclass(frozen=True)
class ClassificationRecord:
    matrix: DegreeMatrix
    sing: SingularityClass
    depth: int

    def sort_key(self):
        return (self.matrix.weights, self.matrix.signature())


@dataclass
class ClassifyOptions:
    h_cap: int | None = None
    ratio_prune: bool = True
    jobs: int = 1
    weight_vectors: Sequence | None = None
    aut_cap: int = abelian.AUTOMORPHISM_ORDER_CAP
    progress: Callable | None = None


def classify_weight_vector(w, mode, aut_cap=abelian.AUTOMORPHISM_ORDER_CAP):
    """All minimal degree matrices over one weight vector, every depth."""
    w = tuple(w)
    Q0 = DegreeMatrix(w)
    cls0 = singtest.classify(Q0)
    if not matches_mode(cls0, mode):
        raise ValidationError(f"weight vector {w} is not {mode}")
    records = [ClassificationRecord(Q0, cls0, 0)]
    n = Q0.dim
    cap = torsion_order_cap(w)
    if cap < 2 or n < 2:
        return records
    pool0 = minimal_torsion_rows(w, mode, cap)
    level = {Q0: pool0}
    for depth in range(1, n):
        reps = set()
        for Q, pool in level.items():
            last = Q.rows[-1].modulus if Q.rows else None
            order = Q.group.order
            for eta, mu in pool:
                if last is not None and last % mu:
                    continue
                if order * mu > cap:
                    continue
                stack = Q.stack(mu, eta)
                if not is_almost_free(stack):
                    continue
                if not matches_mode(singtest.classify(stack), mode):
                    continue
                if not matrix_row_minimal(stack, order_cap=aut_cap):
                    continue
                reps.add(minimal_representative(stack, order_cap=aut_cap))
        if not reps:
            break
        last_depth = depth == n - 1
        next_level = {}
        for rep in sorted(reps, key=lambda q: q.signature()):
            parent = rep.drop_last_row()
            parent_pool = level.get(parent)
            if parent_pool is None:
                raise FanoForgeError(
                    "internal error: prefix of a minimal matrix not minimal")
            mu = rep.rows[-1].modulus
            pool = []
            if not last_depth:
                for eta2, mu2 in parent_pool:
                    if mu % mu2:
                        continue
                    if rep.group.order * mu2 > cap:
                        continue
                    st = rep.stack(mu2, eta2)
                    if not is_almost_free(st):
                        continue
                    if not matches_mode(singtest.classify(st), mode):
                        continue
                    if not matrix_row_minimal(st, order_cap=aut_cap):
                        continue
                    pool.append((eta2, mu2))
            next_level[rep] = pool
            records.append(ClassificationRecord(rep, singtest.classify(rep), depth))
        level = next_level
    return records


def _shard_worker(args):
    w, mode, aut_cap = args
    return classify_weight_vector(w, mode, aut_cap)


def classify_all(n, mode, options: ClassifyOptions | None = None):
    """One record per isomorphism class, deterministically ordered."""
    opts = options or ClassifyOptions()
    if opts.weight_vectors is not None:
        ws = []
        for w in opts.weight_vectors:
            w = tuple(int(x) for x in w)
            if len(w) != n + 1:
                raise ValidationError(f"weight vector {w} has wrong length")
            if not validate_weight_vector(w):
                raise ValidationError(f"invalid weight vector {w}")
            if matches_mode(_wps_class(w), mode):
                ws.append(w)
        ws = sorted(set(ws))
    else:
        ws = enumerate_weight_vectors(n, mode, opts.h_cap, opts.ratio_prune)
    records = []
    if opts.jobs and opts.jobs > 1 and len(ws) > 1:
        with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
            for i, shard in enumerate(
                    pool.map(_shard_worker,
                             [(w, mode, opts.aut_cap) for w in ws],
                             chunksize=max(1, len(ws) // (8 * opts.jobs)))):
                records.extend(shard)
                if opts.progress:
                    opts.progress(ws[i], len(shard))
    else:
        for w in ws:
            shard = classify_weight_vector(w, mode, opts.aut_cap)
            records.extend(shard)
            if opts.progress:
                opts.progress(w, len(shard))
    records.sort(key=ClassificationRecord.sort_key)
    return records
