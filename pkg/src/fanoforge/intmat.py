"""Exact integer matrix arithmetic: Smith and Hermite normal forms.

Matrices are plain lists of lists of Python ints, so every routine is
arbitrary precision by construction.  Nothing in this module (or anywhere
else in the package) touches floating point.
"""

from __future__ import annotations

from math import gcd

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def copy_matrix(M: Matrix) -> Matrix:
    return [row[:] for row in M]


def transpose(M: Matrix) -> Matrix:
    return [list(col) for col in zip(*M)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    bt = transpose(B)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in A]


def matvec(A: Matrix, v: list[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in A]


def det(M: Matrix) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return 1
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    A = copy_matrix(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M, src, dst, q):
    # row dst += q * row src
    rs, rd = M[src], M[dst]
    for k in range(len(rd)):
        rd[k] += q * rs[k]


def _add_col(M, src, dst, q):
    for row in M:
        row[dst] += q * row[src]


def _scale_row(M, i, s):
    M[i] = [s * x for x in M[i]]


def smith_decomposition(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U*M*V = D diagonal, d_i | d_{i+1}, U,V unimodular.

    Diagonal entries are non-negative; trailing entries may be zero when the
    matrix is rank deficient.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    A = copy_matrix(M)
    U = identity(m)
    V = identity(n)

    def pivot_search(t):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a != 0 and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
        return best

    t = 0
    while t < min(m, n):
        found = pivot_search(t)
        if found is None:
            break
        _, pi, pj = found
        if pi != t:
            _swap_rows(A, t, pi)
            _swap_rows(U, t, pi)
        if pj != t:
            _swap_cols(A, t, pj)
            _swap_cols(V, t, pj)
        while True:
            # clear the column below the pivot
            dirty = False
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    _add_row(A, t, i, -q)
                    _add_row(U, t, i, -q)
                    if A[i][t] != 0:
                        # remainder is a smaller pivot candidate
                        _swap_rows(A, t, i)
                        _swap_rows(U, t, i)
                        dirty = True
            if dirty:
                continue
            # clear the row right of the pivot
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    _add_col(A, t, j, -q)
                    _add_col(V, t, j, -q)
                    if A[t][j] != 0:
                        _swap_cols(A, t, j)
                        _swap_cols(V, t, j)
                        dirty = True
            if not dirty and all(A[i][t] == 0 for i in range(t + 1, m)):
                break
        if A[t][t] < 0:
            _scale_row(A, t, -1)
            _scale_row(U, t, -1)
        # force divisibility of the remaining block by the pivot
        p = A[t][t]
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % p != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            _add_row(A, offender, t, 1)
            _add_row(U, offender, t, 1)
            continue  # redo the same t with the enlarged pivot row
        t += 1

    D = zeros(m, n)
    for i in range(min(m, n)):
        D[i][i] = A[i][i]
    return U, D, V


def diagonal(D: Matrix) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def right_kernel_basis(M: Matrix) -> list[list[int]]:
    """Basis of the lattice {x : M x = 0}, as a list of column vectors."""
    m = len(M)
    n = len(M[0]) if m else 0
    if n == 0:
        return []
    _, D, V = smith_decomposition(M)
    d = diagonal(D)
    rank = sum(1 for x in d if x != 0)
    return [[V[i][j] for i in range(n)] for j in range(rank, n)]


def hermite_row_form(M: Matrix) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form (H, U) with U*M = H, det U = +-1.

    H is in row echelon shape with positive pivots and entries above each
    pivot reduced into [0, pivot).  H is the canonical representative of the
    row lattice of M under left multiplication by GL(Z).
    """
    m = len(M)
    n = len(M[0]) if m else 0
    A = copy_matrix(M)
    U = identity(m)
    r = 0
    for c in range(n):
        # bring the absolutely smallest nonzero entry of column c (rows >= r)
        # to row r and eliminate below it
        while True:
            piv = None
            for i in range(r, m):
                a = A[i][c]
                if a != 0 and (piv is None or abs(a) < abs(A[piv][c])):
                    piv = i
            if piv is None:
                break
            if piv != r:
                _swap_rows(A, r, piv)
                _swap_rows(U, r, piv)
            done = True
            for i in range(r + 1, m):
                if A[i][c] != 0:
                    q = A[i][c] // A[r][c]
                    _add_row(A, r, i, -q)
                    _add_row(U, r, i, -q)
                    if A[i][c] != 0:
                        done = False
            if done:
                break
        if r < m and A[r][c] != 0:
            if A[r][c] < 0:
                _scale_row(A, r, -1)
                _scale_row(U, r, -1)
            p = A[r][c]
            for i in range(r):
                q = A[i][c] // p  # floor division puts entry into [0, p)
                if q:
                    _add_row(A, r, i, -q)
                    _add_row(U, r, i, -q)
            r += 1
            if r == m:
                break
    return A, U


def primitive_vector(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return list(v)
    return [x // g for x in v]


def is_primitive(v: list[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1
