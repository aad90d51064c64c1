"""Exact matrix arithmetic over ring handles.

Matrices are tuples of row tuples of ring elements, so they hash and compare
exactly.  Generic operations go through the ring handle; solving, kernels and
inversion first split the ring into local factors, then run a Smith-style
diagonalization per factor.  Over Z/p^k the pivot of minimal p-valuation keeps
every elimination step exact, and the inner loops run on numpy int64 arrays.
Field tables get a plain Gaussian pass in Python; they only appear at sizes
where that is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from chevalley.rings import FieldTable, Ring, ZMod, ZRing, crt_split

Matrix = tuple  # tuple of row tuples


# --------------------------------------------------------------------------
# generic ops


def matrix(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(ring: Ring, n: int) -> Matrix:
    z, o = ring.zero, ring.one
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def zero_matrix(ring: Ring, m: int, n: int) -> Matrix:
    z = ring.zero
    return tuple((z,) * n for _ in range(m))


def mat_add(ring: Ring, a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(ring.add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(ring: Ring, a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(ring.sub(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_neg(ring: Ring, a: Matrix) -> Matrix:
    return tuple(tuple(ring.neg(x) for x in row) for row in a)


def mat_scale(ring: Ring, c, a: Matrix) -> Matrix:
    return tuple(tuple(ring.mul(c, x) for x in row) for row in a)


def mat_mul(ring: Ring, a: Matrix, b: Matrix) -> Matrix:
    if isinstance(ring, ZMod) and len(a) >= 6:
        an = np.array(a, dtype=np.int64)
        bn = np.array(b, dtype=np.int64)
        cn = (an @ bn) % ring.n
        return tuple(tuple(int(x) for x in row) for row in cn)
    n = len(b)
    bt = tuple(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = ring.zero
            for x, y in zip(row, col):
                if x != ring.zero and y != ring.zero:
                    acc = ring.add(acc, ring.mul(x, y))
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def mat_vec(ring: Ring, a: Matrix, v: Sequence) -> tuple:
    out = []
    for row in a:
        acc = ring.zero
        for x, y in zip(row, v):
            if x != ring.zero and y != ring.zero:
                acc = ring.add(acc, ring.mul(x, y))
        out.append(acc)
    return tuple(out)


def mat_pow(ring: Ring, a: Matrix, n: int) -> Matrix:
    out = identity(ring, len(a))
    base = a
    while n:
        if n & 1:
            out = mat_mul(ring, out, base)
        base = mat_mul(ring, base, base)
        n >>= 1
    return out


def mat_map(fn, a: Matrix) -> Matrix:
    return tuple(tuple(fn(x) for x in row) for row in a)


def is_identity(ring: Ring, a: Matrix) -> bool:
    return a == identity(ring, len(a))


# --------------------------------------------------------------------------
# integer matrices


def det_bareiss(a: Matrix) -> int:
    """Fraction-free determinant of an integer matrix."""
    n = len(a)
    m = [list(map(int, row)) for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def invert_z(a: Matrix) -> Matrix:
    """Inverse of an integer matrix with unit determinant."""
    n = len(a)
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if work[r][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular over Q")
        work[c], work[piv] = work[piv], work[c]
        scale = work[c][c]
        work[c] = [x / scale for x in work[c]]
        for r in range(n):
            if r != c and work[r][c] != 0:
                f = work[r][c]
                work[r] = [x - f * y for x, y in zip(work[r], work[c])]
    inv = []
    for r in range(n):
        row = work[r][n:]
        if any(x.denominator != 1 for x in row):
            raise ValueError("inverse is not integral")
        inv.append(tuple(int(x) for x in row))
    return tuple(inv)


# --------------------------------------------------------------------------
# diagonalization over a local ring


@dataclass(frozen=True)
class LocalDiag:
    """P @ A @ Q = D with P, Q invertible and D supported on (i, i) pivots.

    pivots lists (index, valuation); over a field every valuation is 0.
    """

    ring: Ring
    p_mat: Matrix
    q_mat: Matrix
    diag: tuple          # pivot values d_i, one per pivot
    pivots: tuple        # (index, valuation) pairs
    shape: tuple


def _local_diag_zmod(ring: ZMod, a: Matrix) -> LocalDiag:
    p, k = ring.residue_char, ring.nil_degree
    mod = ring.n
    m, n = len(a), len(a[0]) if a else 0
    A = np.array([[int(x) for x in row] for row in a], dtype=np.int64) % mod
    P = np.eye(m, dtype=np.int64)
    Q = np.eye(n, dtype=np.int64)

    def val(x: int) -> int:
        if x == 0:
            return k
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        return v

    pivots = []
    t = 0
    while t < min(m, n):
        best, bv = None, k
        for i in range(t, m):
            for j in range(t, n):
                v = val(int(A[i, j]))
                if v < bv:
                    best, bv = (i, j), v
                    if v == 0:
                        break
            if bv == 0:
                break
        if best is None:
            break
        bi, bj = best
        if bi != t:
            A[[t, bi]] = A[[bi, t]]
            P[[t, bi]] = P[[bi, t]]
        if bj != t:
            A[:, [t, bj]] = A[:, [bj, t]]
            Q[:, [t, bj]] = Q[:, [bj, t]]
        piv = int(A[t, t])
        unit = piv // (p ** bv)
        u_inv = pow(unit, -1, mod)
        A[t] = (A[t] * u_inv) % mod
        P[t] = (P[t] * u_inv) % mod
        # clear the column below/above with exact multipliers
        pv = p ** bv
        col = A[:, t].copy()
        col[t] = 0
        mult = col // pv
        if mult.any():
            A -= np.outer(mult, A[t])
            A %= mod
            P -= np.outer(mult, P[t])
            P %= mod
        row = A[t].copy()
        row[t] = 0
        multc = row // pv
        if multc.any():
            A -= np.outer(A[:, t], multc)
            A %= mod
            Q -= np.outer(Q[:, t], multc)
            Q %= mod
        pivots.append((t, bv))
        t += 1
    diag = tuple(int(A[i, i]) for i, _ in pivots)
    return LocalDiag(ring,
                     tuple(tuple(int(x) for x in r) for r in P),
                     tuple(tuple(int(x) for x in r) for r in Q),
                     diag, tuple(pivots), (m, n))


def _local_diag_field(ring: Ring, a: Matrix) -> LocalDiag:
    m, n = len(a), len(a[0]) if a else 0
    A = [list(row) for row in a]
    P = [list(row) for row in identity(ring, m)]
    Q = [list(row) for row in identity(ring, n)]
    zero = ring.zero
    pivots = []
    t = 0
    while t < min(m, n):
        best = next(((i, j) for i in range(t, m) for j in range(t, n)
                     if A[i][j] != zero), None)
        if best is None:
            break
        bi, bj = best
        A[t], A[bi] = A[bi], A[t]
        P[t], P[bi] = P[bi], P[t]
        if bj != t:
            for row in A:
                row[t], row[bj] = row[bj], row[t]
            for row in Q:
                row[t], row[bj] = row[bj], row[t]
        u_inv = ring.inv(A[t][t])
        A[t] = [ring.mul(u_inv, x) for x in A[t]]
        P[t] = [ring.mul(u_inv, x) for x in P[t]]
        for i in range(m):
            if i != t and A[i][t] != zero:
                f = A[i][t]
                A[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(A[i], A[t])]
                P[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(P[i], P[t])]
        for j in range(n):
            if j != t and A[t][j] != zero:
                f = A[t][j]
                for row in A:
                    row[j] = ring.sub(row[j], ring.mul(row[t], f))
                for row in Q:
                    row[j] = ring.sub(row[j], ring.mul(row[t], f))
        pivots.append((t, 0))
        t += 1
    diag = tuple(A[i][i] for i, _ in pivots)
    return LocalDiag(ring, matrix(P), matrix(Q), diag, tuple(pivots), (m, n))


def local_diag(ring: Ring, a: Matrix) -> LocalDiag:
    if isinstance(ring, ZMod) and ring.is_local:
        return _local_diag_zmod(ring, a)
    if isinstance(ring, FieldTable):
        return _local_diag_field(ring, a)
    raise ValueError(f"{ring.descriptor} is not a supported local ring")


def local_solve(ring: Ring, a: Matrix, b: Sequence):
    """One solution of A x = b over a local ring, or None."""
    d = local_diag(ring, a)
    m, n = d.shape
    pb = mat_vec(ring, d.p_mat, b)
    y = [ring.zero] * n
    pivot_rows = {i for i, _ in d.pivots}
    if isinstance(ring, ZMod):
        p, k = ring.residue_char, ring.nil_degree
        for (i, v), dv in zip(d.pivots, d.diag):
            c = int(pb[i])
            if c % (p ** v) != 0:
                return None
            y[i] = (c // (p ** v)) % ring.n
    else:
        for (i, _), dv in zip(d.pivots, d.diag):
            y[i] = ring.mul(ring.inv(dv), pb[i])
    for i in range(m):
        if i not in pivot_rows and pb[i] != ring.zero:
            return None
    return mat_vec(ring, d.q_mat, y)


def local_nullspace(ring: Ring, a: Matrix) -> list:
    """Generators of {x : A x = 0} over a local ring."""
    d = local_diag(ring, a)
    n = d.shape[1]
    qt = tuple(zip(*d.q_mat))  # columns of Q
    gens = []
    pivot_cols = {}
    for (i, v) in d.pivots:
        pivot_cols[i] = v
    for j in range(n):
        if j not in pivot_cols:
            gens.append(tuple(qt[j]))
        else:
            v = pivot_cols[j]
            if v > 0:
                scale = ring.from_int(ring.residue_char ** (ring.nil_degree - v))
                gens.append(tuple(ring.mul(scale, x) for x in qt[j]))
    return gens


def local_invert(ring: Ring, a: Matrix):
    """Inverse of a square matrix over a local ring, or None."""
    n = len(a)
    d = local_diag(ring, a)
    if len(d.pivots) < n or any(v > 0 for _, v in d.pivots):
        return None
    dinv = identity(ring, n)
    dinv = tuple(tuple(ring.inv(d.diag[i]) if i == j and i < len(d.diag) else x
                       for j, x in enumerate(row)) for i, row in enumerate(dinv))
    return mat_mul(ring, mat_mul(ring, d.q_mat, dinv), d.p_mat)


# --------------------------------------------------------------------------
# composite rings via CRT


def _per_factor(ring: Ring):
    split = crt_split(ring)
    return split


def ring_solve(ring: Ring, a: Matrix, b: Sequence):
    if isinstance(ring, ZRing):
        raise ValueError("solving over Z is not supported; use a finite ring")
    split = _per_factor(ring)
    if len(split.factors) == 1 and split.factors[0].ring == ring:
        return local_solve(ring, a, b)
    parts = []
    for f in split.factors:
        af = mat_map(f.project, a)
        bf = tuple(f.project(x) for x in b)
        sol = local_solve(f.ring, af, bf)
        if sol is None:
            return None
        parts.append(sol)
    n = len(a[0])
    return tuple(_recombine(ring, split, [p[i] for p in parts]) for i in range(n))


def _recombine(ring: Ring, split, values):
    out = ring.zero
    for f, v in zip(split.factors, values):
        out = ring.add(out, f.embed(v))
    return out


def ring_nullspace(ring: Ring, a: Matrix) -> list:
    if isinstance(ring, ZRing):
        raise ValueError("kernels over Z are not supported; use a finite ring")
    split = _per_factor(ring)
    if len(split.factors) == 1 and split.factors[0].ring == ring:
        return local_nullspace(ring, a)
    gens = []
    for f in split.factors:
        af = mat_map(f.project, a)
        for g in local_nullspace(f.ring, af):
            gens.append(tuple(f.embed(x) for x in g))
    return gens


def ring_invert(ring: Ring, a: Matrix):
    if isinstance(ring, ZRing):
        return invert_z(a)
    split = _per_factor(ring)
    if len(split.factors) == 1 and split.factors[0].ring == ring:
        return local_invert(ring, a)
    parts = []
    for f in split.factors:
        af = mat_map(f.project, a)
        inv = local_invert(f.ring, af)
        if inv is None:
            return None
        parts.append(inv)
    n = len(a)
    return tuple(tuple(_recombine(ring, split, [p[i][j] for p in parts])
                       for j in range(n)) for i in range(n))


def is_invertible(ring: Ring, a: Matrix) -> bool:
    if isinstance(ring, ZRing):
        return det_bareiss(a) in (1, -1)
    return ring_invert(ring, a) is not None
