"""Adjoint Lie algebra data: structure constants, coroots, basis matrices.

Structure constants come from the extraspecial-pair recursion.  Positive sums
are processed in the frozen root order; the pair (alpha, beta) with minimal
alpha among all positive decompositions of gamma gets N = p + 1 where p is
the chain-down length, every other positive pair is resolved through the
four-root identity against the extraspecial one, and mixed-sign pairs reduce
to positive ones through the triangle relations.  All divisions run in
Fraction arithmetic and must land on integers, which the tests enforce
together with |N| = p + 1 and the Jacobi identity.

Basis order for the adjoint matrices is the root list of the system followed
by the Cartan elements h_1..h_l, so dimension is |roots| + rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Optional, Tuple

from chevalley.linalg import Matrix, mat_map, mat_mul, mat_sub, matrix, ring_nullspace, ring_solve
from chevalley.rings import Ring, ZRing, ring_make
from chevalley.roots import Root, RootSystem, build_root_system

ZZ = ring_make("Z")


def _add(r: Root, s: Root) -> Root:
    return tuple(x + y for x, y in zip(r, s))


def _neg(r: Root) -> Root:
    return tuple(-x for x in r)


def _is_zero(r: Root) -> bool:
    return all(x == 0 for x in r)


class StructureConstants:
    """The table N_{r,s} for all root pairs with r + s a root."""

    def __init__(self, system: RootSystem):
        self.system = system
        self._pos_order = {r: i for i, r in enumerate(system.positives)}
        self._memo: Dict[Tuple[Root, Root], int] = {}
        self._extraspecial: Dict[Root, Tuple[Root, Root]] = {}
        for gamma in system.positives:
            pairs = self._special_pairs(gamma)
            if pairs:
                self._extraspecial[gamma] = pairs[0]

    def _special_pairs(self, gamma: Root):
        out = []
        for xi in self.system.positives:
            eta = tuple(g - x for g, x in zip(gamma, xi))
            if eta in self._pos_order and self._pos_order[xi] < self._pos_order[eta]:
                out.append((xi, eta))
        out.sort(key=lambda p: self._pos_order[p[0]])
        return out

    def chain_down(self, alpha: Root, beta: Root) -> int:
        """Largest p with beta - p*alpha a root."""
        p = 0
        cur = beta
        while True:
            cur = tuple(c - a for c, a in zip(cur, alpha))
            if self.system.is_root(cur):
                p += 1
            else:
                return p

    def value(self, r: Root, s: Root) -> int:
        total = _add(r, s)
        if _is_zero(total) or not self.system.is_root(total):
            return 0
        key = (r, s)
        if key in self._memo:
            return self._memo[key]
        out = self._compute(r, s, total)
        self._memo[key] = out
        return out

    def _norm(self, r: Root) -> int:
        return self.system.norm2(r)

    def _compute(self, r: Root, s: Root, total: Root) -> int:
        pos = self._pos_order
        if r in pos and s in pos:
            if pos[r] > pos[s]:
                return -self.value(s, r)
            alpha, beta = self._extraspecial[total]
            if (r, s) == (alpha, beta):
                return self.chain_down(alpha, beta) + 1
            xi, eta = r, s
            acc = Fraction(0)
            d1 = _add(eta, _neg(alpha))
            if self.system.is_root(d1):
                acc += Fraction(self.value(eta, _neg(alpha)) * self.value(xi, _neg(beta)),
                                self._norm(d1))
            d2 = _add(xi, _neg(alpha))
            if self.system.is_root(d2):
                acc += Fraction(self.value(_neg(alpha), xi) * self.value(eta, _neg(beta)),
                                self._norm(d2))
            n_extra = self.value(alpha, beta)
            out = Fraction(self._norm(total)) * acc / n_extra
            assert out.denominator == 1, (r, s, out)
            return int(out)
        if r not in pos and s not in pos:
            return -self.value(_neg(r), _neg(s))
        if r not in pos:  # r negative, s positive
            return -self.value(s, r)
        # r positive, s negative
        if total in pos:
            b = _neg(s)
            out = Fraction(self._norm(total) * self.value(total, b), self._norm(r))
        else:
            c = _neg(total)
            out = Fraction(self._norm(c) * self.value(c, r), self._norm(s))
        assert out.denominator == 1, (r, s, out)
        return int(out)


@dataclass
class AdjointAlgebra:
    """Adjoint basis matrices over Z plus lookup helpers."""

    system: RootSystem
    constants: StructureConstants
    coroots: Dict[Root, Tuple[int, ...]]
    x_mats: Dict[Root, Matrix]
    h_mats: Tuple[Matrix, ...]
    dim: int
    _divided: Dict[Root, Tuple[Matrix, ...]] = field(default_factory=dict)
    _witness: Dict[Root, Optional[Tuple[Root, Root, int]]] = field(default_factory=dict)
    _slots: Dict[Root, Tuple[Tuple[int, int], int]] = field(default_factory=dict)

    # --- basic lookups ----------------------------------------------------

    def n_const(self, r: Root, s: Root) -> int:
        return self.constants.value(r, s)

    def x_matrix(self, root: Root, ring: Ring | None = None) -> Matrix:
        m = self.x_mats[root]
        if ring is None or isinstance(ring, ZRing):
            return m
        return mat_map(ring.from_int, m)

    def h_matrix(self, j: int, ring: Ring | None = None) -> Matrix:
        m = self.h_mats[j]
        if ring is None or isinstance(ring, ZRing):
            return m
        return mat_map(ring.from_int, m)

    # --- divided powers -----------------------------------------------------

    def divided_powers(self, root: Root) -> Tuple[Matrix, ...]:
        """(X, X^2/2, ...) up to nilpotency, exact over Z."""
        if root in self._divided:
            return self._divided[root]
        x = self.x_mats[root]
        out = [x]
        power = x
        k = 1
        while True:
            power = mat_mul(ZZ, power, x)
            k += 1
            if all(all(v == 0 for v in row) for row in power):
                break
            f = factorial(k)
            assert all(v % f == 0 for row in power for v in row), root
            out.append(tuple(tuple(v // f for v in row) for row in power))
            assert k <= 3, root
        self._divided[root] = tuple(out)
        return self._divided[root]

    def nilpotency(self, root: Root) -> int:
        return len(self.divided_powers(root)) + 1

    def unipotent_z(self, root: Root) -> Matrix:
        """exp(X) over Z, the value of the root element at parameter 1."""
        n = self.dim
        rows = [[int(i == j) for j in range(n)] for i in range(n)]
        for dp in self.divided_powers(root):
            for i in range(n):
                for j in range(n):
                    rows[i][j] += dp[i][j]
        return matrix(rows)

    # --- recovery witness for rings without 1/2 -----------------------------

    def half_square_witness(self, root: Root):
        """A pair (gamma, beta, c) with gamma + beta = root and
        c * ((exp X_gamma - E)(exp X_beta - E))^2 = X_root^2 / 2 over Z,
        or None when no such pair exists."""
        if root in self._witness:
            return self._witness[root]
        target = self.divided_powers(root)[1] if self.nilpotency(root) > 2 else None
        found = None
        if target is not None:
            e = matrix([[int(i == j) for j in range(self.dim)] for i in range(self.dim)])
            for gamma in self.system.roots:
                beta = tuple(r - g for r, g in zip(root, gamma))
                if not self.system.is_root(beta) or beta == _neg(gamma):
                    continue
                ug = mat_sub(ZZ, self.unipotent_z(gamma), e)
                ub = mat_sub(ZZ, self.unipotent_z(beta), e)
                prod = mat_mul(ZZ, ug, ub)
                t = mat_mul(ZZ, prod, prod)
                for c in (1, -1):
                    if tuple(tuple(c * v for v in row) for row in t) == target:
                        found = (gamma, beta, c)
                        break
                if found:
                    break
        self._witness[root] = found
        return found

    # --- coordinates ---------------------------------------------------------

    def _slot(self, root: Root):
        """A matrix slot where only ad(x_root) has a nonzero entry, unit-valued."""
        if root in self._slots:
            return self._slots[root]
        sysm = self.system
        found = None
        for beta in sysm.roots:
            total = _add(root, beta)
            if sysm.is_root(total) and abs(self.n_const(root, beta)) == 1:
                found = ((sysm.root_index(total), sysm.root_index(beta)),
                         self.n_const(root, beta))
                break
        if found is None:
            for j in range(sysm.rank):
                p = sysm.pairing(root, sysm.simple(j))
                if abs(p) == 1:
                    found = ((sysm.root_index(root), len(sysm.roots) + j), -p)
                    break
        assert found is not None, root
        self._slots[root] = found
        return found

    def span_coordinates(self, ring: Ring, m: Matrix):
        """Write m as a combination of basis matrices over ring.

        Returns (coeffs, exact) where coeffs maps basis keys (roots and
        h indices) to ring elements, or None when m is not in the span.
        exact is False when the Cartan part was only determined up to the
        kernel of the pairing matrix.
        """
        sysm = self.system
        coeffs = {}
        for root in sysm.roots:
            (i, j), unit = self._slot(root)
            val = m[i][j]
            coeffs[root] = ring.mul(val, ring.from_int(unit))  # unit is +-1
        residue = m
        for root in sysm.roots:
            c = coeffs[root]
            if c != ring.zero:
                residue = mat_sub(ring, residue,
                                  mat_map(lambda v: ring.mul(c, ring.from_int(v)),
                                          self.x_mats[root]))
        pair_rows = matrix([[sysm.pairing(beta, sysm.simple(j)) for j in range(sysm.rank)]
                            for beta in sysm.roots])
        target = tuple(residue[sysm.root_index(beta)][sysm.root_index(beta)]
                       for beta in sysm.roots)
        if isinstance(ring, ZRing):
            sol = _solve_z(pair_rows, target)
            exact = True
        else:
            pr = mat_map(ring.from_int, pair_rows)
            sol = ring_solve(ring, pr, target)
            exact = sol is not None and not any(
                any(v != ring.zero for v in g) for g in ring_nullspace(ring, pr))
        if sol is None:
            return None
        for j in range(sysm.rank):
            coeffs[j] = sol[j]
        rebuilt = self.combination(ring, coeffs)
        if rebuilt != m:
            return None
        return coeffs, exact

    def combination(self, ring: Ring, coeffs: dict) -> Matrix:
        n = self.dim
        rows = [[ring.zero] * n for _ in range(n)]
        for key, c in coeffs.items():
            if c == ring.zero:
                continue
            base = self.x_mats[key] if isinstance(key, tuple) else self.h_mats[key]
            for i in range(n):
                for j in range(n):
                    v = base[i][j]
                    if v:
                        rows[i][j] = ring.add(rows[i][j], ring.mul(c, ring.from_int(v)))
        return matrix(rows)

    # --- abstract bracket, for the Jacobi checks ------------------------------

    def bracket_basis(self, a, b) -> dict:
        """[e_a, e_b] as a dict over basis keys; keys are roots or h indices."""
        sysm = self.system
        if isinstance(a, tuple) and isinstance(b, tuple):
            total = _add(a, b)
            if _is_zero(total):
                return {j: c for j, c in enumerate(self.coroots[a]) if c}
            if sysm.is_root(total):
                return {total: self.n_const(a, b)}
            return {}
        if isinstance(a, tuple):  # [x_a, h_j]
            p = sysm.pairing(a, sysm.simple(b))
            return {a: -p} if p else {}
        if isinstance(b, tuple):  # [h_i, x_b]
            p = sysm.pairing(b, sysm.simple(a))
            return {b: p} if p else {}
        return {}

    def bracket_dict(self, u: dict, v: dict) -> dict:
        out: dict = {}
        for (ka, ca), (kb, cb) in itertools.product(u.items(), v.items()):
            for k, c in self.bracket_basis(ka, kb).items():
                val = out.get(k, 0) + ca * cb * c
                if val:
                    out[k] = val
                elif k in out:
                    del out[k]
        return out


def _solve_z(a: Matrix, b) -> Optional[tuple]:
    """Exact integer solution of a full-column-rank system, or None."""
    m, n = len(a), len(a[0])
    work = [[Fraction(x) for x in row] + [Fraction(v)] for row, v in zip(a, b)]
    row = 0
    pivots = []
    for c in range(n):
        piv = next((r for r in range(row, m) if work[r][c] != 0), None)
        if piv is None:
            continue
        work[row], work[piv] = work[piv], work[row]
        scale = work[row][c]
        work[row] = [x / scale for x in work[row]]
        for r in range(m):
            if r != row and work[r][c] != 0:
                f = work[r][c]
                work[r] = [x - f * y for x, y in zip(work[r], work[row])]
        pivots.append(c)
        row += 1
    sol = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        sol[c] = work[r][n]
    for r in range(row, m):
        if work[r][n] != 0:
            return None
    # consistency on all rows
    for orig, v in zip(a, b):
        if sum(Fraction(x) * s for x, s in zip(orig, sol)) != v:
            return None
    if any(s.denominator != 1 for s in sol):
        return None
    return tuple(int(s) for s in sol)


def _coroot_coords(system: RootSystem, alpha: Root) -> Tuple[int, ...]:
    out = []
    na = system.norm2(alpha)
    for i in range(system.rank):
        c = Fraction(alpha[i] * system.norm2(system.simple(i)), na)
        assert c.denominator == 1, (alpha, i)
        out.append(int(c))
    return tuple(out)


@lru_cache(maxsize=None)
def build_algebra(kind: str, rank: int) -> AdjointAlgebra:
    system = build_root_system(kind, rank)
    consts = StructureConstants(system)
    nroots = len(system.roots)
    dim = nroots + system.rank
    coroots = {r: _coroot_coords(system, r) for r in system.roots}

    x_mats: Dict[Root, Matrix] = {}
    for alpha in system.roots:
        rows = [[0] * dim for _ in range(dim)]
        for beta in system.roots:
            col = system.root_index(beta)
            if beta == _neg(alpha):
                for j, c in enumerate(coroots[alpha]):
                    rows[nroots + j][col] = c
                continue
            total = _add(alpha, beta)
            if system.is_root(total):
                rows[system.root_index(total)][col] = consts.value(alpha, beta)
        for j in range(system.rank):
            p = system.pairing(alpha, system.simple(j))
            if p:
                rows[system.root_index(alpha)][nroots + j] = -p
        x_mats[alpha] = matrix(rows)

    h_mats = []
    for j in range(system.rank):
        rows = [[0] * dim for _ in range(dim)]
        for beta in system.roots:
            i = system.root_index(beta)
            rows[i][i] = system.pairing(beta, system.simple(j))
        h_mats.append(matrix(rows))

    return AdjointAlgebra(system, consts, coroots, x_mats, tuple(h_mats), dim)


def algebra_for(system: RootSystem) -> AdjointAlgebra:
    return build_algebra(system.kind, system.rank)


# --------------------------------------------------------------------------
# the (l+1) by (l+1) model of the A series, used to tell inner from outer


@dataclass(frozen=True)
class ASeriesModel:
    """x for a positive root with support a..b maps to the matrix unit
    (a, b+1), its negative to (b+1, a), and h_j to E_jj - E_(j+1)(j+1)."""

    system: RootSystem
    size: int
    places: dict  # root -> (i, j)

    def basis_matrix(self, ring: Ring, key) -> Matrix:
        n = self.size
        rows = [[ring.zero] * n for _ in range(n)]
        if isinstance(key, tuple):
            i, j = self.places[key]
            rows[i][j] = ring.one
        else:
            rows[key][key] = ring.one
            rows[key + 1][key + 1] = ring.neg(ring.one)
        return matrix(rows)

    def combination(self, ring: Ring, coeffs: dict) -> Matrix:
        n = self.size
        rows = [[ring.zero] * n for _ in range(n)]
        for key, c in coeffs.items():
            if isinstance(key, tuple):
                i, j = self.places[key]
                rows[i][j] = ring.add(rows[i][j], c)
            else:
                rows[key][key] = ring.add(rows[key][key], c)
                rows[key + 1][key + 1] = ring.sub(rows[key + 1][key + 1], c)
        return matrix(rows)


@lru_cache(maxsize=None)
def a_series_model(rank: int) -> ASeriesModel:
    system = build_root_system("A", rank)
    alg = algebra_for(system)
    places = {}
    for root in system.roots:
        support = [i for i, c in enumerate(root) if c != 0]
        a, b = min(support), max(support)
        if root[support[0]] > 0:
            places[root] = (a, b + 1)
        else:
            places[root] = (b + 1, a)
    model = ASeriesModel(system, rank + 1, places)
    # the map must transport the bracket exactly, including all signs
    def as_mat(key):
        return model.basis_matrix(ZZ, key)
    keys = list(system.roots) + list(range(rank))
    for a in keys:
        for b in keys:
            ma, mb = as_mat(a), as_mat(b)
            lhs = mat_sub(ZZ, mat_mul(ZZ, ma, mb), mat_mul(ZZ, mb, ma))
            expect = alg.bracket_basis(a, b)
            rhs = model.combination(ZZ, {k: v for k, v in expect.items()})
            assert lhs == rhs, (a, b)
    return model
