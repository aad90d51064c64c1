"""Elements of the adjoint Chevalley group over a ring.

An element carries its matrix, the matrix of its inverse (kept in lockstep so
no inversion is ever needed for word-built elements), and optionally the word
of generators that produced it.  Words use three token kinds:

    ("x", root, t)     root element at parameter t
    ("w", root, t)     Weyl representative, t a unit
    ("h", root, u)     semisimple element h_root(u), u a unit
    ("chi", units, None)  torus element for the character units_j^(beta_j)

The chi token exists because the adjoint torus is bigger than the span of the
h_root elements; conjugator words coming out of big-cell factorizations need
it.  Words are what certificates replay and what pushes through residue maps;
the matrix is what equality means.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

from chevalley.liealg import AdjointAlgebra, algebra_for, build_algebra
from chevalley.linalg import Matrix, identity, mat_map, mat_mul, matrix, ring_invert
from chevalley.rings import Ideal, Ring, RingMorphism, ZRing, ring_make
from chevalley.roots import Root

Token = Tuple


@dataclass(frozen=True)
class GroupElement:
    ring: Ring
    mat: Matrix
    inv_mat: Matrix
    word: Optional[Tuple[Token, ...]]

    def mul(self, other: "GroupElement") -> "GroupElement":
        w = None
        if self.word is not None and other.word is not None:
            w = self.word + other.word
        return GroupElement(self.ring,
                            mat_mul(self.ring, self.mat, other.mat),
                            mat_mul(self.ring, other.inv_mat, self.inv_mat),
                            w)

    def inv(self) -> "GroupElement":
        w = None
        if self.word is not None:
            w = tuple(_invert_token(self.ring, t) for t in reversed(self.word))
        return GroupElement(self.ring, self.inv_mat, self.mat, w)

    def conj_by(self, g: "GroupElement") -> "GroupElement":
        """g * self * g^-1."""
        return g.mul(self).mul(g.inv())

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.mat == other.mat

    def __hash__(self) -> int:
        return hash(self.mat)

    @property
    def is_identity(self) -> bool:
        ring = self.ring
        for i, row in enumerate(self.mat):
            for j, v in enumerate(row):
                if v != (ring.one if i == j else ring.zero):
                    return False
        return True


def _invert_token(ring: Ring, token: Token) -> Token:
    kind, root, t = token
    if kind == "x":
        return ("x", root, ring.neg(t))
    if kind == "w":
        return ("w", root, ring.neg(t))
    if kind == "chi":
        return ("chi", tuple(ring.inv(u) for u in root), None)
    return ("h", root, ring.inv(t))


def identity_element(alg: AdjointAlgebra, ring: Ring) -> GroupElement:
    e = identity(ring, alg.dim)
    return GroupElement(ring, e, e, ())


_DP_CACHE: dict = {}


def _divided_powers_over(alg: AdjointAlgebra, ring: Ring, root: Root):
    key = (alg.system.name, ring.descriptor, root)
    cached = _DP_CACHE.get(key)
    if cached is None:
        cached = tuple(mat_map(ring.from_int, dp) for dp in alg.divided_powers(root))
        _DP_CACHE[key] = cached
    return cached


def unipotent(alg: AdjointAlgebra, ring: Ring, root: Root, t) -> GroupElement:
    return GroupElement(ring, _unipotent_matrix(alg, ring, root, t),
                        _unipotent_matrix(alg, ring, root, ring.neg(t)),
                        (("x", root, t),))


def _unipotent_matrix(alg: AdjointAlgebra, ring: Ring, root: Root, t) -> Matrix:
    n = alg.dim
    rows = [list(row) for row in identity(ring, n)]
    power = ring.one
    for dp in _divided_powers_over(alg, ring, root):
        power = ring.mul(power, t)
        if power == ring.zero:
            break
        for i in range(n):
            drow = dp[i]
            rrow = rows[i]
            for j in range(n):
                v = drow[j]
                if v != ring.zero:
                    rrow[j] = ring.add(rrow[j], ring.mul(power, v))
    return matrix(rows)


def weyl(alg: AdjointAlgebra, ring: Ring, root: Root, t) -> GroupElement:
    """w_root(t) = x_root(t) x_(-root)(-1/t) x_root(t); t must be a unit."""
    tinv = ring.inv(t)
    neg_root = tuple(-c for c in root)
    prod = unipotent(alg, ring, root, t) \
        .mul(unipotent(alg, ring, neg_root, ring.neg(tinv))) \
        .mul(unipotent(alg, ring, root, t))
    return GroupElement(ring, prod.mat, prod.inv_mat, (("w", root, t),))


def torus_alpha(alg: AdjointAlgebra, ring: Ring, root: Root, u) -> GroupElement:
    """h_root(u), the diagonal action u^<beta, root> on each root space."""
    sysm = alg.system
    uinv = ring.inv(u)
    n = alg.dim
    diag = []
    for beta in sysm.roots:
        p = sysm.pairing(beta, root)
        diag.append(ring.power(u, p) if p >= 0 else ring.power(uinv, -p))
    diag.extend([ring.one] * sysm.rank)
    mat = tuple(tuple(diag[i] if i == j else ring.zero for j in range(n))
                for i in range(n))
    inv = tuple(tuple(ring.inv(diag[i]) if i == j else ring.zero for j in range(n))
                for i in range(n))
    return GroupElement(ring, mat, inv, (("h", root, u),))


def torus_chi(alg: AdjointAlgebra, ring: Ring, units: Tuple) -> GroupElement:
    """The torus element acting by chi(beta) = prod units_j ^ beta_j.

    chi ranges over all characters of the root lattice, so this covers the
    full torus of the adjoint group; it carries no word because it need not
    lie in the elementary subgroup.
    """
    sysm = alg.system
    inverses = tuple(ring.inv(u) for u in units)
    n = alg.dim
    diag = []
    for beta in sysm.roots:
        val = ring.one
        for j, c in enumerate(beta):
            base = units[j] if c >= 0 else inverses[j]
            val = ring.mul(val, ring.power(base, abs(c)))
        diag.append(val)
    diag.extend([ring.one] * sysm.rank)
    mat = tuple(tuple(diag[i] if i == j else ring.zero for j in range(n))
                for i in range(n))
    inv = tuple(tuple(ring.inv(diag[i]) if i == j else ring.zero for j in range(n))
                for i in range(n))
    return GroupElement(ring, mat, inv, None)


def from_word(alg: AdjointAlgebra, ring: Ring, tokens: Iterable[Token]) -> GroupElement:
    out = identity_element(alg, ring)
    for token in tokens:
        kind, root, t = token
        if kind == "x":
            factor = unipotent(alg, ring, root, t)
        elif kind == "w":
            factor = weyl(alg, ring, root, t)
        elif kind == "h":
            factor = torus_alpha(alg, ring, root, t)
        elif kind == "chi":
            base = torus_chi(alg, ring, root)
            factor = GroupElement(ring, base.mat, base.inv_mat, (token,))
        else:
            raise ValueError(f"unknown token kind {kind!r}")
        out = out.mul(factor)
    return out


def element_from_matrix(ring: Ring, mat: Matrix) -> GroupElement:
    inv = ring_invert(ring, mat)
    if inv is None:
        raise ValueError("matrix is not invertible over the ring")
    return GroupElement(ring, mat, inv, None)


def _push_token(hom: RingMorphism, token: Token) -> Token:
    kind, root, t = token
    if kind == "chi":
        return ("chi", tuple(hom(u) for u in root), None)
    return (kind, root, hom(t))


def push_element(alg: AdjointAlgebra, hom: RingMorphism, elem: GroupElement) -> GroupElement:
    """Apply a ring map entrywise; words push token by token."""
    if elem.word is not None:
        return from_word(alg, hom.dst, tuple(_push_token(hom, t) for t in elem.word))
    return GroupElement(hom.dst, mat_map(hom, elem.mat), mat_map(hom, elem.inv_mat), None)


def commutator(a: GroupElement, b: GroupElement) -> GroupElement:
    return a.mul(b).mul(a.inv()).mul(b.inv())


def is_identity_mod(ideal: Ideal, elem: GroupElement) -> bool:
    ring = elem.ring
    n = len(elem.mat)
    for i in range(n):
        for j, v in enumerate(elem.mat[i]):
            target = ring.one if i == j else ring.zero
            if not ideal.contains(ring.sub(v, target)):
                return False
    return True


# ---------------------------------------------------------------------------
# commutator chains


def chain_pairs(system, r: Root, s: Root) -> Tuple[Tuple[int, int], ...]:
    """All (i, j) with i, j >= 1 and i*r + j*s a root, in the peel order."""
    out = []
    for i in range(1, 4):
        for j in range(1, 4):
            cand = tuple(i * a + j * b for a, b in zip(r, s))
            if system.is_root(cand):
                out.append((i, j))
    out.sort(key=lambda ij: (ij[0] + ij[1], ij[0]))
    return tuple(out)


class ChainExtractionError(RuntimeError):
    pass


def chain_coefficients(alg: AdjointAlgebra, r: Root, s: Root) -> dict:
    """Integer constants C_ij with [x_r(t), x_s(u)] = prod x_(ir+js)(C_ij t^i u^j),
    factors ordered by (i+j, i).  Extracted over Z at t = u = 1 by peeling."""
    ring = ring_make("Z")
    sysm = alg.system
    pairs = chain_pairs(sysm, r, s)
    resid = commutator(unipotent(alg, ring, r, 1), unipotent(alg, ring, s, 1))
    out = {}
    for i, j in pairs:
        gamma = tuple(i * a + j * b for a, b in zip(r, s))
        (row, col), unit = alg._slot(gamma)
        c = resid.mat[row][col] * unit
        out[(i, j)] = c
        resid = unipotent(alg, ring, gamma, -c).mul(resid)
    if not resid.is_identity:
        raise ChainExtractionError(f"peel did not close for {r}, {s}")
    return out


def commutator_identity_holds(alg: AdjointAlgebra, ring: Ring, r: Root, s: Root,
                              t, u, coeffs: dict | None = None) -> bool:
    """Check [x_r(t), x_s(u)] against the chain product at given parameters."""
    if coeffs is None:
        coeffs = chain_coefficients(alg, r, s)
    lhs = commutator(unipotent(alg, ring, r, t), unipotent(alg, ring, s, u))
    rhs = identity_element(alg, ring)
    for i, j in chain_pairs(alg.system, r, s):
        gamma = tuple(i * a + j * b for a, b in zip(r, s))
        param = ring.mul(ring.from_int(coeffs[(i, j)]),
                         ring.mul(ring.power(t, i), ring.power(u, j)))
        rhs = rhs.mul(unipotent(alg, ring, gamma, param))
    return lhs == rhs


# ---------------------------------------------------------------------------
# convenience


def group_for(name: str):
    """(system, algebra) pair for a name like "A2"."""
    from chevalley.roots import system_from_name
    sysm = system_from_name(name)
    return sysm, build_algebra(sysm.kind, sysm.rank)
