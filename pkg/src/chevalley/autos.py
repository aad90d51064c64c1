"""Standard automorphisms: ring twists, inner conjugations, graph symmetries.

A graph symmetry of the diagram lifts to the Lie algebra as a signed basis
permutation.  Signs are fixed by sending every simple root vector to its
image with sign +1 and propagating through extraspecial pairs; negatives
share the sign of their positives.  Construction verifies the intertwining
relations over Z, so a bad sign table cannot leave this module.

A standard automorphism in normal form acts as

    x  |->  L ( g rho(x) g^-1 ) L^-1

with rho a ring automorphism applied entrywise, g a group element, and L the
matrix of a graph symmetry.  Ring twists commute past integer matrices, and
conjugations absorb, so every composition of standard pieces can be brought
to this shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

from chevalley.group import GroupElement, from_word
from chevalley.liealg import AdjointAlgebra, build_algebra
from chevalley.linalg import Matrix, mat_map, mat_mul, matrix
from chevalley.rings import Ring, RingAut, ring_make
from chevalley.roots import DiagramSymmetry, Root


@dataclass(eq=False)
class GraphData:
    """A diagram symmetry realized on the adjoint basis."""

    delta: DiagramSymmetry
    eps: dict
    lambda_z: Matrix
    lambda_z_inv: Matrix

    def map_token(self, ring: Ring, token) -> tuple:
        kind, root, t = token
        if kind == "chi":
            units = [ring.one] * len(root)
            for i, u in enumerate(root):
                units[self.delta.perm[i]] = u
            return ("chi", tuple(units), None)
        image = self.delta.apply_root(root)
        if kind in ("x", "w"):
            return (kind, image, ring.mul(ring.from_int(self.eps[root]), t))
        return ("h", image, t)

    def matrices(self, ring: Ring) -> Tuple[Matrix, Matrix]:
        return (mat_map(ring.from_int, self.lambda_z),
                mat_map(ring.from_int, self.lambda_z_inv))


@lru_cache(maxsize=None)
def _graph_data_cached(kind: str, rank: int, perm: tuple) -> GraphData:
    alg = build_algebra(kind, rank)
    system = alg.system
    delta = DiagramSymmetry(perm)
    eps = {}
    for gamma in system.positives:
        if sum(gamma) == 1:
            eps[gamma] = 1
            continue
        alpha, beta = alg.constants._extraspecial[gamma]
        ratio = alg.n_const(delta.apply_root(alpha), delta.apply_root(beta))
        eps[gamma] = eps[alpha] * eps[beta] * ratio // alg.n_const(alpha, beta)
    for gamma in system.positives:
        eps[tuple(-c for c in gamma)] = eps[gamma]

    n = alg.dim
    nroots = len(system.roots)
    rows = [[0] * n for _ in range(n)]
    rows_inv = [[0] * n for _ in range(n)]
    for root in system.roots:
        i, j = system.root_index(delta.apply_root(root)), system.root_index(root)
        rows[i][j] = eps[root]
        rows_inv[j][i] = eps[root]
    for j in range(rank):
        rows[nroots + perm[j]][nroots + j] = 1
        rows_inv[nroots + j][nroots + perm[j]] = 1
    lam, lam_inv = matrix(rows), matrix(rows_inv)

    zz = ring_make("Z")

    def zz_mul(a, b):
        return mat_mul(zz, a, b)

    for root in system.roots:
        lhs = zz_mul(zz_mul(lam, alg.x_mats[root]), lam_inv)
        expect = tuple(tuple(eps[root] * v for v in row)
                       for row in alg.x_mats[delta.apply_root(root)])
        assert lhs == expect, root
    for j in range(rank):
        lhs = zz_mul(zz_mul(lam, alg.h_mats[j]), lam_inv)
        assert lhs == alg.h_mats[perm[j]], j
    return GraphData(delta, eps, lam, lam_inv)


def graph_data(alg: AdjointAlgebra, delta: DiagramSymmetry) -> GraphData:
    return _graph_data_cached(alg.system.kind, alg.system.rank, delta.perm)


@dataclass(eq=False)
class StandardAutomorphism:
    """Normal form graph * inner * ring-twist over a fixed ring."""

    alg: AdjointAlgebra
    ring: Ring
    graph: Optional[GraphData]
    conjugator: Optional[GroupElement]
    ring_aut: Optional[RingAut]

    def apply(self, elem: GroupElement) -> GroupElement:
        out = elem
        if self.ring_aut is not None and not self.ring_aut.is_identity:
            rho = self.ring_aut
            word = None
            if out.word is not None:
                word = tuple(
                    ("chi", tuple(rho(u) for u in r), None) if k == "chi"
                    else (k, r, rho(t))
                    for k, r, t in out.word)
            out = GroupElement(self.ring, mat_map(rho, out.mat),
                               mat_map(rho, out.inv_mat), word)
        if self.conjugator is not None:
            out = out.conj_by(self.conjugator)
        if self.graph is not None and not self.graph.delta.is_identity:
            lam, lam_inv = self.graph.matrices(self.ring)
            word = None
            if out.word is not None:
                word = tuple(self.graph.map_token(self.ring, t) for t in out.word)
            mat = mat_mul(self.ring, mat_mul(self.ring, lam, out.mat), lam_inv)
            inv = mat_mul(self.ring, mat_mul(self.ring, lam, out.inv_mat), lam_inv)
            out = GroupElement(self.ring, mat, inv, word)
        return out

    def apply_word(self, word) -> GroupElement:
        return self.apply(from_word(self.alg, self.ring, word))


def inner(alg: AdjointAlgebra, g: GroupElement) -> StandardAutomorphism:
    return StandardAutomorphism(alg, g.ring, None, g, None)


def ring_twist(alg: AdjointAlgebra, ring: Ring, rho: RingAut) -> StandardAutomorphism:
    return StandardAutomorphism(alg, ring, None, None, rho)


def graph_auto(alg: AdjointAlgebra, ring: Ring, delta: DiagramSymmetry) -> StandardAutomorphism:
    return StandardAutomorphism(alg, ring, graph_data(alg, delta), None, None)


def standard(alg: AdjointAlgebra, ring: Ring,
             delta: Optional[DiagramSymmetry] = None,
             conjugator: Optional[GroupElement] = None,
             rho: Optional[RingAut] = None) -> StandardAutomorphism:
    gd = graph_data(alg, delta) if delta is not None and not delta.is_identity else None
    return StandardAutomorphism(alg, ring, gd, conjugator, rho)
