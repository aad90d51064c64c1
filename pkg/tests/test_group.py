"""Group element tests: generator relations, torus action, words, pushforward.

The two diagonal matrices frozen at the top anchor the basis order and sign
conventions; everything else is law-checking across several rings.
"""

from __future__ import annotations

import itertools
import random

import pytest

from chevalley.group import (
    chain_coefficients,
    chain_pairs,
    commutator,
    commutator_identity_holds,
    element_from_matrix,
    from_word,
    group_for,
    identity_element,
    is_identity_mod,
    push_element,
    torus_alpha,
    torus_chi,
    unipotent,
    weyl,
)
from chevalley.linalg import det_bareiss, mat_map
from chevalley.rings import Ideal, residue_map, ring_make

ZZ = ring_make("Z")

# values of h_alpha1(-1) pinned for the standard basis order
ANCHOR_DIAGONALS = {
    "A2": (1, 1, -1, -1, -1, -1, 1, 1),
    "B2": (1, 1, -1, -1, -1, -1, 1, 1, 1, 1),
}


def diag_of(mat):
    return tuple(mat[i][i] for i in range(len(mat)))


def test_torus_anchor_diagonals():
    for name, expected in ANCHOR_DIAGONALS.items():
        sysm, alg = group_for(name)
        h = torus_alpha(alg, ZZ, sysm.simple(0), -1)
        assert diag_of(h.mat) == expected
        for i, row in enumerate(h.mat):
            for j, v in enumerate(row):
                if i != j:
                    assert v == 0


def test_one_parameter_law():
    for name in ("A2", "B2", "G2"):
        sysm, alg = group_for(name)
        for ring_name in ("Z/4", "Z/5", "F4"):
            ring = ring_make(ring_name)
            for root in sysm.roots:
                for t, u in itertools.product(ring.elements(), repeat=2):
                    lhs = unipotent(alg, ring, root, t).mul(unipotent(alg, ring, root, u))
                    rhs = unipotent(alg, ring, root, ring.add(t, u))
                    assert lhs == rhs


def test_unipotent_inverse_matches():
    sysm, alg = group_for("A3")
    ring = ring_make("Z/6")
    for root in sysm.roots[:4]:
        x = unipotent(alg, ring, root, 5)
        assert x.mul(x.inv()).is_identity
        assert x.inv() == unipotent(alg, ring, root, ring.neg(5))


def test_torus_conjugation_formula():
    # h(chi) x_beta(xi) h(chi)^-1 = x_beta(chi(beta) xi), exactly
    for name in ("A2", "B2", "G2"):
        sysm, alg = group_for(name)
        ring = ring_make("Z/7")
        units = [u for u in ring.elements() if ring.is_unit(u)]
        rng = random.Random(3)
        for _ in range(40):
            chi = tuple(rng.choice(units) for _ in range(sysm.rank))
            h = torus_chi(alg, ring, chi)
            beta = rng.choice(sysm.roots)
            xi = ring.rand(rng)
            lhs = unipotent(alg, ring, beta, xi).conj_by(h)
            val = ring.one
            for j, c in enumerate(beta):
                base = chi[j] if c >= 0 else ring.inv(chi[j])
                val = ring.mul(val, ring.power(base, abs(c)))
            assert lhs == unipotent(alg, ring, beta, ring.mul(val, xi))


def test_torus_alpha_is_a_character():
    sysm, alg = group_for("B2")
    ring = ring_make("Z/9")
    for root in sysm.roots:
        for u in (2, 4):
            h = torus_alpha(alg, ring, root, u)
            chi = tuple(ring.power(u, sysm.pairing(sysm.simple(k), root))
                        if sysm.pairing(sysm.simple(k), root) >= 0
                        else ring.power(ring.inv(u), -sysm.pairing(sysm.simple(k), root))
                        for k in range(sysm.rank))
            assert h == torus_chi(alg, ring, chi)


def test_h_alpha_equals_weyl_quotient():
    # h_a(u) = w_a(u) w_a(1)^-1 holds in the adjoint matrices
    for name in ("A2", "B2", "G2"):
        sysm, alg = group_for(name)
        for ring_name in ("Z/5", "F4"):
            ring = ring_make(ring_name)
            units = [u for u in ring.elements() if ring.is_unit(u)]
            for root in sysm.roots:
                for u in units:
                    lhs = torus_alpha(alg, ring, root, u)
                    rhs = weyl(alg, ring, root, u).mul(weyl(alg, ring, root, ring.one).inv())
                    assert lhs == rhs


def test_weyl_order_and_square():
    for name in ("A2", "B2"):
        sysm, alg = group_for(name)
        ring = ring_make("Z/7")
        for root in sysm.roots:
            w = weyl(alg, ring, root, ring.one)
            w2 = w.mul(w)
            assert w2 == torus_alpha(alg, ring, root, ring.from_int(-1))
            assert w2.mul(w2).is_identity


def test_weyl_conjugation_sign_is_parameter_free():
    for name in ("A2", "B2", "G2"):
        sysm, alg = group_for(name)
        ring = ring_make("Z/7")
        units = [u for u in ring.elements() if ring.is_unit(u)]
        for alpha in sysm.roots:
            for beta in sysm.roots:
                if beta in (alpha, tuple(-c for c in alpha)):
                    continue
                target = sysm.reflect(beta, alpha)
                pair = sysm.pairing(beta, alpha)
                # read the sign once at t = 1
                conj = unipotent(alg, ring, beta, ring.one).conj_by(
                    weyl(alg, ring, alpha, ring.one))
                eta = None
                for cand in (1, -1):
                    if conj == unipotent(alg, ring, target, ring.from_int(cand)):
                        eta = cand
                        break
                assert eta is not None, (name, alpha, beta)
                for t in units[:3]:
                    for u in (1, 3):
                        got = unipotent(alg, ring, beta, ring.from_int(u)).conj_by(
                            weyl(alg, ring, alpha, t))
                        scale = ring.power(t, -pair) if pair <= 0 \
                            else ring.power(ring.inv(t), pair)
                        expect = unipotent(alg, ring, target,
                                           ring.mul(ring.from_int(eta * u), scale))
                        assert got == expect, (name, alpha, beta, t, u)


def test_chain_pairs_frozen():
    a2 = group_for("A2")[0]
    assert chain_pairs(a2, (1, 0), (0, 1)) == ((1, 1),)
    b2 = group_for("B2")[0]
    assert chain_pairs(b2, (1, 0), (0, 1)) == ((1, 1), (1, 2))
    g2 = group_for("G2")[0]
    assert chain_pairs(g2, (0, 1), (1, 0)) == ((1, 1), (1, 2), (1, 3), (2, 3))


def test_chain_coefficients_frozen_values():
    _, a2 = group_for("A2")
    assert chain_coefficients(a2, (1, 0), (0, 1)) == {(1, 1): 1}
    _, b2 = group_for("B2")
    cb = chain_coefficients(b2, (1, 0), (0, 1))
    assert set(cb) == {(1, 1), (1, 2)}
    assert abs(cb[(1, 1)]) == 1 and abs(cb[(1, 2)]) == 1
    _, g2 = group_for("G2")
    cg = chain_coefficients(g2, (0, 1), (1, 0))
    assert set(cg) == {(1, 1), (1, 2), (1, 3), (2, 3)}
    assert abs(cg[(1, 1)]) == 1 and abs(cg[(1, 3)]) == 1
    assert {abs(cg[(1, 2)]), abs(cg[(2, 3)])} <= {1, 2, 3}


def test_commutator_identity_across_rings():
    for name in ("A2", "B2", "G2"):
        sysm, alg = group_for(name)
        for ring_name in ("Z/4", "Z/5", "Z/7", "F4"):
            ring = ring_make(ring_name)
            rng = random.Random(hash((name, ring_name)) & 0xFFFF)
            for r, s in itertools.permutations(sysm.roots, 2):
                if s == tuple(-c for c in r):
                    continue
                coeffs = chain_coefficients(alg, r, s)
                for _ in range(3):
                    t, u = ring.rand(rng), ring.rand(rng)
                    assert commutator_identity_holds(alg, ring, r, s, t, u, coeffs)


def test_commuting_roots_give_trivial_commutator():
    sysm, alg = group_for("A3")
    ring = ring_make("Z/6")
    r, s = (1, 0, 0), (0, 0, 1)
    assert chain_pairs(sysm, r, s) == ()
    c = commutator(unipotent(alg, ring, r, 4), unipotent(alg, ring, s, 5))
    assert c.is_identity


def test_group_determinants_over_z():
    sysm, alg = group_for("B2")
    for root in sysm.roots:
        assert det_bareiss(unipotent(alg, ZZ, root, 3).mat) == 1
        assert det_bareiss(weyl(alg, ZZ, root, -1).mat) == 1
        assert det_bareiss(torus_alpha(alg, ZZ, root, -1).mat) == 1


def test_from_word_and_inverse_words():
    sysm, alg = group_for("B2")
    ring = ring_make("Z/5")
    word = (("x", (1, 0), 2), ("w", (0, 1), 3), ("h", (1, 1), 4), ("x", (0, 1), 1))
    g = from_word(alg, ring, word)
    assert g.word == word
    assert g.mul(g.inv()).is_identity
    assert from_word(alg, ring, g.inv().word) == g.inv()


def test_push_element_commutes_with_matrices():
    sysm, alg = group_for("A2")
    src = ring_make("Z/4")
    hom = residue_map(src, Ideal.of(src, 2))
    assert hom.dst.descriptor == "Z/2"
    tokens = []
    for root in sysm.roots:
        for t in src.elements():
            tokens.append(("x", root, t))
    for u in (1, 3):
        for root in sysm.roots:
            tokens.append(("w", root, u))
            tokens.append(("h", root, u))
    rng = random.Random(17)
    words = [(a,) for a in tokens]
    words += [(rng.choice(tokens), rng.choice(tokens)) for _ in range(150)]
    words += [tuple(rng.choice(tokens) for _ in range(3)) for _ in range(150)]
    for word in words:
        g = from_word(alg, src, word)
        pushed = push_element(alg, hom, g)
        assert pushed.mat == mat_map(hom, g.mat), word
        assert pushed.inv_mat == mat_map(hom, g.inv_mat), word


def test_is_identity_mod():
    sysm, alg = group_for("A2")
    ring = ring_make("Z/4")
    ideal = Ideal.of(ring, 2)
    assert is_identity_mod(ideal, unipotent(alg, ring, (1, 0), 2))
    assert not is_identity_mod(ideal, unipotent(alg, ring, (1, 0), 1))
    assert is_identity_mod(ideal, identity_element(alg, ring))


def test_element_from_matrix_requires_invertibility():
    sysm, alg = group_for("A2")
    ring = ring_make("Z/4")
    h = torus_alpha(alg, ring, (1, 0), 3)
    rebuilt = element_from_matrix(ring, h.mat)
    assert rebuilt == h and rebuilt.mul(h.inv()).is_identity
    singular = tuple(tuple(ring.from_int(2) if i == j else ring.zero
                           for j in range(alg.dim)) for i in range(alg.dim))
    with pytest.raises(ValueError):
        element_from_matrix(ring, singular)
