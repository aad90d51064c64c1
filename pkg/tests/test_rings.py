"""Ring handle tests.

Oracles used here are independent of the implementation paths:
brute-force idempotent search for CRT, hand-reduced polynomial tables for
the small fields, exhaustive bijection filtering for automorphism counts,
and the fraction construction for localization.
"""

from __future__ import annotations

import itertools
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chevalley.rings import (
    FieldTable,
    Ideal,
    ProductRing,
    RingError,
    ZMod,
    ZRing,
    crt_split,
    is_ring_automorphism,
    localize_at_prime,
    maximal_ideals,
    residue_map,
    ring_automorphisms,
    ring_make,
)


def test_ring_make_caches_and_parses():
    assert ring_make("Z") is ring_make("Z")
    assert isinstance(ring_make("Z"), ZRing)
    assert isinstance(ring_make("Z/6"), ZMod)
    assert ring_make("Z/6").n == 6
    assert isinstance(ring_make("F4"), FieldTable)
    assert isinstance(ring_make("F5"), ZMod)  # prime size collapses to Z/5
    r = ring_make("Z/3xZ/3")
    assert isinstance(r, ProductRing) and r.size == 9
    for bad in ("Q", "Z/0", "F6", "F32", "Z/x"):
        with pytest.raises(RingError):
            ring_make(bad)


def test_basic_arithmetic_mod_6():
    r = ring_make("Z/6")
    assert r.add(4, 5) == 3
    assert r.mul(4, 5) == 2
    assert r.neg(2) == 4
    assert r.sub(1, 5) == 2
    assert r.from_int(-1) == 5
    assert sorted(r.units()) == [1, 5]
    assert r.inv(5) == 5
    with pytest.raises(RingError):
        r.inv(2)


def test_unit_flags():
    assert ring_make("Z/5").has_half and ring_make("Z/5").has_third
    assert not ring_make("Z/4").has_half and ring_make("Z/4").has_third
    assert not ring_make("Z/6").has_half and not ring_make("Z/6").has_third
    assert not ring_make("F4").has_half and ring_make("F4").has_third
    assert not ring_make("F9").has_third and ring_make("F9").has_half
    assert not ring_make("Z").has_half


def test_locality_flags():
    assert ring_make("Z/8").is_local and not ring_make("Z/8").is_field
    assert ring_make("Z/7").is_local and ring_make("Z/7").is_field
    assert not ring_make("Z/6").is_local
    assert ring_make("F4").is_local and ring_make("F4").is_field
    assert not ring_make("Z/3xZ/3").is_local
    assert ring_make("Z/8").residue_char == 2
    assert ring_make("Z/8").nil_degree == 3


# --- field tables, checked against hand-reduced polynomial arithmetic ------

def test_f4_table_matches_hand_reduction():
    f4 = ring_make("F4")
    # index 2 is the generator x with x^2 = x + 1
    assert f4.mul(2, 2) == 3
    assert f4.mul(2, 3) == 1
    assert f4.add(2, 3) == 1
    assert f4.inv(2) == 3
    assert f4.frobenius(2) == 3


def test_f8_f9_f16_spot_values():
    f8 = ring_make("F8")  # x^3 = x + 1
    assert f8.mul(2, 2) == 4
    assert f8.mul(2, 4) == 3
    assert f8.mul(4, 4) == 6
    f9 = ring_make("F9")  # x^2 = -1
    assert f9.mul(3, 3) == 2
    assert f9.add(3, 3) == 6
    f16 = ring_make("F16")  # x^4 = x + 1
    assert f16.mul(4, 4) == 3
    assert f16.mul(2, 8) == 3


@pytest.mark.parametrize("name", ["F4", "F8", "F9", "F16"])
def test_field_axioms_exhaustive(name):
    f = ring_make(name)
    els = list(f.elements())
    q = f.size
    assert len(els) == q
    for a in els:
        assert f.add(a, f.neg(a)) == 0
        assert f.mul(a, 1) == a
        # x^q = x marks a field of size q
        assert f.power(a, q) == a
        if a != 0:
            assert f.mul(a, f.inv(a)) == 1
    for a, b in itertools.product(els, repeat=2):
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, b) == f.mul(b, a)
    # multiplicative group is cyclic: some element has full order
    def order(a):
        k, acc = 1, a
        while acc != 1:
            acc = f.mul(acc, a)
            k += 1
        return k
    assert max(order(a) for a in els if a != 0) == q - 1


# --- CRT ---------------------------------------------------------------

def brute_idempotents(r):
    return sorted(e for e in r.elements() if r.mul(e, e) == e)


def test_crt_idempotents_z6():
    r = ring_make("Z/6")
    split = crt_split(r)
    assert [f.ring.descriptor for f in split.factors] == ["Z/2", "Z/3"]
    assert [f.idempotent for f in split.factors] == [3, 4]
    assert brute_idempotents(r) == [0, 1, 3, 4]


def test_crt_idempotents_z12():
    split = crt_split(ring_make("Z/12"))
    assert [f.ring.descriptor for f in split.factors] == ["Z/4", "Z/3"]
    assert [f.idempotent for f in split.factors] == [9, 4]


@pytest.mark.parametrize("name", ["Z/6", "Z/12", "Z/8", "F4", "Z/3xZ/3", "Z/6xF4"])
def test_crt_split_roundtrip(name):
    r = ring_make(name)
    split = crt_split(r)
    one = r.zero
    for f in split.factors:
        assert f.ring.is_local
        e = f.idempotent
        assert r.mul(e, e) == e
        one = r.add(one, e)
    assert one == r.one
    for fa, fb in itertools.combinations(split.factors, 2):
        assert r.mul(fa.idempotent, fb.idempotent) == r.zero
    for x in r.elements():
        assert split.from_factors(split.to_factors(x)) == x
    # projections are ring maps
    for f in split.factors:
        for x, y in itertools.product(list(r.elements())[:6], repeat=2):
            assert f.project(r.add(x, y)) == f.ring.add(f.project(x), f.project(y))
            assert f.project(r.mul(x, y)) == f.ring.mul(f.project(x), f.project(y))


def test_maximal_ideals_of_product():
    r = ring_make("Z/6")
    ideals = maximal_ideals(r)
    assert len(ideals) == 2
    fields = sorted(residue_map(r, i).dst.descriptor for i in ideals)
    assert fields == ["Z/2", "Z/3"]


# --- ideals and quotients -----------------------------------------------

def test_ideal_membership_z9():
    r = ring_make("Z/9")
    i3 = Ideal.of(r, 3)
    assert i3.contains(0) and i3.contains(6) and not i3.contains(4)
    assert i3.elements() == [0, 3, 6]
    assert i3.is_proper
    assert not Ideal.of(r, 1).is_proper
    q = residue_map(r, i3)
    assert q.dst.descriptor == "Z/3"
    assert q(7) == 1


def test_ideal_of_zero_is_zero_ideal():
    r = ring_make("Z/6")
    z = Ideal.of(r, 0)
    assert z.elements() == [0]


def test_product_ideal_quotient_is_residue_field():
    r = ring_make("Z/3xZ/3")
    assert isinstance(r, ProductRing)
    ideal = Ideal(r, (Ideal.of(r.factors[0], 0), Ideal.of(r.factors[1], 1)))
    q = residue_map(r, ideal)
    assert q.dst.descriptor == "Z/3"
    assert q((2, 1)) == 2


# --- automorphisms -------------------------------------------------------

def brute_automorphism_count(r):
    """Filter all bijections on the elements; only usable for tiny rings."""
    els = list(r.elements())
    count = 0
    for perm in itertools.permutations(els):
        table = dict(zip(els, perm))
        if is_ring_automorphism(r, table):
            count += 1
    return count


@pytest.mark.parametrize("name,expected", [
    ("Z/4", 1), ("Z/6", 1), ("Z/5", 1), ("F4", 2),
])
def test_automorphism_count_vs_bruteforce(name, expected):
    r = ring_make(name)
    auts = ring_automorphisms(r)
    assert len(auts) == expected
    assert brute_automorphism_count(r) == expected
    assert auts[0].is_identity


@pytest.mark.parametrize("name,expected", [
    ("F8", 3), ("F9", 2), ("F16", 4),
    ("Z/3xZ/3", 2), ("Z/2xZ/3", 1), ("F4xF4", 8), ("Z/4xZ/2", 1),
])
def test_automorphism_counts_larger(name, expected):
    r = ring_make(name)
    auts = ring_automorphisms(r)
    assert len(auts) == expected
    for aut in auts:
        assert is_ring_automorphism(r, dict(aut.table))
    # pairwise distinct
    for a, b in itertools.combinations(auts, 2):
        assert not a.same_map(b)


def test_frobenius_structure():
    f4 = ring_make("F4")
    frob = ring_automorphisms(f4)[1]
    assert frob(2) == 3 and frob(3) == 2
    assert frob.compose(frob).is_identity
    assert frob.inverse().same_map(frob)
    f16 = ring_make("F16")
    frob16 = ring_automorphisms(f16)[1]
    acc = frob16
    for _ in range(3):
        acc = acc.compose(frob16)
    assert acc.is_identity


def test_swap_automorphism_of_square_product():
    r = ring_make("Z/3xZ/3")
    auts = ring_automorphisms(r)
    swap = auts[1]
    assert swap((1, 2)) == (2, 1)
    assert swap.compose(swap).is_identity


def test_not_an_automorphism():
    r = ring_make("Z/5")
    assert not is_ring_automorphism(r, {x: (2 * x) % 5 for x in range(5)})
    assert not is_ring_automorphism(r, {x: x for x in range(4)})


def test_z_has_identity_only():
    auts = ring_automorphisms(ring_make("Z"))
    assert len(auts) == 1 and auts[0](17) == 17


# --- localization oracle --------------------------------------------------

@pytest.mark.parametrize("n,p,expect_size", [(12, 2, 4), (12, 3, 3), (6, 2, 2), (18, 3, 9)])
def test_localization_matches_crt_projection(n, p, expect_size):
    r = ring_make(f"Z/{n}")
    classes, canonical = localize_at_prime(r, p)
    assert len(classes) == expect_size
    split = crt_split(r)
    proj = next(f for f in split.factors if f.ring.residue_char == p)
    for x, y in itertools.product(r.elements(), repeat=2):
        assert (canonical(x) == canonical(y)) == (proj.project(x) == proj.project(y))
    # canonical map is onto the classes
    assert len({canonical(x) for x in r.elements()}) == expect_size


# --- products and serialization ------------------------------------------

def test_product_embed_project():
    r = ring_make("Z/6xF4")
    assert isinstance(r, ProductRing)
    assert r.embed(0, 5) == (5, 0)
    assert r.embed(1, 3) == (0, 3)
    assert r.project(1, (2, 3)) == 3
    assert r.from_int(7) == (1, 1)
    assert len(list(r.elements())) == 24


def test_element_json_roundtrip():
    r = ring_make("Z/6xF4")
    x = (4, 3)
    data = r.element_to_json(x)
    assert data == [4, 3]
    assert r.element_from_json(data) == x
    z = ring_make("Z/7")
    assert z.element_from_json(z.element_to_json(5)) == 5


# --- axioms by sampling ----------------------------------------------------

RING_NAMES = ["Z/4", "Z/6", "Z/12", "F4", "F9", "Z/3xZ/3", "Z/6xF4"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(RING_NAMES), st.data())
def test_ring_axioms_sampled(name, data):
    r = ring_make(name)
    els = list(r.elements())
    a = data.draw(st.sampled_from(els))
    b = data.draw(st.sampled_from(els))
    c = data.draw(st.sampled_from(els))
    assert r.add(a, r.add(b, c)) == r.add(r.add(a, b), c)
    assert r.mul(a, r.mul(b, c)) == r.mul(r.mul(a, b), c)
    assert r.mul(a, r.add(b, c)) == r.add(r.mul(a, b), r.mul(a, c))
    assert r.add(a, r.zero) == a
    assert r.mul(a, r.one) == a


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RING_NAMES), st.integers(-40, 40), st.integers(-40, 40))
def test_from_int_is_a_ring_map(name, m, n):
    r = ring_make(name)
    assert r.add(r.from_int(m), r.from_int(n)) == r.from_int(m + n)
    assert r.mul(r.from_int(m), r.from_int(n)) == r.from_int(m * n)


def test_scale_and_power():
    r = ring_make("Z/7")
    assert r.scale(10, 3) == 2
    assert r.power(3, 6) == 1
    assert r.power(3, -1) == r.inv(3)
