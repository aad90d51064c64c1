"""Commutative ring handles: Z, Z/n, small field tables, finite products.

Elements are plain hashable values (int for Z and Z/n, int index for field
tables, tuples for products), so matrices over a ring are just nested tuples.
Every handle is immutable and cached by canonical descriptor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Iterator


class RingError(ValueError):
    pass


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class Ring:
    """Base interface; subclasses provide exact arithmetic on hashable elements."""

    descriptor: str
    size: int | None  # None for Z

    def __repr__(self) -> str:
        return f"<ring {self.descriptor}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.descriptor == other.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)

    # arithmetic ---------------------------------------------------------
    def add(self, a, b): raise NotImplementedError
    def neg(self, a): raise NotImplementedError
    def mul(self, a, b): raise NotImplementedError
    def from_int(self, n: int): raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def is_zero(self, a) -> bool:
        return a == self.zero

    # units --------------------------------------------------------------
    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def units(self) -> list:
        return [x for x in self.elements() if self.is_unit(x)]

    @property
    def has_half(self) -> bool:
        return self.is_unit(self.from_int(2))

    @property
    def has_third(self) -> bool:
        return self.is_unit(self.from_int(3))

    # structure ----------------------------------------------------------
    def elements(self) -> Iterator:
        raise RingError(f"{self.descriptor} is not finite")

    @property
    def is_field(self) -> bool:
        return False

    @property
    def is_local(self) -> bool:
        """Local in the finite sense: a unique maximal ideal."""
        return False

    def power(self, a, n: int):
        if n < 0:
            a, n = self.inv(a), -n
        out, base = self.one, a
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def scale(self, n: int, a):
        """n * a for an integer n."""
        return self.mul(self.from_int(n), a)

    def rand(self, rng):
        raise NotImplementedError

    # json ---------------------------------------------------------------
    def element_to_json(self, a):
        return list(a) if isinstance(a, tuple) else a

    def element_from_json(self, data):
        if isinstance(data, list):
            return tuple(self.factors[i].element_from_json(v) for i, v in enumerate(data))
        return data


class ZRing(Ring):
    descriptor = "Z"
    size = None

    def add(self, a, b): return a + b
    def neg(self, a): return -a
    def mul(self, a, b): return a * b
    def from_int(self, n): return n
    def is_unit(self, a): return a in (1, -1)

    def inv(self, a):
        if a not in (1, -1):
            raise RingError(f"{a} is not a unit in Z")
        return a

    def rand(self, rng):
        return rng.randrange(-9, 10)


class ZMod(Ring):
    def __init__(self, n: int):
        if n < 1:
            raise RingError("modulus must be positive")
        self.n = n
        self.descriptor = f"Z/{n}"
        self.size = n
        self._factors = _factorize(n)

    def add(self, a, b): return (a + b) % self.n
    def neg(self, a): return (-a) % self.n
    def mul(self, a, b): return (a * b) % self.n
    def from_int(self, n): return n % self.n
    def is_unit(self, a): return gcd(a, self.n) == 1

    def inv(self, a):
        if not self.is_unit(a):
            raise RingError(f"{a} is not a unit in {self.descriptor}")
        return pow(a, -1, self.n)

    def elements(self):
        return iter(range(self.n))

    @property
    def is_field(self):
        return len(self._factors) == 1 and max(self._factors.values()) == 1 and self.n > 1

    @property
    def is_local(self):
        return len(self._factors) == 1

    @property
    def residue_char(self) -> int:
        if not self.is_local:
            raise RingError(f"{self.descriptor} is not local")
        return next(iter(self._factors))

    @property
    def nil_degree(self) -> int:
        """k with p^k = 0 for the local ring Z/p^k."""
        if not self.is_local:
            raise RingError(f"{self.descriptor} is not local")
        return self._factors[self.residue_char]

    def rand(self, rng):
        return rng.randrange(self.n)


_IRREDUCIBLE = {  # monic, coefficients low to high over Z/p
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (1, 0, 1),
}


class FieldTable(Ring):
    """GF(p^k) for p^k <= 16, k >= 2, with explicit add/mul tables.

    Elements are indices 0..p^k-1 read as base-p coefficient vectors of
    polynomials modulo a fixed irreducible.
    """

    def __init__(self, p: int, k: int):
        if (p, k) not in _IRREDUCIBLE:
            raise RingError(f"no field table for p={p}, k={k} (need p^k <= 16, k >= 2)")
        self.p, self.k = p, k
        self.size = p ** k
        self.descriptor = f"F{self.size}"
        mod_poly = _IRREDUCIBLE[(p, k)]

        def digits(x):
            out = []
            for _ in range(k):
                out.append(x % p)
                x //= p
            return out

        def undigits(ds):
            x = 0
            for d in reversed(ds):
                x = x * p + d
            return x

        def poly_mul(a, b):
            prod = [0] * (2 * k - 1)
            for i, ai in enumerate(a):
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
            # reduce by the irreducible (monic of degree k)
            for i in range(len(prod) - 1, k - 1, -1):
                c = prod[i]
                if c:
                    prod[i] = 0
                    for j in range(k):
                        prod[i - k + j] = (prod[i - k + j] - c * mod_poly[j]) % p
            return prod[:k]

        q = self.size
        self._add = tuple(tuple(undigits([(x + y) % p for x, y in zip(digits(a), digits(b))])
                                for b in range(q)) for a in range(q))
        self._mul = tuple(tuple(undigits(poly_mul(digits(a), digits(b)))
                                for b in range(q)) for a in range(q))
        self._neg = tuple(undigits([(-x) % p for x in digits(a)]) for a in range(q))
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    inv[a] = b
                    break
        self._inv = tuple(inv)

    def add(self, a, b): return self._add[a][b]
    def neg(self, a): return self._neg[a]
    def mul(self, a, b): return self._mul[a][b]
    def from_int(self, n): return n % self.p
    def is_unit(self, a): return a != 0

    def inv(self, a):
        if a == 0:
            raise RingError(f"0 is not a unit in {self.descriptor}")
        return self._inv[a]

    def elements(self):
        return iter(range(self.size))

    @property
    def is_field(self):
        return True

    @property
    def is_local(self):
        return True

    @property
    def residue_char(self) -> int:
        return self.p

    @property
    def nil_degree(self) -> int:
        return 1

    def frobenius(self, a):
        return self.power(a, self.p)

    def additive_generators(self) -> list:
        """The polynomial basis 1, x, x^2, ... as indices."""
        return [self.p ** i for i in range(self.k)]

    def rand(self, rng):
        return rng.randrange(self.size)


class ProductRing(Ring):
    def __init__(self, factors: tuple[Ring, ...]):
        if len(factors) < 2:
            raise RingError("a product needs at least two factors")
        if any(f.size is None for f in factors):
            raise RingError("product factors must be finite")
        self.factors = factors
        self.descriptor = "x".join(f.descriptor for f in factors)
        self.size = 1
        for f in factors:
            self.size *= f.size

    def add(self, a, b):
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def neg(self, a):
        return tuple(f.neg(x) for f, x in zip(self.factors, a))

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def from_int(self, n):
        return tuple(f.from_int(n) for f in self.factors)

    def is_unit(self, a):
        return all(f.is_unit(x) for f, x in zip(self.factors, a))

    def inv(self, a):
        return tuple(f.inv(x) for f, x in zip(self.factors, a))

    def elements(self):
        return (tuple(xs) for xs in itertools.product(*(f.elements() for f in self.factors)))

    def project(self, i: int, a):
        return a[i]

    def embed(self, i: int, x):
        """x in factor i, zero elsewhere."""
        return tuple(x if j == i else f.zero for j, f in enumerate(self.factors))

    def rand(self, rng):
        return tuple(f.rand(rng) for f in self.factors)


_RING_CACHE: dict[str, Ring] = {}


def ring_make(descriptor: str) -> Ring:
    """Build a ring handle from a descriptor like "Z", "Z/6", "F4", "Z/3xZ/3"."""
    text = descriptor.strip()
    if text in _RING_CACHE:
        return _RING_CACHE[text]
    if "x" in text:
        parts = text.split("x")
        ring: Ring = ProductRing(tuple(ring_make(p) for p in parts))
    elif text == "Z":
        ring = ZRing()
    elif text.startswith("Z/"):
        try:
            n = int(text[2:])
        except ValueError:
            raise RingError(f"bad modulus in {text!r}")
        ring = ZMod(n)
    elif text.startswith("F"):
        try:
            q = int(text[1:])
        except ValueError:
            raise RingError(f"bad field size in {text!r}")
        fac = _factorize(q)
        if len(fac) != 1:
            raise RingError(f"{q} is not a prime power")
        p, k = next(iter(fac.items()))
        ring = ZMod(p) if k == 1 else FieldTable(p, k)
    else:
        raise RingError(f"unknown ring descriptor {descriptor!r}")
    _RING_CACHE[text] = ring
    return ring


# ---------------------------------------------------------------------------
# ideals and quotients


@dataclass(frozen=True)
class Ideal:
    """An ideal given by generators; supported for Z, Z/n and products."""

    ring: Ring
    data: object  # int divisor for Z and Z/n; tuple of Ideals for products

    @staticmethod
    def of(ring: Ring, gen) -> "Ideal":
        if isinstance(ring, ZRing):
            return Ideal(ring, abs(int(gen)))
        if isinstance(ring, ZMod):
            return Ideal(ring, gcd(int(gen), ring.n))
        if isinstance(ring, ProductRing) and isinstance(gen, tuple):
            return Ideal(ring, tuple(Ideal.of(f, g) for f, g in zip(ring.factors, gen)))
        if isinstance(ring, FieldTable):
            return Ideal(ring, 0 if gen == 0 else 1)
        raise RingError(f"cannot form an ideal of {ring.descriptor} from {gen!r}")

    def contains(self, x) -> bool:
        if isinstance(self.ring, ZRing):
            return x == 0 if self.data == 0 else x % self.data == 0
        if isinstance(self.ring, ZMod):
            # data is gcd(gen, n), so always a positive divisor of n
            return x % self.data == 0
        if isinstance(self.ring, ProductRing):
            return all(i.contains(v) for i, v in zip(self.data, x))
        if isinstance(self.ring, FieldTable):
            return x == 0 if self.data == 0 else True
        raise RingError("unsupported ideal")

    @property
    def is_proper(self) -> bool:
        if isinstance(self.ring, (ZRing, ZMod)):
            return self.data != 1
        if isinstance(self.ring, ProductRing):
            return any(i.is_proper for i in self.data)
        if isinstance(self.ring, FieldTable):
            return self.data == 0
        raise RingError("unsupported ideal")

    def elements(self) -> list:
        if isinstance(self.ring, ZMod):
            return list(range(0, self.ring.n, self.data))
        if isinstance(self.ring, ProductRing):
            return [x for x in self.ring.elements()
                    if all(i.contains(v) for i, v in zip(self.data, x))]
        if isinstance(self.ring, FieldTable):
            return [0] if self.data == 0 else list(self.ring.elements())
        raise RingError(f"cannot enumerate an ideal of {self.ring.descriptor}")


@dataclass(frozen=True)
class RingMorphism:
    src: Ring
    dst: Ring
    fn: Callable

    def __call__(self, x):
        return self.fn(x)


def residue_map(ring: Ring, ideal: Ideal) -> RingMorphism:
    """The quotient map ring -> ring/ideal with a concrete quotient handle."""
    if ideal.ring != ring:
        raise RingError("ideal belongs to a different ring")
    if isinstance(ring, (ZRing, ZMod)):
        d = ideal.data
        if d == 0:
            if isinstance(ring, ZRing):
                return RingMorphism(ring, ring, lambda x: x)
            return RingMorphism(ring, ring, lambda x: x)
        dst = ring_make(f"Z/{d}")
        return RingMorphism(ring, dst, lambda x, m=d: x % m)
    if isinstance(ring, FieldTable):
        if ideal.data == 0:
            return RingMorphism(ring, ring, lambda x: x)
        dst = ring_make("Z/1")
        return RingMorphism(ring, dst, lambda x: 0)
    if isinstance(ring, ProductRing):
        maps = [residue_map(f, i) for f, i in zip(ring.factors, ideal.data)]
        keep = [j for j, m in enumerate(maps) if m.dst.size != 1]
        if not keep:
            dst = ring_make("Z/1")
            return RingMorphism(ring, dst, lambda x: 0)
        if len(keep) == 1:
            j = keep[0]
            return RingMorphism(ring, maps[j].dst, lambda x, j=j, m=maps[j]: m(x[j]))
        dst = ProductRing(tuple(maps[j].dst for j in keep))
        return RingMorphism(ring, dst,
                            lambda x, ks=tuple(keep), ms=tuple(maps): tuple(ms[j](x[j]) for j in ks))
    raise RingError(f"no residue map for {ring.descriptor}")


# ---------------------------------------------------------------------------
# CRT splitting into local factors


@dataclass(frozen=True)
class LocalFactor:
    ring: Ring                     # a local ring (Z/p^k or field table)
    project: Callable              # parent element -> factor element
    embed: Callable                # factor element -> parent element (idempotent slot)
    idempotent: object             # the idempotent of the parent supporting this factor
    maximal_ideal: Ideal           # the maximal ideal of the parent over this factor


@dataclass(frozen=True)
class CrtSplit:
    ring: Ring
    factors: tuple[LocalFactor, ...]

    def to_factors(self, x) -> tuple:
        return tuple(f.project(x) for f in self.factors)

    def from_factors(self, xs: Iterable) -> object:
        out = self.ring.zero
        for f, x in zip(self.factors, xs):
            out = self.ring.add(out, f.embed(x))
        return out


def crt_split(ring: Ring) -> CrtSplit:
    """Split a finite ring into local factors with explicit idempotents."""
    if isinstance(ring, ZMod):
        fac = sorted(_factorize(ring.n).items())
        if len(fac) == 1:
            ideal = Ideal.of(ring, fac[0][0])
            return CrtSplit(ring, (LocalFactor(ring, lambda x: x, lambda x: x,
                                               ring.one, ideal),))
        factors = []
        for p, k in fac:
            q = p ** k
            rest = ring.n // q
            # idempotent e = rest * (rest^-1 mod q): 1 mod q, 0 mod rest
            e = rest * pow(rest, -1, q) % ring.n
            sub = ring_make(f"Z/{q}")
            factors.append(LocalFactor(
                ring=sub,
                project=lambda x, q=q: x % q,
                embed=lambda x, e=e, n=ring.n: (x * e) % n,
                idempotent=e,
                maximal_ideal=Ideal.of(ring, p),
            ))
        return CrtSplit(ring, tuple(factors))
    if isinstance(ring, FieldTable):
        return CrtSplit(ring, (LocalFactor(ring, lambda x: x, lambda x: x,
                                           ring.one, Ideal.of(ring, 0)),))
    if isinstance(ring, ProductRing):
        factors = []
        for i, f in enumerate(ring.factors):
            inner = crt_split(f)
            for lf in inner.factors:
                def project(x, i=i, lf=lf):
                    return lf.project(x[i])

                def embed(x, i=i, lf=lf):
                    return ring.embed(i, lf.embed(x))

                max_ideal = Ideal(ring, tuple(
                    lf.maximal_ideal if j == i else Ideal.of(g, g.one)
                    for j, g in enumerate(ring.factors)))
                factors.append(LocalFactor(lf.ring, project, embed,
                                           ring.embed(i, lf.idempotent), max_ideal))
        return CrtSplit(ring, tuple(factors))
    raise RingError(f"cannot CRT-split {ring.descriptor}")


def maximal_ideals(ring: Ring) -> list[Ideal]:
    return [f.maximal_ideal for f in crt_split(ring).factors]


# ---------------------------------------------------------------------------
# ring automorphisms


@dataclass(frozen=True)
class RingAut:
    ring: Ring
    table: tuple  # pairs (x, image) sorted, the full graph of the map
    name: str

    def __call__(self, x):
        if not self.table:
            # empty table marks the identity on an infinite ring
            return x
        m = self.__dict__.get("_map")
        if m is None:
            m = dict(self.table)
            object.__setattr__(self, "_map", m)
        return m[x]

    def compose(self, other: "RingAut") -> "RingAut":
        """self after other."""
        pairs = tuple(sorted((x, self(y)) for x, y in other.table))
        return RingAut(self.ring, pairs, f"{self.name}*{other.name}")

    def inverse(self) -> "RingAut":
        pairs = tuple(sorted((y, x) for x, y in self.table))
        return RingAut(self.ring, pairs, f"{self.name}^-1")

    @property
    def is_identity(self) -> bool:
        return all(x == y for x, y in self.table)

    def same_map(self, other: "RingAut") -> bool:
        return self.table == other.table


def _aut_from_fn(ring: Ring, fn, name: str) -> RingAut:
    pairs = tuple(sorted((x, fn(x)) for x in ring.elements()))
    return RingAut(ring, pairs, name)


def is_ring_automorphism(ring: Ring, table: dict) -> bool:
    """Exhaustive check of a parameter table against the ring axioms."""
    els = list(ring.elements())
    if sorted(table.keys(), key=repr) != sorted(els, key=repr):
        return False
    if sorted(table.values(), key=repr) != sorted(els, key=repr):
        return False
    if table[ring.one] != ring.one:
        return False
    for a in els:
        for b in els:
            if table[ring.add(a, b)] != ring.add(table[a], table[b]):
                return False
            if table[ring.mul(a, b)] != ring.mul(table[a], table[b]):
                return False
    return True


def ring_automorphisms(ring: Ring) -> tuple[RingAut, ...]:
    """All ring automorphisms; identity first, order deterministic."""
    if isinstance(ring, ZRing):
        return (RingAut(ring, (), "id"),)
    if isinstance(ring, ZMod):
        return (_aut_from_fn(ring, lambda x: x, "id"),)
    if isinstance(ring, FieldTable):
        out = []
        for i in range(ring.k):
            out.append(_aut_from_fn(ring, lambda x, i=i: ring.power(x, ring.p ** i),
                                    "id" if i == 0 else f"frob^{i}"))
        return tuple(out)
    if isinstance(ring, ProductRing):
        per_factor = [ring_automorphisms(f) for f in ring.factors]
        m = len(ring.factors)
        out = []
        for perm in itertools.permutations(range(m)):
            if any(ring.factors[perm[i]].descriptor != ring.factors[i].descriptor
                   for i in range(m)):
                continue
            for combo in itertools.product(*per_factor):
                def fn(x, perm=perm, combo=combo):
                    # factor j of the image comes from factor perm^-1(j)... with
                    # equal descriptors we can read it as x[perm[j]] twisted.
                    return tuple(combo[j](x[perm[j]]) for j in range(m))
                name = f"perm{perm}+" + ",".join(c.name for c in combo)
                out.append(_aut_from_fn(ring, fn, name))
        dedup: list[RingAut] = []
        for aut in out:
            if not any(aut.same_map(o) for o in dedup):
                dedup.append(aut)
        dedup.sort(key=lambda a: (not a.is_identity, a.table))
        return tuple(dedup)
    raise RingError(f"no automorphism enumeration for {ring.descriptor}")


# ---------------------------------------------------------------------------
# localization oracle (validation only)


def localize_at_prime(ring: ZMod, p: int):
    """Fraction construction S^-1(Z/n) at S = complement of (p).

    Returns (classes, canonical) where classes is the list of equivalence
    classes of pairs (a, s) and canonical maps x in Z/n to its class index.
    Used only as an oracle to validate crt_split.
    """
    if not isinstance(ring, ZMod):
        raise RingError("localization oracle is for Z/n only")
    if ring.n % p != 0:
        raise RingError(f"{p} does not divide {ring.n}")
    s_set = [s for s in ring.elements() if s % p != 0]
    pairs = [(a, s) for a in ring.elements() for s in s_set]

    def equivalent(x, y):
        a, s = x
        b, t = y
        return any((a * t - b * s) * u % ring.n == 0 for u in s_set)

    classes: list[list[tuple[int, int]]] = []
    index: dict[tuple[int, int], int] = {}
    for pair in pairs:
        for ci, cls in enumerate(classes):
            if equivalent(pair, cls[0]):
                cls.append(pair)
                index[pair] = ci
                break
        else:
            index[pair] = len(classes)
            classes.append([pair])

    def canonical(x):
        return index[(x % ring.n, 1)]

    return classes, canonical
