"""Decomposition of automorphisms into graph * inner * ring components.

The input is a table of images for the generators x_root(t), with t ranging
over 1 and the additive generators of the finite ring.  The pipeline:

  precheck   extend the table additively, then test what can be tested
             cheaply: invertibility, additive orders, injectivity per root,
             and the commutator pattern at parameter 1.
  split      carve the ring into local factors along its idempotents and
             locate, for every factor, the factor its generators map into.
  match      over each local factor, try the diagram symmetries in order;
             untwist the images, solve the linear intertwining equations for
             a conjugating matrix, and keep a solution only if it factors
             through the big cell (a Weyl translate of U^- T U^+).  The
             factorization is the proof that the inner part is strictly
             inner, and it doubles as the certificate's conjugator word.
  ringmap    the residual map then fixes every x_root(1); read the parameter
             map off the unipotent slots and check it is a ring automorphism.
  certify    reassemble the factor data over the whole ring through the
             idempotents and replay every image exactly.

A certificate is only ever emitted after the replay, so a bad input can
waste time but cannot produce a false certificate.  Failures carry the stage
name and a witness.

Big-cell factorization notes: in the basis ordered by descending coweight
height, elements of U^- are unit lower triangular and T U^+ is upper
triangular with unit diagonal entries, so a plain LU split either recovers
the factors or proves the element is outside the cell.  Candidates are only
determined up to a scalar (the adjoint representation cannot see scalars),
so the scalar is read off the Cartan block and divided out before fitting.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from chevalley.autos import GraphData, graph_data
from chevalley.group import (
    GroupElement,
    chain_coefficients,
    chain_pairs,
    commutator,
    from_word,
    group_for,
    identity_element,
    torus_chi,
    unipotent,
)
from chevalley.liealg import AdjointAlgebra
from chevalley.linalg import (
    Matrix,
    identity,
    is_identity,
    mat_map,
    mat_mul,
    mat_scale,
    mat_sub,
    matrix,
    ring_invert,
)
from chevalley.recover import recover_family, recovery_regime
from chevalley.rings import (
    Ring,
    crt_split,
    is_ring_automorphism,
    ring_automorphisms,
    ring_make,
)
from chevalley.roots import DiagramSymmetry, Root, diagram_symmetries


class CertifyError(Exception):
    """A refusal, tagged with the pipeline stage that detected it."""

    def __init__(self, stage: str, detail: str, witness: Optional[dict] = None):
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
        self.detail = detail
        self.witness = witness or {}

    def to_json(self) -> dict:
        return {"error": {"stage": self.stage, "detail": self.detail,
                          "witness": self.witness}}


# ---------------------------------------------------------------------------
# spanning parameters and additive coordinates


def spanning_params(ring: Ring) -> Tuple:
    """1 together with the additive generators of the ring."""
    out = [ring.one]
    for g in _additive_generators(ring):
        if g not in out:
            out.append(g)
    return tuple(out)


def _additive_generators(ring: Ring) -> List:
    if hasattr(ring, "additive_generators"):
        return list(ring.additive_generators())
    if hasattr(ring, "factors"):
        out = []
        for i, f in enumerate(ring.factors):
            for g in _additive_generators(f):
                out.append(ring.embed(i, g))
        return out
    return [ring.one]


def _additive_coords(ring: Ring, t) -> List[Tuple[object, int]]:
    """t as an integer combination of the spanning generators."""
    if hasattr(ring, "factors"):
        out = []
        for i, f in enumerate(ring.factors):
            for g, c in _additive_coords(f, t[i]):
                out.append((ring.embed(i, g), c))
        return out
    if hasattr(ring, "p"):
        digits = []
        v = t
        for g in ring.additive_generators():
            digits.append((g, v % ring.p))
            v //= ring.p
        return digits
    return [(ring.one, t)]


def _mat_pow_int(ring: Ring, m: Matrix, k: int) -> Matrix:
    out = identity(ring, len(m))
    base = m
    while k:
        if k & 1:
            out = mat_mul(ring, out, base)
        base = mat_mul(ring, base, base)
        k >>= 1
    return out


# ---------------------------------------------------------------------------
# the spec


@dataclass(frozen=True)
class AutomorphismSpec:
    """Generator images of a would-be automorphism of the elementary group."""

    system: str
    ring: str
    images: Tuple[Tuple[Tuple[Root, object], Matrix], ...]

    def image_dict(self) -> Dict[Tuple[Root, object], Matrix]:
        return dict(self.images)

    def to_json(self) -> dict:
        ring = ring_make(self.ring)
        return {
            "system": self.system,
            "ring": self.ring,
            "images": [
                {"root": list(root), "param": ring.element_to_json(t),
                 "matrix": [[ring.element_to_json(v) for v in row] for row in m]}
                for (root, t), m in self.images
            ],
        }


def spec_from_json(data: dict) -> AutomorphismSpec:
    try:
        system = data["system"]
        ring_name = data["ring"]
        ring = ring_make(ring_name)
        if not getattr(ring, "size", None):
            raise CertifyError("precheck", "decomposition needs a finite ring, "
                               f"got {ring_name}")
        sysm, _ = group_for(system)
        valid = set(ring.elements())
        images = []
        for entry in data["images"]:
            root = tuple(entry["root"])
            if not sysm.is_root(root):
                raise CertifyError("precheck", f"{root} is not a root of {system}")
            t = ring.element_from_json(entry["param"])
            rows = []
            for raw in entry["matrix"]:
                row = tuple(ring.element_from_json(v) for v in raw)
                if any(v not in valid for v in row):
                    raise CertifyError("precheck", "matrix entry outside the ring")
                rows.append(row)
            if t not in valid:
                raise CertifyError("precheck", "parameter outside the ring")
            images.append(((root, t), matrix(rows)))
        return AutomorphismSpec(system, ring_name, tuple(images))
    except CertifyError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CertifyError("precheck", f"malformed spec: {exc}") from exc


def spec_from_elements(system: str, ring: Ring,
                       table: Dict[Tuple[Root, object], Matrix]) -> AutomorphismSpec:
    items = tuple(sorted(table.items(), key=lambda kv: (kv[0][0], _sort_key(kv[0][1]))))
    return AutomorphismSpec(system, ring.descriptor, items)


def _sort_key(elt):
    return (0, elt) if isinstance(elt, int) else (1, elt)


# ---------------------------------------------------------------------------
# precheck: orders, injectivity, commutator pattern; extends the table


def _additive_order(ring: Ring, t) -> int:
    k, acc = 1, t
    while acc != ring.zero:
        acc = ring.add(acc, t)
        k += 1
    return k


def precheck(spec: AutomorphismSpec, alg: Optional[AdjointAlgebra] = None):
    """Validate the supplied images and extend them to every parameter.

    Returns the extended table mapping (root, t) for every t in the ring to
    GroupElements.  Raises CertifyError("precheck", ...) on any violation.
    """
    if alg is None:
        _, alg = group_for(spec.system)
    sysm = alg.system
    ring = ring_make(spec.ring)
    if not getattr(ring, "size", None):
        raise CertifyError("precheck", "decomposition needs a finite ring, "
                           f"got {spec.ring}")
    span = spanning_params(ring)
    provided = spec.image_dict()

    want = {(root, t) for root in sysm.roots for t in span}
    have = set(provided)
    if have != want:
        missing = sorted(want - have)[:3]
        extra = sorted(have - want)[:3]
        raise CertifyError(
            "precheck",
            "images must cover exactly the roots times the spanning parameters",
            {"missing": [_key_json(ring, k) for k in missing],
             "extra": [_key_json(ring, k) for k in extra]})

    base: Dict[Tuple[Root, object], GroupElement] = {}
    for (root, t), m in provided.items():
        inv = ring_invert(ring, m)
        if inv is None:
            raise CertifyError("precheck", "image matrix is not invertible",
                               {"key": _key_json(ring, (root, t))})
        if _additive_order(ring, t) != _matrix_order(ring, m, ring.size):
            raise CertifyError("precheck", "not bijective on parameters",
                               {"key": _key_json(ring, (root, t))})
        base[(root, t)] = GroupElement(ring, m, inv, None)

    # extend additively over the spanning generators, in a fixed order
    table: Dict[Tuple[Root, object], GroupElement] = {}
    ident = identity_element(alg, ring)
    for root in sysm.roots:
        seen = {}
        for t in ring.elements():
            acc = ident
            for g, c in _additive_coords(ring, t):
                if c:
                    p = _mat_pow_int(ring, base[(root, g)].mat, c)
                    pi = _mat_pow_int(ring, base[(root, g)].inv_mat, c)
                    acc = acc.mul(GroupElement(ring, p, pi, None))
            table[(root, t)] = acc
            if acc.mat in seen:
                raise CertifyError("precheck", "not bijective on parameters",
                                   {"root": list(root),
                                    "params": [ring.element_to_json(seen[acc.mat]),
                                               ring.element_to_json(t)]})
            seen[acc.mat] = t

    # one-parameter law inside the provided set
    for root in sysm.roots:
        for s, t in itertools.product(span, repeat=2):
            got = base[(root, s)].mul(base[(root, t)])
            if got != table[(root, ring.add(s, t))]:
                raise CertifyError("precheck", "one-parameter law fails",
                                   {"key": _key_json(ring, (root, s)),
                                    "other": ring.element_to_json(t)})

    # commutator pattern at parameter 1
    one = ring.one
    for r, s in itertools.permutations(sysm.roots, 2):
        if r == sysm.negate(s):
            continue
        lhs = commutator(table[(r, one)], table[(s, one)])
        rhs = ident
        coeffs = _chain_table(alg, r, s)
        for (i, j) in chain_pairs(sysm, r, s):
            gamma = tuple(i * a + j * b for a, b in zip(r, s))
            rhs = rhs.mul(table[(gamma, ring.from_int(coeffs[(i, j)]))])
        if lhs != rhs:
            raise CertifyError("precheck", "commutator pattern fails",
                               {"roots": [list(r), list(s)]})
    return table


def _matrix_order(ring: Ring, m: Matrix, cap: int) -> int:
    acc = m
    for k in range(1, cap + 1):
        if is_identity(ring, acc):
            return k
        acc = mat_mul(ring, acc, m)
    return cap + 1


def _key_json(ring: Ring, key) -> dict:
    root, t = key
    return {"root": list(root), "param": ring.element_to_json(t)}


_CHAIN_CACHE: Dict[Tuple[str, Root, Root], dict] = {}


def _chain_table(alg: AdjointAlgebra, r: Root, s: Root) -> dict:
    key = (alg.system.name, r, s)
    if key not in _CHAIN_CACHE:
        _CHAIN_CACHE[key] = chain_coefficients(alg, r, s)
    return _CHAIN_CACHE[key]


# ---------------------------------------------------------------------------
# splitting along idempotents


@dataclass
class FactorProblem:
    index: int                  # position in crt_split(ring).factors
    target: int                 # factor index the images land in
    ring: Ring                  # the local ring (source and target agree)
    table: Dict[Tuple[Root, object], GroupElement]


def split_local(spec_table, alg: AdjointAlgebra, ring: Ring) -> List[FactorProblem]:
    """Locate each factor's image factor and project the tables locally.

    The transport test is the generator-level shadow of the fact that an
    automorphism maps the kernel of reduction at one maximal ideal onto the
    kernel at another: every image of a generator supported on one idempotent
    must be trivial in all but one factor.
    """
    split = crt_split(ring)
    factors = split.factors
    if len(factors) == 1:
        return [FactorProblem(0, 0, factors[0].ring, dict(spec_table))]

    sysm = alg.system
    sigma: Dict[int, int] = {}
    for j, lf in enumerate(factors):
        hit = set()
        for t in lf.ring.elements():
            if t == lf.ring.zero:
                continue
            lifted = lf.embed(t)
            for root in sysm.roots:
                m = spec_table[(root, lifted)].mat
                for k, other in enumerate(factors):
                    proj = mat_map(other.project, m)
                    if not is_identity(other.ring, proj):
                        hit.add(k)
        if len(hit) != 1:
            raise CertifyError(
                "split", "factor images do not land in a single factor",
                {"factor": j, "hit": sorted(hit)})
        sigma[j] = hit.pop()

    if sorted(sigma.values()) != list(range(len(factors))):
        raise CertifyError("split", "factor correspondence is not a bijection",
                           {"sigma": sigma})
    for j, k in sigma.items():
        if factors[j].ring.descriptor != factors[k].ring.descriptor:
            raise CertifyError("split", "factor mapped to a non-isomorphic factor",
                               {"factor": j, "target": k})

    problems = []
    for j, lf in enumerate(factors):
        target = factors[sigma[j]]
        local: Dict[Tuple[Root, object], GroupElement] = {}
        for t in lf.ring.elements():
            lifted = lf.embed(t)
            for root in sysm.roots:
                g = spec_table[(root, lifted)]
                local[(root, t)] = GroupElement(
                    target.ring,
                    mat_map(target.project, g.mat),
                    mat_map(target.project, g.inv_mat),
                    None)
        problems.append(FactorProblem(j, sigma[j], lf.ring, local))
    return problems


# ---------------------------------------------------------------------------
# intertwining equations


def _flatten(m: Matrix) -> Tuple:
    return tuple(v for row in m for v in row)


def _reshape(vec, n: int) -> Matrix:
    return tuple(tuple(vec[i * n + j] for j in range(n)) for i in range(n))


def _intertwiner_basis(ring: Ring, pairs: List[Tuple[Matrix, Matrix]]) -> List[Tuple]:
    """Basis of {M : M X = Y M for every supplied pair}, as flat vectors."""
    from chevalley.linalg import local_nullspace

    n = len(pairs[0][0])
    nn = n * n
    basis: List[Tuple] = []
    for a in range(nn):
        vec = [ring.zero] * nn
        vec[a] = ring.one
        basis.append(tuple(vec))
    for x_mat, y_mat in pairs:
        cols = []
        for vec in basis:
            mb = _reshape(vec, n)
            resid = mat_sub(ring, mat_mul(ring, mb, x_mat), mat_mul(ring, y_mat, mb))
            cols.append(_flatten(resid))
        rows = tuple(tuple(col[i] for col in cols) for i in range(nn))
        coords = local_nullspace(ring, rows)
        if not coords:
            return []
        new_basis = []
        for coord in coords:
            acc = [ring.zero] * nn
            for c, vec in zip(coord, basis):
                if c == ring.zero:
                    continue
                for i, v in enumerate(vec):
                    if v != ring.zero:
                        acc[i] = ring.add(acc[i], ring.mul(c, v))
            new_basis.append(tuple(acc))
        basis = new_basis
        if not basis:
            return []
    return basis


def _invertible_candidates(ring: Ring, basis: List[Tuple], n: int,
                           cap: int = 24) -> List[Tuple[Matrix, Matrix]]:
    out: List[Tuple[Matrix, Matrix]] = []
    seen = set()

    def consider(vec):
        if len(out) >= cap:
            return
        m = _reshape(vec, n)
        if m in seen:
            return
        seen.add(m)
        inv = ring_invert(ring, m)
        if inv is not None:
            out.append((m, inv))

    for vec in basis:
        consider(vec)
    for a, b in itertools.combinations(range(len(basis)), 2):
        consider(tuple(ring.add(x, y) for x, y in zip(basis[a], basis[b])))
        consider(tuple(ring.sub(x, y) for x, y in zip(basis[a], basis[b])))
    rng = random.Random(9173)
    units = [u for u in ring.units()] if ring.size and ring.size <= 16 else [ring.one]
    for _ in range(40):
        if len(out) >= cap or not basis:
            break
        vec = [ring.zero] * len(basis[0])
        for b in basis:
            c = units[rng.randrange(len(units))] if rng.random() < 0.7 else ring.zero
            if c == ring.zero:
                continue
            for i, v in enumerate(b):
                vec[i] = ring.add(vec[i], ring.mul(c, v))
        consider(tuple(vec))
    return out


# ---------------------------------------------------------------------------
# big-cell factorization: the strict-innerness test and word extraction


@lru_cache(maxsize=None)
def _weight_perm(system_name: str) -> Tuple[int, ...]:
    from chevalley.roots import system_from_name

    sysm = system_from_name(system_name)
    nroots = len(sysm.roots)

    def h(i: int) -> int:
        return sum(sysm.roots[i]) if i < nroots else 0

    return tuple(sorted(range(sysm.dimension), key=lambda i: (-h(i), i)))


@lru_cache(maxsize=None)
def _weyl_words(system_name: str) -> Tuple[Tuple[int, ...], ...]:
    """Words in simple reflections for every Weyl group element, BFS order."""
    from chevalley.roots import system_from_name

    sysm = system_from_name(system_name)
    nroots = len(sysm.roots)
    ident = tuple(range(nroots))
    simple_maps = []
    for i in range(sysm.rank):
        alpha = sysm.simple(i)
        simple_maps.append(tuple(
            sysm.root_index(sysm.reflect(sysm.roots[j], alpha))
            for j in range(nroots)))
    seen = {ident: ()}
    frontier = [ident]
    order = [()]
    while frontier:
        nxt = []
        for img in frontier:
            word = seen[img]
            for i, smap in enumerate(simple_maps):
                img2 = tuple(img[smap[j]] for j in range(nroots))
                if img2 not in seen:
                    seen[img2] = word + (i,)
                    nxt.append(img2)
                    order.append(word + (i,))
        frontier = nxt
    return tuple(order)


_WEYL_ELEMS: Dict[Tuple[str, str], Tuple[GroupElement, ...]] = {}


def _weyl_elements(alg: AdjointAlgebra, ring: Ring) -> Tuple[GroupElement, ...]:
    key = (alg.system.name, ring.descriptor)
    if key not in _WEYL_ELEMS:
        elems = []
        for word in _weyl_words(alg.system.name):
            tokens = tuple(("w", alg.system.simple(i), ring.one) for i in word)
            elems.append(from_word(alg, ring, tokens))
        _WEYL_ELEMS[key] = tuple(elems)
    return _WEYL_ELEMS[key]


def _lu_unit_diag(ring: Ring, m: Matrix):
    """Doolittle split m = L U with L unit lower triangular, or None."""
    n = len(m)
    work = [list(row) for row in m]
    lower = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    for k in range(n):
        pivot = work[k][k]
        if not ring.is_unit(pivot):
            return None
        pinv = ring.inv(pivot)
        for i in range(k + 1, n):
            f = ring.mul(work[i][k], pinv)
            if f == ring.zero:
                continue
            lower[i][k] = f
            wi, wk = work[i], work[k]
            for j in range(k, n):
                wi[j] = ring.sub(wi[j], ring.mul(f, wk[j]))
    return matrix(lower), matrix([tuple(row) for row in work])


def _fit_unipotent(alg: AdjointAlgebra, ring: Ring, target: Matrix, sign: int):
    """target as a product of root elements of one sign; tokens or None."""
    sysm = alg.system
    tokens = []
    acc = identity(ring, alg.dim)
    for beta in sysm.positives:
        root = beta if sign > 0 else sysm.negate(beta)
        (i, j), unit = alg._slot(root)
        diff = ring.sub(target[i][j], acc[i][j])
        t = ring.mul(diff, ring.from_int(unit))
        if t != ring.zero:
            tokens.append(("x", root, t))
            acc = mat_mul(ring, acc, unipotent(alg, ring, root, t).mat)
    if acc != target:
        return None
    return tuple(tokens)


def _big_cell(alg: AdjointAlgebra, ring: Ring, m: Matrix):
    """m = c * (u^- chi u^+) for a unit scalar c; the element, or None."""
    sysm = alg.system
    perm = _weight_perm(sysm.name)
    n = alg.dim
    permuted = tuple(tuple(m[perm[i]][perm[j]] for j in range(n)) for i in range(n))
    lu = _lu_unit_diag(ring, permuted)
    if lu is None:
        return None
    lower_p, upper_p = lu
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    lower = tuple(tuple(lower_p[inv[i]][inv[j]] for j in range(n)) for i in range(n))
    upper = tuple(tuple(upper_p[inv[i]][inv[j]] for j in range(n)) for i in range(n))

    nroots = len(sysm.roots)
    scalar = upper[nroots][nroots]
    if not ring.is_unit(scalar):
        return None
    upper = mat_scale(ring, ring.inv(scalar), upper)

    units = tuple(upper[sysm.root_index(sysm.simple(j))][sysm.root_index(sysm.simple(j))]
                  for j in range(sysm.rank))
    if any(not ring.is_unit(u) for u in units):
        return None
    chi = torus_chi(alg, ring, units)
    for i in range(n):
        if upper[i][i] != chi.mat[i][i]:
            return None

    down = _fit_unipotent(alg, ring, lower, -1)
    if down is None:
        return None
    up = _fit_unipotent(alg, ring, mat_mul(ring, chi.inv_mat, upper), +1)
    if up is None:
        return None
    word = down + (("chi", units, None),) + up
    elem = from_word(alg, ring, word)
    if mat_scale(ring, scalar, elem.mat) != m:
        return None
    return elem


def strictly_inner_element(alg: AdjointAlgebra, ring: Ring, m: Matrix):
    """A group element with the same conjugation action as m, or None.

    Scans Weyl translates of the big cell; over a local ring this covers the
    whole group generated by the root elements and the torus, so failure
    means the candidate is not an inner conjugator.
    """
    for w_elem in _weyl_elements(alg, ring):
        cell = _big_cell(alg, ring, mat_mul(ring, w_elem.inv_mat, m))
        if cell is not None:
            return w_elem.mul(cell)
    return None


# ---------------------------------------------------------------------------
# per-factor matching


@dataclass
class FactorResult:
    index: int
    target: int
    ring: Ring
    delta: DiagramSymmetry
    graph: Optional[GraphData]
    conjugator: GroupElement
    rho: Tuple[Tuple[object, object], ...]


def _twist_table(alg, ring, table, gd):
    if gd is None:
        return table
    lam, lam_inv = gd.matrices(ring)
    out = {}
    for key, g in table.items():
        out[key] = GroupElement(ring,
                                mat_mul(ring, mat_mul(ring, lam_inv, g.mat), lam),
                                mat_mul(ring, mat_mul(ring, lam_inv, g.inv_mat), lam),
                                None)
    return out


def _residual_rho(alg: AdjointAlgebra, ring: Ring, conj: GroupElement, table):
    """Parameter map of the residual, or an error detail dict."""
    sysm = alg.system
    rho: Dict[object, object] = {}
    for t in ring.elements():
        value = None
        for root in sysm.roots:
            resid = mat_mul(ring, mat_mul(ring, conj.inv_mat, table[(root, t)].mat),
                            conj.mat)
            (i, j), unit = alg._slot(root)
            s = ring.mul(resid[i][j], ring.from_int(unit))
            if resid != unipotent(alg, ring, root, s).mat:
                return None, {"reason": "residual is not a root element",
                              "key": _key_json(ring, (root, t))}
            if value is None:
                value = s
            elif value != s:
                return None, {"reason": "parameter image differs across roots",
                              "key": _key_json(ring, (root, t))}
        rho[t] = value
    if rho[ring.one] != ring.one:
        return None, {"reason": "residual moves the unit parameter"}
    if not is_ring_automorphism(ring, rho):
        return None, {"reason": "parameter map is not a ring automorphism"}
    return tuple(sorted(rho.items(), key=lambda kv: _sort_key(kv[0]))), None


def _match_local(alg: AdjointAlgebra, ring: Ring, table, problem_tag):
    """Search (delta, conjugator, rho) for one local factor."""
    sysm = alg.system
    one = ring.one
    regime = recovery_regime(sysm, ring)
    deepest = CertifyError("match", "no diagram symmetry admits a strictly "
                           "inner intertwiner", {"factor": problem_tag})
    for delta in diagram_symmetries(sysm):
        gd = None if delta.is_identity else graph_data(alg, delta)
        twisted = _twist_table(alg, ring, table, gd)
        if regime is not None:
            lie_images = recover_family(
                alg, ring, {root: twisted[(root, one)].mat for root in sysm.roots})
            pairs = [(alg.x_matrix(root, ring), lie_images[root])
                     for root in sysm.roots]
        else:
            pairs = [(unipotent(alg, ring, root, one).mat, twisted[(root, one)].mat)
                     for root in sysm.roots]
        basis = _intertwiner_basis(ring, pairs)
        for m, _m_inv in _invertible_candidates(ring, basis, alg.dim):
            conj = strictly_inner_element(alg, ring, m)
            if conj is None:
                continue
            rho, err = _residual_rho(alg, ring, conj, twisted)
            if rho is None:
                err["factor"] = problem_tag
                deepest = CertifyError("ringmap", err.pop("reason"), err)
                continue
            return delta, gd, conj, rho
    raise deepest


def match_graph_and_conjugator(alg: AdjointAlgebra, ring: Ring, table):
    """The (delta, sign data, conjugator) of one local factor's images."""
    delta, gd, conj, _rho = _match_local(alg, ring, table, 0)
    eps = dict(gd.eps) if gd is not None else {root: 1 for root in alg.system.roots}
    return delta, eps, conj


def extract_ring_map(alg: AdjointAlgebra, ring: Ring, table,
                     delta: DiagramSymmetry, conj: GroupElement):
    """The residual parameter map once delta and the conjugator are fixed."""
    gd = None if delta.is_identity else graph_data(alg, delta)
    rho, err = _residual_rho(alg, ring, conj, _twist_table(alg, ring, table, gd))
    if rho is None:
        raise CertifyError("ringmap", err.pop("reason"), err)
    return rho


# ---------------------------------------------------------------------------
# the certificate


@dataclass
class FactorCertificate:
    ring: str
    source_idempotent: object
    target_idempotent: object
    delta: Tuple[int, ...]
    conjugator_word: Tuple
    rho: Tuple[Tuple[object, object], ...]


@dataclass
class Certificate:
    system: str
    ring: str
    factors: Tuple[FactorCertificate, ...]
    lambda_mat: Matrix
    lambda_inv: Matrix
    conjugator: Matrix
    conjugator_inv: Matrix
    rho: Tuple[Tuple[object, object], ...]
    report: dict

    def rho_map(self) -> dict:
        return dict(self.rho)

    def apply(self, alg: AdjointAlgebra, ring: Ring, root: Root, t) -> Matrix:
        """The image of x_root(t) under the certified standard automorphism."""
        inner = unipotent(alg, ring, root, self.rho_map()[t]).mat
        conj = mat_mul(ring, mat_mul(ring, self.conjugator, inner),
                       self.conjugator_inv)
        return mat_mul(ring, mat_mul(ring, self.lambda_mat, conj), self.lambda_inv)

    def to_json(self) -> dict:
        ring = ring_make(self.ring)

        def emat(m):
            return [[ring.element_to_json(v) for v in row] for row in m]

        factors = []
        for fc in self.factors:
            fring = ring_make(fc.ring)
            factors.append({
                "ring": fc.ring,
                "source_idempotent": ring.element_to_json(fc.source_idempotent),
                "target_idempotent": ring.element_to_json(fc.target_idempotent),
                "delta": list(fc.delta),
                "conjugator_word": [_token_json(fring, tok)
                                    for tok in fc.conjugator_word],
                "rho": [[fring.element_to_json(a), fring.element_to_json(b)]
                        for a, b in fc.rho],
            })
        return {
            "system": self.system,
            "ring": self.ring,
            "factors": factors,
            "global": {
                "lambda": emat(self.lambda_mat),
                "lambda_inv": emat(self.lambda_inv),
                "conjugator": emat(self.conjugator),
                "conjugator_inv": emat(self.conjugator_inv),
                "rho": [[ring.element_to_json(a), ring.element_to_json(b)]
                        for a, b in self.rho],
            },
            "report": self.report,
        }


def _token_json(ring: Ring, token) -> list:
    kind, root, t = token
    if kind == "chi":
        return ["chi", [ring.element_to_json(u) for u in root], None]
    return [kind, list(root), ring.element_to_json(t)]


def certify(spec: AutomorphismSpec) -> Certificate:
    """Decompose the spec or raise a stage-tagged CertifyError."""
    sysm, alg = group_for(spec.system)
    ring = ring_make(spec.ring)
    table = precheck(spec, alg)
    problems = split_local(table, alg, ring)
    split = crt_split(ring)
    factors = split.factors

    results: List[FactorResult] = []
    for problem in problems:
        delta, gd, conj, rho = _match_local(alg, problem.ring, problem.table,
                                            problem.index)
        results.append(FactorResult(problem.index, problem.target, problem.ring,
                                    delta, gd, conj, rho))

    # reassemble over the whole ring through the idempotents; factor data is
    # indexed by source, placed at its target slot
    by_target = {res.target: res for res in results}
    n = alg.dim

    def combine(per_factor):
        """per_factor: target index -> local matrix; entrywise recombination."""
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = ring.zero
                for k, lf in enumerate(factors):
                    acc = ring.add(acc, lf.embed(per_factor[k][i][j]))
                row.append(acc)
            rows.append(tuple(row))
        return matrix(rows)

    lam_parts, lam_inv_parts, conj_parts, conj_inv_parts = {}, {}, {}, {}
    for k, lf in enumerate(factors):
        res = by_target[k]
        if res.graph is not None:
            lam_k, lam_inv_k = res.graph.matrices(lf.ring)
        else:
            lam_k = lam_inv_k = identity(lf.ring, n)
        lam_parts[k] = lam_k
        lam_inv_parts[k] = lam_inv_k
        conj_parts[k] = res.conjugator.mat
        conj_inv_parts[k] = res.conjugator.inv_mat

    lam = combine(lam_parts)
    lam_inv = combine(lam_inv_parts)
    conj = combine(conj_parts)
    conj_inv = combine(conj_inv_parts)

    rho_global = []
    for t in ring.elements():
        parts = {}
        for res in results:
            local = dict(res.rho)[factors[res.index].project(t)]
            parts[res.target] = local
        value = ring.zero
        for k, lf in enumerate(factors):
            value = ring.add(value, lf.embed(parts[k]))
        rho_global.append((t, value))
    rho_global.sort(key=lambda kv: _sort_key(kv[0]))
    rho_dict = dict(rho_global)

    replayed = 0
    for root in sysm.roots:
        for t in ring.elements():
            inner = unipotent(alg, ring, root, rho_dict[t]).mat
            expected = mat_mul(ring, mat_mul(ring, lam,
                               mat_mul(ring, mat_mul(ring, conj, inner), conj_inv)),
                               lam_inv)
            if expected != table[(root, t)].mat:
                raise CertifyError("replay", "assembled automorphism does not "
                                   "reproduce an image",
                                   {"key": _key_json(ring, (root, t))})
            replayed += 1

    factor_certs = tuple(
        FactorCertificate(
            ring=res.ring.descriptor,
            source_idempotent=factors[res.index].idempotent,
            target_idempotent=factors[res.target].idempotent,
            delta=res.delta.perm,
            conjugator_word=res.conjugator.word,
            rho=res.rho,
        )
        for res in results)
    report = {"generators_replayed": replayed, "factors": len(factors),
              "spanning_parameters": len(spanning_params(ring))}
    return Certificate(spec.system, spec.ring, factor_certs, lam, lam_inv,
                       conj, conj_inv, tuple(rho_global), report)


# ---------------------------------------------------------------------------
# forging random standard automorphisms (for round-trip testing)


def forge_random_parts(system: str, ring_name: str, seed: int):
    """A random standard automorphism spec plus the planted components."""
    sysm, alg = group_for(system)
    ring = ring_make(ring_name)
    rng = random.Random(f"{system}|{ring_name}|{seed}")
    split = crt_split(ring)
    factors = split.factors
    n = alg.dim

    symmetries = diagram_symmetries(sysm)
    deltas = [rng.choice(symmetries) for _ in factors]
    lam_parts, lam_inv_parts = [], []
    for lf, delta in zip(factors, deltas):
        if delta.is_identity:
            lam_parts.append(identity(lf.ring, n))
            lam_inv_parts.append(identity(lf.ring, n))
        else:
            gd = graph_data(alg, delta)
            a, b = gd.matrices(lf.ring)
            lam_parts.append(a)
            lam_inv_parts.append(b)

    def combine(parts):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = ring.zero
                for lf, part in zip(factors, parts):
                    acc = ring.add(acc, lf.embed(part[i][j]))
                row.append(acc)
            rows.append(tuple(row))
        return matrix(rows)

    lam = combine(lam_parts)
    lam_inv = combine(lam_inv_parts)

    rho = rng.choice(ring_automorphisms(ring))
    units = [u for u in ring.units()]
    word = []
    for _ in range(rng.randrange(0, 6)):
        kind = rng.choice(("x", "x", "w", "h", "chi"))
        if kind == "chi":
            word.append(("chi", tuple(rng.choice(units) for _ in range(sysm.rank)),
                         None))
        elif kind == "x":
            word.append(("x", rng.choice(sysm.roots), ring.rand(rng)))
        else:
            word.append((kind, rng.choice(sysm.roots), rng.choice(units)))
    g = from_word(alg, ring, tuple(word))

    table: Dict[Tuple[Root, object], Matrix] = {}
    for root in sysm.roots:
        for t in spanning_params(ring):
            inner = unipotent(alg, ring, root, rho(t)).mat
            m = mat_mul(ring, mat_mul(ring, lam,
                        mat_mul(ring, mat_mul(ring, g.mat, inner), g.inv_mat)),
                        lam_inv)
            table[(root, t)] = m
    spec = spec_from_elements(system, ring, table)
    planted = {
        "lambda": lam,
        "lambda_inv": lam_inv,
        "conjugator": g,
        "rho": tuple(sorted(((t, rho(t)) for t in ring.elements()),
                            key=lambda kv: _sort_key(kv[0]))),
        "deltas": tuple(d.perm for d in deltas),
    }
    return spec, planted


def forge_random(system: str, ring_name: str, seed: int) -> AutomorphismSpec:
    spec, _ = forge_random_parts(system, ring_name, seed)
    return spec
