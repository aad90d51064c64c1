"""Command-line front end: construction dumps, verification suites,
random spec generation, and decomposition.

Artifacts are JSON with sorted keys, so identical flags and seeds produce
byte-identical output.  Wall-clock timings go to stderr, never into the
artifact.  The CHEV_THREADS environment variable bounds the worker pool for
verification suites; results are assembled in case order either way.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from chevalley.decomposer import (
    CertifyError,
    certify,
    forge_random,
    spec_from_json,
)
from chevalley.group import (
    chain_coefficients,
    chain_pairs,
    commutator_identity_holds,
    from_word,
    group_for,
    torus_alpha,
    unipotent,
    weyl,
)
from chevalley.linalg import identity, mat_mul
from chevalley.recover import recover_family, recovery_regime
from chevalley.rings import ring_make
from chevalley.roots import diagram_symmetries, system_from_name

SYSTEMS_DEFAULT = ("A2", "B2", "G2", "A3")
RINGS_DEFAULT = ("Z/4", "Z/5", "F4")

SUITE_MATRIX = {
    "laws": (SYSTEMS_DEFAULT, RINGS_DEFAULT),
    "eq1": (SYSTEMS_DEFAULT, RINGS_DEFAULT),
    "weyl": (SYSTEMS_DEFAULT, RINGS_DEFAULT),
    "commutator": (("A2", "B2", "G2"), ("Z/4", "Z/5")),
    "jacobi": (("A2", "B2", "G2", "A3", "C3"), ("Z",)),
    "recover": ((), ()),  # pairs listed separately, regimes are sparse
}

RECOVER_DEFAULT = (("A2", "Z/5"), ("B2", "Z/5"), ("G2", "Z/7"),
                   ("A3", "Z/4"), ("A3", "F4"), ("D4", "Z/2"))


def emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# construction dumps


def cmd_roots(args) -> int:
    sysm = system_from_name(args.system)
    doc = {
        "command": "roots",
        "system": sysm.name,
        "rank": sysm.rank,
        "dimension": sysm.dimension,
        "roots": [list(r) for r in sysm.roots],
        "positive_count": len(sysm.positives),
        "symmetries": [
            {"perm": list(d.perm), "order": d.order()}
            for d in diagram_symmetries(sysm)
        ],
    }
    emit(doc, args.out)
    return 0


def cmd_adjoint(args) -> int:
    sysm, alg = group_for(args.system)
    ring = ring_make(args.ring)
    doc = {
        "command": "adjoint",
        "system": sysm.name,
        "ring": ring.descriptor,
        "dimension": alg.dim,
        "basis": [list(r) for r in sysm.roots] + [["h", j] for j in range(sysm.rank)],
        "x": [
            {"root": list(r),
             "matrix": [[ring.element_to_json(v) for v in row]
                        for row in alg.x_matrix(r, ring)]}
            for r in sysm.roots
        ],
        "h": [
            {"index": j,
             "matrix": [[ring.element_to_json(v) for v in row]
                        for row in alg.h_matrix(j, ring)]}
            for j in range(sysm.rank)
        ],
    }
    emit(doc, args.out)
    return 0


# ---------------------------------------------------------------------------
# verification suites; each returns (checks, failures)


def _suite_laws(system: str, ring_name: str, seed: int):
    sysm, alg = group_for(system)
    ring = ring_make(ring_name)
    elems = list(ring.elements())
    checks, failures = 0, []
    for root in sysm.roots:
        mats = {t: unipotent(alg, ring, root, t) for t in elems}
        for s, t in itertools.product(elems, repeat=2):
            checks += 1
            if mats[s].mul(mats[t]) != mats[ring.add(s, t)]:
                failures.append({"check": "one-parameter-law",
                                 "root": list(root),
                                 "s": ring.element_to_json(s),
                                 "t": ring.element_to_json(t)})
        checks += 2
        if not mats[ring.zero].is_identity:
            failures.append({"check": "zero-is-identity", "root": list(root)})
        if any(mats[t].inv() != mats[ring.neg(t)] for t in elems):
            failures.append({"check": "inverse-is-negation", "root": list(root)})
    return checks, failures


def _suite_eq1(system: str, ring_name: str, seed: int):
    """h_alpha(u) x_beta(t) h_alpha(u)^-1 = x_beta(u^<beta,alpha> t)."""
    sysm, alg = group_for(system)
    ring = ring_make(ring_name)
    elems = list(ring.elements())
    units = ring.units()
    checks, failures = 0, []
    for alpha in sysm.roots:
        for u in units:
            h = torus_alpha(alg, ring, alpha, u)
            diag = [h.mat[i][i] for i in range(alg.dim)]
            dinv = [h.inv_mat[i][i] for i in range(alg.dim)]
            for beta in sysm.roots:
                p = sysm.pairing(beta, alpha)
                scale = ring.power(u, p) if p >= 0 else ring.power(ring.inv(u), -p)
                for t in elems:
                    checks += 1
                    x = unipotent(alg, ring, beta, t).mat
                    conj = tuple(
                        tuple(ring.mul(diag[i], ring.mul(x[i][j], dinv[j]))
                              for j in range(alg.dim))
                        for i in range(alg.dim))
                    if conj != unipotent(alg, ring, beta, ring.mul(scale, t)).mat:
                        failures.append({
                            "check": "torus-conjugation",
                            "alpha": list(alpha), "beta": list(beta),
                            "u": ring.element_to_json(u),
                            "t": ring.element_to_json(t)})
    return checks, failures


def _suite_weyl(system: str, ring_name: str, seed: int):
    """w_alpha(1) x_beta(t) w_alpha(1)^-1 = x_{s_alpha beta}(sign * t)."""
    sysm, alg = group_for(system)
    ring = ring_make(ring_name)
    elems = list(ring.elements())
    checks, failures = 0, []
    for alpha in sysm.roots:
        w = weyl(alg, ring, alpha, ring.one)
        for beta in sysm.roots:
            gamma = sysm.reflect(beta, alpha)
            (i, j), unit = alg._slot(gamma)
            conj1 = mat_mul(ring, mat_mul(ring, w.mat,
                            unipotent(alg, ring, beta, ring.one).mat), w.inv_mat)
            sign = ring.mul(conj1[i][j], ring.from_int(unit))
            checks += 1
            if ring.mul(sign, sign) != ring.one:
                failures.append({"check": "weyl-sign-not-unit",
                                 "alpha": list(alpha), "beta": list(beta)})
                continue
            for t in elems:
                checks += 1
                conj = mat_mul(ring, mat_mul(ring, w.mat,
                               unipotent(alg, ring, beta, t).mat), w.inv_mat)
                if conj != unipotent(alg, ring, gamma, ring.mul(sign, t)).mat:
                    failures.append({"check": "weyl-conjugation",
                                     "alpha": list(alpha), "beta": list(beta),
                                     "t": ring.element_to_json(t)})
    return checks, failures


def _suite_jacobi(system: str, ring_name: str, seed: int):
    """Jacobi identity on basis triples, over the integers.

    Structure constants are integral, so vanishing over Z settles every ring;
    the suite also rechecks the extraspecial-pair sizes and the integrality
    of the divided powers for the system.
    """
    sysm, alg = group_for(system)
    keys = list(sysm.roots) + list(range(sysm.rank))
    triples = list(itertools.product(keys, repeat=3))
    rng = random.Random(seed)
    if len(triples) > 12000:
        triples = rng.sample(triples, 12000)
    checks, failures = 0, []
    for a, b, c in triples:
        checks += 1
        jac = {}
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            part = alg.bracket_dict(alg.bracket_basis(u, v), {w: 1})
            for k, val in part.items():
                acc = jac.get(k, 0) + val
                if acc:
                    jac[k] = acc
                elif k in jac:
                    del jac[k]
        if jac:
            failures.append({"check": "jacobi",
                             "triple": [_key_label(k) for k in (a, b, c)]})
    for r, s in itertools.permutations(sysm.roots, 2):
        total = tuple(x + y for x, y in zip(r, s))
        if not sysm.is_root(total):
            continue
        checks += 1
        down = 0
        probe = r
        while True:
            prev = tuple(x - y for x, y in zip(probe, s))
            if not sysm.is_root(prev):
                break
            probe = prev
            down += 1
        if abs(alg.n_const(r, s)) != down + 1:
            failures.append({"check": "extraspecial-size",
                             "pair": [list(r), list(s)]})
    for root in sysm.roots:
        checks += 1
        try:
            alg.divided_powers(root)
        except AssertionError:
            failures.append({"check": "divided-power-integrality",
                             "root": list(root)})
    return checks, failures


def _suite_commutator(system: str, ring_name: str, seed: int):
    sysm, alg = group_for(system)
    ring = ring_make(ring_name)
    elems = list(ring.elements())
    checks, failures = 0, []
    for r, s in itertools.permutations(sysm.roots, 2):
        if r == sysm.negate(s):
            continue
        coeffs = chain_coefficients(alg, r, s)
        for t, u in itertools.product(elems, repeat=2):
            checks += 1
            if not commutator_identity_holds(alg, ring, r, s, t, u, coeffs):
                failures.append({"check": "chevalley-commutator",
                                 "r": list(r), "s": list(s),
                                 "t": ring.element_to_json(t),
                                 "u": ring.element_to_json(u)})
    return checks, failures


def _suite_recover(system: str, ring_name: str, seed: int):
    sysm, alg = group_for(system)
    ring = ring_make(ring_name)
    regime = recovery_regime(sysm, ring)
    if regime is None:
        raise UnsupportedCase(
            f"no recovery regime for {system} over {ring_name}: needs an "
            "invertible 2 (and 3 for G2) or a simply-laced system of rank "
            "at least 3")
    rng = random.Random(seed)
    units = ring.units()
    checks, failures = 0, []
    for trial in range(5):
        word = []
        for _ in range(rng.randrange(0, 5)):
            kind = rng.choice(("x", "w", "h"))
            root = rng.choice(sysm.roots)
            t = ring.rand(rng) if kind == "x" else rng.choice(units)
            word.append((kind, root, t))
        g = from_word(alg, ring, tuple(word))
        family = {root: mat_mul(ring, mat_mul(ring, g.mat,
                  unipotent(alg, ring, root, ring.one).mat), g.inv_mat)
                  for root in sysm.roots}
        got = recover_family(alg, ring, family)
        for root in sysm.roots:
            checks += 1
            want = mat_mul(ring, mat_mul(ring, g.mat, alg.x_matrix(root, ring)),
                           g.inv_mat)
            if got[root] != want:
                failures.append({"check": "recover-conjugated-family",
                                 "regime": regime, "trial": trial,
                                 "root": list(root),
                                 "word": [[k, list(r), ring.element_to_json(t)]
                                          for k, r, t in word]})
    return checks, failures


def _key_label(k):
    return list(k) if isinstance(k, tuple) else ["h", k]


class UnsupportedCase(RuntimeError):
    pass


SUITES = {
    "laws": _suite_laws,
    "eq1": _suite_eq1,
    "weyl": _suite_weyl,
    "jacobi": _suite_jacobi,
    "commutator": _suite_commutator,
    "recover": _suite_recover,
}


def cmd_verify(args) -> int:
    suite = args.suite
    fn = SUITES[suite]
    if suite == "recover":
        if args.system and args.ring:
            cases = [(args.system, args.ring)]
        elif args.system or args.ring:
            cases = [(s, r) for s, r in RECOVER_DEFAULT
                     if s == args.system or r == args.ring]
            if not cases:
                print(f"no default recover case matches the given flag",
                      file=sys.stderr)
                return 2
        else:
            cases = list(RECOVER_DEFAULT)
    else:
        systems, rings = SUITE_MATRIX[suite]
        systems = [args.system] if args.system else list(systems)
        rings = [args.ring] if args.ring else list(rings)
        cases = list(itertools.product(systems, rings))

    def run(case):
        system, ring_name = case
        t0 = time.monotonic()
        try:
            checks, failures = fn(system, ring_name, args.seed)
        except UnsupportedCase as exc:
            return {"system": system, "ring": ring_name,
                    "status": "unsupported", "reason": str(exc)}, 0.0
        return {"system": system, "ring": ring_name,
                "status": "pass" if not failures else "fail",
                "checks": checks, "failures": failures}, time.monotonic() - t0

    workers = int(os.environ.get("CHEV_THREADS", "1") or "1")
    if workers > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cases))
    else:
        results = [run(c) for c in cases]

    unsupported = [r for r, _ in results if r["status"] == "unsupported"]
    if unsupported and args.system and args.ring:
        # an explicitly requested combination that cannot run is a usage error
        print(f"verify {suite}: {unsupported[0]['reason']}", file=sys.stderr)
        return 2

    doc = {
        "command": "verify",
        "suite": suite,
        "seed": args.seed,
        "cases": [r for r, _ in results],
        "status": "pass" if all(r["status"] == "pass" for r, _ in results)
                  else "fail",
    }
    emit(doc, args.out)
    total = sum(dt for _, dt in results)
    for r, dt in results:
        print(f"verify {suite} {r['system']}/{r['ring']}: {r['status']} "
              f"({dt:.2f}s)", file=sys.stderr)
    print(f"verify {suite}: {doc['status']} in {total:.2f}s", file=sys.stderr)
    return 0 if doc["status"] == "pass" else 1


# ---------------------------------------------------------------------------
# forging and decomposing


def cmd_forge_random(args) -> int:
    spec = forge_random(args.system, args.ring, args.seed)
    emit(spec.to_json(), args.out)
    return 0


def cmd_decompose(args) -> int:
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"decompose: cannot read spec: {exc}", file=sys.stderr)
        return 2
    try:
        spec = spec_from_json(data)
        cert = certify(spec)
    except CertifyError as exc:
        emit(exc.to_json(), args.out)
        print(f"decompose: refused at stage {exc.stage}: {exc.detail}",
              file=sys.stderr)
        return 1
    emit(cert.to_json(), args.out)
    print(f"decompose: certified {spec.system} over {spec.ring} "
          f"({cert.report['generators_replayed']} images replayed)",
          file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chevalley",
        description="Chevalley groups over commutative rings: construction "
                    "dumps, verification suites, and automorphism "
                    "decomposition with certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=False, ring=None, seed=False):
        if system:
            p.add_argument("--system", required=system == "required",
                           help="root system name, e.g. A2, B3, G2")
        if ring is not None:
            p.add_argument("--ring", required=ring == "required",
                           default=None if ring == "required" or ring == "optional"
                           else ring,
                           help="ring descriptor, e.g. Z/6, F4, Z/3xZ/3, Z")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json",), default="json",
                       help="artifact format (only json)")
        p.add_argument("--out", default=None, help="write the artifact here")

    p = sub.add_parser("roots", help="dump a root system")
    common(p, system="required")
    p.set_defaults(fn=cmd_roots)

    p = sub.add_parser("adjoint", help="dump the adjoint matrices")
    common(p, system="required", ring="Z")
    p.set_defaults(fn=cmd_adjoint)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=sorted(SUITES))
    common(p, system=True, ring="optional", seed=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("forge-random",
                       help="produce a random standard automorphism spec")
    common(p, system="required", ring="required", seed=True)
    p.set_defaults(fn=cmd_forge_random)

    p = sub.add_parser("decompose",
                       help="decompose a spec into a certificate")
    p.add_argument("--spec", required=True, help="spec JSON file")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_decompose)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (KeyError, ValueError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
