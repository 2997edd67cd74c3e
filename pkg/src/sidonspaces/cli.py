"""Command-line front end.

Subspaces travel between commands as JSON documents holding the tower, the
ambient name, the canonical basis, an optional pair form ``(U, gamma)`` and a
provenance record.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .constructions import (
    binomial_family,
    coset_poly,
    double_pseudoregulus,
    lunardon_polverino,
    monomial_quadratic,
    scattered_family,
    table1_delta,
)
from .equivalence import are_equivalent_bruteforce, are_equivalent_coset_form, classify_inequivalent
from .errors import BudgetExceeded, InputError, PreconditionError, SidonError
from .field_tower import DEFAULT_WORK_BOUND, FieldTower, build_tower, element_from_json, element_to_json, extension_field, tower_from_dict
from .fq_linear import Ambient, FqSubspace, subspace_from_dict
from .linpoly import graph_subspace, is_scattered, parse_coefficient, parse_polynomial, s_set, subspace_polynomial
from .orbit_codes import build_orbit, export_codebook
from .reproduce import DEFAULT_SEED, example_tower, run_all
from .sidon_core import DEFINITION_CAP, ORBIT_CAP, check_pair_property, check_sidon

EXIT_OK, EXIT_MISMATCH, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4
FORMAT = "sidonspaces/subspace/1"


@dataclass
class RunConfig:
    tower_path: str | None = None
    work_bound: int = DEFAULT_WORK_BOUND
    orbit_cap: int = ORBIT_CAP
    definition_cap: int = DEFINITION_CAP
    cache_dir: str | None = None
    output: str = "text"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        for name in ("work_bound", "orbit_cap", "definition_cap"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")


# --------------------------------------------------------------------------
# documents


def provenance(cfg: RunConfig, op: str, params: dict, tower: FieldTower | None) -> dict:
    return {"op": op, "params": params, "tower_hash": tower.tower_hash() if tower else None,
            "seed": cfg.seed, "version": __version__}


def space_document(V: FqSubspace, tower: FieldTower, prov: dict, pair=None, ext_poly=None) -> dict:
    doc = {"format": FORMAT, "tower": tower.to_dict(), "ambient": V.ambient.name, "subspace": V.to_dict(),
           "provenance": prov}
    if ext_poly is not None:
        doc["ext_poly"] = [element_to_json(tower.top, c, tower.q) for c in ext_poly]
    if pair is not None:
        U, g = pair
        doc["pair_form"] = {"U": U.to_dict(), "gamma": element_to_json(tower.top, g, tower.q)}
    return doc


@dataclass
class Loaded:
    tower: FieldTower
    V: FqSubspace
    U: FqSubspace | None
    gamma: int | None
    doc: dict


def load_space(path: str, cfg: RunConfig) -> Loaded:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if doc.get("format") != FORMAT:
        raise InputError(f"{path}: not a subspace document")
    tower = tower_from_dict(doc["tower"], work_bound=cfg.work_bound)
    name = doc["ambient"]
    if name == "top":
        amb = Ambient.top(tower)
    elif name == "mid2":
        amb = Ambient.mid_pairs(tower)
    elif name == "ext":
        mod = tuple(element_from_json(tower.top, c, tower.q) for c in doc["ext_poly"])
        amb = Ambient(extension_field(tower.top, mod), tower.q, False, "ext")
    else:
        raise InputError(f"unknown ambient {name!r}")
    V = subspace_from_dict(amb, doc["subspace"])
    U = g = None
    if "pair_form" in doc:
        U = subspace_from_dict(Ambient.mid_pairs(tower), doc["pair_form"]["U"])
        g = element_from_json(tower.top, doc["pair_form"]["gamma"], tower.q)
    return Loaded(tower, V, U, g, doc)


def tower_from_args(args, cfg: RunConfig) -> FieldTower:
    if args.tower == "example":
        return example_tower()
    if args.tower:
        try:
            d = json.loads(Path(args.tower).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read tower {args.tower}: {exc}") from None
        return tower_from_dict(d.get("tower", d), work_bound=cfg.work_bound)
    if args.p is None or args.k is None:
        raise InputError("give --tower or --p/--k/--ell")
    jl = lambda s: json.loads(s) if s else None
    return build_tower(args.p, args.h, args.k, args.ell, mid_spec=jl(args.mid_poly), top_spec=jl(args.top_poly),
                       work_bound=cfg.work_bound)


# --------------------------------------------------------------------------
# verdict cache


class VerdictCache:
    """Verdicts keyed by (tower hash, basis hash, route); budget failures are never stored."""

    def __init__(self, root: str | None):
        self.root = Path(root) if root else None

    def key(self, tower: FieldTower, V: FqSubspace, route: str, extra: str = "") -> str:
        blob = json.dumps([V.ambient.name, list(V.basis), extra], separators=(",", ":"))
        return f"{tower.tower_hash()}-{hashlib.sha256(blob.encode()).hexdigest()[:16]}-{route}"

    def get(self, key: str):
        if self.root is None:
            return None
        path = self.root / f"{key}.json"
        return json.loads(path.read_text()) if path.exists() else None

    def put(self, key: str, value: dict):
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / f"{key}.json").write_text(json.dumps(value, sort_keys=True))


# --------------------------------------------------------------------------
# commands; each returns (payload, exit code)


def cmd_field(args, cfg):
    t = tower_from_args(args, cfg)
    out = {"tower": t.to_dict(), "q": t.q, "k": t.k, "n": t.n, "gamma": element_to_json(t.top, t.gamma, t.q),
           "provenance": provenance(cfg, "field", {}, t)}
    if args.out:
        Path(args.out).write_text(json.dumps({"tower": t.to_dict()}, sort_keys=True, indent=1) + "\n")
    return out, EXIT_OK


def _parse_mid(text, t):
    return None if text is None else parse_coefficient(text, t.mid, t.q)


def _parse_top(text, t):
    return None if text is None else parse_coefficient(text, t.top, t.q)


def cmd_construct(args, cfg):
    t = tower_from_args(args, cfg)
    fam = args.family
    delta, gamma = _parse_mid(args.delta, t), _parse_top(args.gamma, t)
    if fam == "table1":
        if delta is None and args.row in ("iii", "v", "vi"):
            delta = table1_delta(t, args.row)
        c = scattered_family(t, args.row, args.s, delta, gamma)
    elif fam == "binomial":
        c = binomial_family(t, args.i, args.j, 1 if delta is None else delta, gamma)
    elif fam == "lunardon-polverino":
        c = lunardon_polverino(t, args.s, 1 if delta is None else delta, gamma)
    elif fam == "monomial-quadratic":
        c = monomial_quadratic(t, args.s, gamma)
    elif fam == "double-pseudoregulus":
        c = double_pseudoregulus(t, args.ratio, gamma, cap=cfg.orbit_cap)
    elif fam == "poly":
        if not args.poly:
            raise InputError("--family poly needs --poly")
        c = coset_poly(t, parse_polynomial(args.poly, t.mid, t.q, name="mid"), gamma, params={"poly": args.poly})
    else:
        raise InputError(f"unknown family {fam!r}")
    verdict = None if args.no_verify else c.verify(cfg.orbit_cap)
    prov = provenance(cfg, "construct", c.params, t)
    prov.update(c.provenance(verdict))
    pair = (graph_subspace(c.poly), c.params["gamma"]) if c.poly is not None and "gamma" in c.params else None
    ext = c.params.get("ext_poly") if c.subspace.ambient.name == "ext" else None
    doc = space_document(c.subspace, t, prov, pair, ext)
    if args.out:
        Path(args.out).write_text(json.dumps(doc, sort_keys=True) + "\n")
    out = {"family": fam, "dim": c.subspace.dim, "expected": c.expected, "rule": c.rule,
           "verified": None if verdict is None else verdict.is_sidon, "provenance": prov}
    if verdict is not None and not verdict.is_sidon:
        out["witness"] = verdict.to_dict(c.subspace.ambient)["witness"]
    code = EXIT_OK
    if verdict is not None and c.expected in ("yes", "no") and verdict.is_sidon != (c.expected == "yes"):
        code = EXIT_MISMATCH
        out["mismatch"] = f"expected {c.expected} by {c.rule}"
    return out, code


def cmd_check_sidon(args, cfg):
    L = load_space(args.file, cfg)
    route = {"def": "definition"}.get(args.route, args.route)
    cache = VerdictCache(cfg.cache_dir)
    key = cache.key(L.tower, L.V, route)
    hit = cache.get(key)
    if hit is None:
        if route == "pair":
            if L.U is None:
                raise InputError("the pair route needs a document with a pair form")
            v = check_pair_property(L.U, "with_gamma", L.gamma, L.tower, cap=cfg.definition_cap)
        else:
            v = check_sidon(L.V, route, cfg.orbit_cap, cfg.definition_cap)
        amb = L.V.ambient if route != "pair" else Ambient.top(L.tower)
        hit = v.to_dict(amb)
        hit.pop("elapsed", None)
        cache.put(key, hit)
    prov = provenance(cfg, "check-sidon", {"route": route, "file": os.path.basename(args.file)}, L.tower)
    return {"verdict": hit, "provenance": prov}, EXIT_OK


def cmd_check_scattered(args, cfg):
    t = tower_from_args(args, cfg)
    F = t.mid if args.over == "mid" else t.top
    f = parse_polynomial(args.poly, F, t.q, name=args.over)
    ok, x0 = is_scattered(f)
    out = {"poly": args.poly, "scattered": ok, "provenance": provenance(cfg, "check-scattered", {"poly": args.poly}, t)}
    if not ok:
        out["witness"] = {"x0": element_to_json(F, x0, t.q), "s_set_dim": s_set(f, x0).dim}
    return out, EXIT_OK


def cmd_subspace_poly(args, cfg):
    L = load_space(args.file, cfg)
    F = subspace_polynomial(L.V)
    return {"poly": F.to_dict(), "qdeg": F.qdeg,
            "provenance": provenance(cfg, "subspace-poly", {"file": os.path.basename(args.file)}, L.tower)}, EXIT_OK


def _witness_json(w, F, q):
    if w is None:
        return None
    d = w.to_dict()
    d["alpha"] = element_to_json(F, w.alpha, q)
    return d


def cmd_equiv(args, cfg):
    A, B = load_space(args.first, cfg), load_space(args.second, cfg)
    if args.coset_form:
        if A.U is None or B.U is None:
            raise InputError("--coset-form needs documents with pair forms")
        if A.tower != B.tower:
            raise InputError("documents use different towers")
        w = are_equivalent_coset_form(A.U, A.gamma, B.U, B.gamma, A.tower, args.mode)
    else:
        w = are_equivalent_bruteforce(A.V, B.V, args.mode, cap=cfg.orbit_cap * 16)
    F = A.V.field
    out = {"equivalent": w is not None, "mode": args.mode, "witness": _witness_json(w, F, A.tower.q),
           "provenance": provenance(cfg, "equiv", {"mode": args.mode, "coset_form": args.coset_form}, A.tower)}
    if w is not None and w.matrix is not None:
        M = A.tower.mid
        out["witness"]["matrix"] = [[element_to_json(M, x, A.tower.q) for x in w.matrix[:2]],
                                    [element_to_json(M, x, A.tower.q) for x in w.matrix[2:]]]
        out["witness"]["lam"] = element_to_json(F, w.lam, A.tower.q)
    return out, EXIT_OK


def cmd_classify(args, cfg):
    loaded = [load_space(f, cfg) for f in args.files]
    classes = classify_inequivalent([L.V for L in loaded], args.mode)
    for c in classes:
        c["files"] = [os.path.basename(args.files[i]) for i in c["members"]]
        amb = loaded[c["members"][0]].V.ambient
        if "representative" in c:
            c["representative"] = [amb.element_to_json(x) for x in c["representative"]]
    return {"classes": classes, "mode": args.mode,
            "provenance": provenance(cfg, "classify", {"count": len(loaded)}, loaded[0].tower if loaded else None)}, EXIT_OK


def cmd_orbit_code(args, cfg):
    L = load_space(args.file, cfg)
    code = build_orbit(L.V, cfg.orbit_cap)
    out = dict(code.manifest(), stabilizer_degree=code.stabilizer_degree,
               provenance=provenance(cfg, "orbit-code", {"file": os.path.basename(args.file)}, L.tower))
    if args.export:
        out["codebook"] = str(export_codebook(code, args.export))
    return out, EXIT_OK


def cmd_reproduce(args, cfg):
    top = json.loads(args.example_top_poly) if args.example_top_poly else None
    only = set(args.only) if args.only else None
    results = run_all(cfg.seed, top, only)
    if cfg.output == "text":
        for r in results:
            print(r.line())
            if not r.passed:
                print("      " + json.dumps(r.detail, sort_keys=True, default=str))
    payload = {"claims": [r.to_dict(args.timings) for r in results],
               "passed": sum(r.passed for r in results), "total": len(results),
               "provenance": provenance(cfg, "reproduce", {"only": sorted(only) if only else None}, None)}
    return payload, (EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH)


# --------------------------------------------------------------------------


def _tower_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("tower")
    g.add_argument("--tower", help="tower JSON file, or 'example' for the worked example tower")
    g.add_argument("--p", type=int)
    g.add_argument("--h", type=int, default=1)
    g.add_argument("--k", type=int)
    g.add_argument("--ell", type=int, default=3, help="top degree over the middle field")
    g.add_argument("--mid-poly", help="JSON coefficient list, low degree first")
    g.add_argument("--top-poly", help="JSON list of middle-field elements")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sidonspaces", description="Sidon spaces, linearized polynomials and orbit codes")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--work-bound", type=int, default=DEFAULT_WORK_BOUND, help="largest allowed q^n")
    ap.add_argument("--orbit-cap", type=int, default=ORBIT_CAP)
    ap.add_argument("--definition-cap", type=int, default=DEFINITION_CAP)
    ap.add_argument("--cache-dir", default=None, help="verdict cache (default: $SIDON_CACHE_DIR)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="build a tower and print it")
    _tower_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("construct", help="build a construction and verify it")
    _tower_args(p)
    p.add_argument("--family", required=True,
                   choices=["table1", "binomial", "lunardon-polverino", "monomial-quadratic", "double-pseudoregulus", "poly"])
    p.add_argument("--row", default="i")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--delta")
    p.add_argument("--gamma")
    p.add_argument("--poly")
    p.add_argument("--ratio", type=int, default=3)
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("check-sidon", help="decide the Sidon property")
    p.add_argument("file")
    p.add_argument("--route", default="auto", choices=["auto", "def", "definition", "orbit", "pair"])
    p.set_defaults(func=cmd_check_sidon)

    p = sub.add_parser("check-scattered", help="decide scatteredness of a polynomial")
    _tower_args(p)
    p.add_argument("--poly", required=True, help="e.g. 'x^q + g^5*x^q^2'")
    p.add_argument("--over", default="mid", choices=["mid", "top"])
    p.set_defaults(func=cmd_check_scattered)

    p = sub.add_parser("subspace-poly", help="monic polynomial with the given kernel")
    p.add_argument("file")
    p.set_defaults(func=cmd_subspace_poly)

    p = sub.add_parser("equiv", help="search for alpha, sigma with first = alpha * second^sigma")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--mode", default="linear", choices=["linear", "semilinear"])
    p.add_argument("--coset-form", action="store_true")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("classify", help="partition subspaces into equivalence classes")
    p.add_argument("files", nargs="+")
    p.add_argument("--mode", default="semilinear", choices=["linear", "semilinear"])
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("orbit-code", help="orbit code parameters and codebook export")
    p.add_argument("file")
    p.add_argument("--export", help="file, or directory ending in '/'")
    p.set_defaults(func=cmd_orbit_code)

    p = sub.add_parser("reproduce", help="run every checkable claim")
    p.add_argument("--only", type=int, nargs="*")
    p.add_argument("--timings", action="store_true")
    p.add_argument("--example-top-poly", help="override the worked example's top polynomial (JSON)")
    p.set_defaults(func=cmd_reproduce)
    return ap


def _print_text(payload: dict, indent: str = ""):
    for key, val in payload.items():
        if isinstance(val, dict):
            print(f"{indent}{key}:")
            _print_text(val, indent + "  ")
        else:
            print(f"{indent}{key}: {json.dumps(val) if isinstance(val, list) else val}")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = RunConfig(getattr(args, "tower", None), args.work_bound, args.orbit_cap, args.definition_cap,
                        args.cache_dir or os.environ.get("SIDON_CACHE_DIR"), "json" if args.json else "text", args.seed)
        payload, code = args.func(args, cfg)
    except BudgetExceeded as exc:
        payload, code = {"error": "budget", "message": str(exc)}, EXIT_BUDGET
    except PreconditionError as exc:
        payload, code = {"error": "precondition", "message": str(exc), "witness": exc.witness}, EXIT_INPUT
    except (InputError, SidonError) as exc:
        payload, code = {"error": "input", "message": str(exc)}, EXIT_INPUT
    if args.json:
        print(json.dumps(payload, sort_keys=True, default=str))
    elif args.command != "reproduce" or "error" in payload:
        _print_text(payload)
    else:
        print(f"{payload['passed']}/{payload['total']} claims passed")
    return code


if __name__ == "__main__":
    sys.exit(main())
