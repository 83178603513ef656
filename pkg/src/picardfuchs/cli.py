"""Command-line surface.

    picardfuchs --input family.pf --command annihilator [flags]

Commands: gkz, annihilator, picard-fuchs, verify.  Results go to stdout
(text or machine-readable JSON), logs to stderr.  Exit codes: 0 ok,
2 parse error, 3 instability, 4 certificate failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time

from . import cohomology, pullback
from .gkz import (ClassIndex, beta_from_class, box_annihilation_check,
                  build_system, euler_certificate_x, euler_certificate_y,
                  gkz_generators)
from .geometry import smoothness_certificate
from .lattice import PointConfig, integer_kernel_basis
from .parse import ParseError
from .problem import ProblemSpec, load_problem
from .pullback import Specialization, minimal_annihilator, star_quotient_basis

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INSTABILITY = 3
EXIT_CERTIFICATE = 4

FORMAT_VERSION = 1


class CertificateFailure(RuntimeError):
    pass


def _log(msg):
    print(msg, file=sys.stderr)


def _context(spec: ProblemSpec):
    td = spec.twist()
    config = PointConfig.from_twist(td)
    sp = Specialization.from_twist(td, config)
    return td, config, sp


def _bounds(spec: ProblemSpec, config):
    mu = spec.mu_degree
    if mu is None:
        mu = 1
    del_order = spec.del_order
    if del_order is None:
        del_order = max(2, spec.max_order)
    return mu, del_order


def cmd_gkz(spec: ProblemSpec) -> dict:
    td, config, sp = _context(spec)
    idx = spec.class_index()
    system = build_system(idx, config)
    grid = list(itertools.product(
        itertools.product(range(2), repeat=config.n_x),
        itertools.product(range(2), repeat=config.n_eq)))
    certs = []
    for u, v in grid:
        gidx = ClassIndex.of(u, v)
        for k in range(1, config.n_x + 1):
            certs.append((f"euler-x k={k} u={u} v={v}",
                          euler_certificate_x(config, gidx, k).holds))
        for k in range(1, config.n_eq + 1):
            certs.append((f"euler-y k={k} u={u} v={v}",
                          euler_certificate_y(config, gidx, k).holds))
        for b in system.relations:
            certs.append((f"box b={b} u={u} v={v}",
                          box_annihilation_check(config, gidx, b).holds))
    if not all(ok for _, ok in certs):
        raise CertificateFailure("an annihilation certificate failed")
    return {
        "points": [list(p) for p in config.points],
        "pairs": [list(p) for p in config.pairs],
        "mu": list(config.mu_names),
        "relation_basis": [list(b) for b in system.relations],
        "boxes": [op.serialize() for op in system.boxes],
        "eulers": [op.serialize() for op in system.eulers],
        "beta": [str(bk) for bk in system.beta],
        "phi": [str(v) for v in sp.values()],
        "certificates": [{"name": n, "holds": ok} for n, ok in certs],
    }


def cmd_annihilator(spec: ProblemSpec) -> dict:
    td, config, sp = _context(spec)
    idx = spec.class_index()
    mu_bound, del_bound = _bounds(spec, config)
    gens = gkz_generators(idx, config)
    mu_needed = max((c.total_degree() for g in gens
                     for c in g.terms.values()), default=1)
    mu_bound = max(mu_bound, mu_needed)
    basis, report = star_quotient_basis(gens, sp, (mu_bound, del_bound))
    result = minimal_annihilator(
        config, idx, sp, td.params[0], spec.max_order,
        mu_degree_bound=mu_bound, del_order_bound=del_bound,
        invertibles=td.invertibles)
    doc = {
        "quotient_basis": [_dmono(config.mu_names, k) for k in basis],
        "quotient_stability": report,
        "bounds": {"mu_degree": mu_bound, "del_order": del_bound},
    }
    if result is None:
        doc["annihilator"] = None
        doc["note"] = f"none up to order {spec.max_order}"
    else:
        doc["annihilator"] = {
            "order": result.order,
            "parameter": result.param,
            "operator": str(result.operator),
            "terms": result.operator.serialize(),
            "denominators_declared_invertible": result.denominator_ok,
            "witness": [
                {"beta": list(w.beta), "generator": w.gen_index,
                 "coefficient": str(c)}
                for w, c in sorted(result.witness.items(),
                                   key=lambda t: (t[0].gen_index, t[0].beta))
            ],
        }
        if not result.denominator_ok:
            _log("warning: denominator outside the declared invertibles")
    return doc


def cmd_picard_fuchs(spec: ProblemSpec, cross_check=False) -> dict:
    td, config, sp = _context(spec)
    idx = spec.class_index()
    box = cohomology.default_box(td)
    if spec.x_degree is not None or spec.y_degree is not None:
        box = cohomology.DegreeBox(
            spec.x_degree if spec.x_degree is not None else box.max_x_degree,
            spec.y_degree if spec.y_degree is not None else box.max_y_degree)
    space = cohomology.build_space(td, box, check_stability=True)
    param = td.params[0]
    gm = space.gauss_manin_matrix(param)
    target = tuple(idx.u) + (0,) * td.n_eq
    if target not in space.basis:
        cls = space.normal_form(
            cohomology.MultiPoly.monomial(td.all_vars(), target, td._one()))
    else:
        cls = space.class_from_coords({target: td._one()})
    operator = cohomology.cyclic_annihilator(space, cls, param,
                                             spec.max_order)
    doc = {
        "box": [box.max_x_degree, box.max_y_degree],
        "basis": space.dump()["basis"],
        "gauss_manin": [[str(e) for e in row] for row in gm],
        "cyclic_annihilator": None if operator is None else {
            "operator": str(operator), "terms": operator.serialize(),
            "order": operator.order()},
    }
    if operator is None:
        doc["note"] = f"none up to order {spec.max_order}"
    if cross_check:
        other = minimal_annihilator(
            config, idx, sp, param, spec.max_order,
            invertibles=td.invertibles)
        agree = ((operator is None and other is None)
                 or (operator is not None and other is not None
                     and other.operator == operator))
        doc["cross_check"] = {
            "pullback_operator": None if other is None else str(other.operator),
            "routes_agree": agree,
        }
        if not agree:
            raise CertificateFailure("annihilator routes disagree")
    return doc


def cmd_verify(spec: ProblemSpec) -> dict:
    td, config, sp = _context(spec)
    ranks = {}
    for n in range(td.n_eq + 1):
        ranks[n] = cohomology.koszul_rank(list(td.f), n, 6)
    cert = smoothness_certificate(td)
    basis = integer_kernel_basis(config)
    grid_ok = True
    for u in itertools.product(range(2), repeat=config.n_x):
        for v in itertools.product(range(2), repeat=config.n_eq):
            gidx = ClassIndex.of(u, v)
            for k in range(1, config.n_x + 1):
                grid_ok &= euler_certificate_x(config, gidx, k).holds
            for k in range(1, config.n_eq + 1):
                grid_ok &= euler_certificate_y(config, gidx, k).holds
            for b in basis:
                grid_ok &= box_annihilation_check(config, gidx, b).holds
    if not grid_ok:
        raise CertificateFailure("annihilation certificate grid failed")
    return {
        "koszul_ranks": {str(n): r for n, r in ranks.items()},
        "koszul_vanishing_off_top": all(
            r == 0 for n, r in ranks.items() if n != td.n_eq),
        "smoothness_certificate": bool(cert.found),
        "certificate_grid": "pass",
    }


def _dmono(names, exps):
    return "*".join(f"d_{m}" if e == 1 else f"d_{m}^{e}"
                    for m, e in zip(names, exps) if e) or "1"


def build_parser():
    p = argparse.ArgumentParser(
        prog="picardfuchs",
        description="Annihilating differential operators for cohomology "
                    "classes of affine complete intersection families")
    p.add_argument("--input", required=True, help="problem file")
    p.add_argument("--command", required=True,
                   choices=["gkz", "annihilator", "picard-fuchs", "verify"])
    p.add_argument("--u", help="override u, comma separated")
    p.add_argument("--v", help="override v, comma separated")
    p.add_argument("--max-order", type=int)
    p.add_argument("--x-degree", type=int)
    p.add_argument("--y-degree", type=int)
    p.add_argument("--mu-degree", type=int)
    p.add_argument("--del-order", type=int)
    p.add_argument("--cross-check", action="store_true")
    p.add_argument("--format", choices=["text", "machine"], default="text")
    p.add_argument("--seed", type=int)
    return p


def _apply_overrides(spec: ProblemSpec, args) -> ProblemSpec:
    if args.u is not None:
        spec.u = tuple(int(t) for t in args.u.replace(",", " ").split())
    if args.v is not None:
        spec.v = tuple(int(t) for t in args.v.replace(",", " ").split())
    for attr, val in (("max_order", args.max_order),
                      ("x_degree", args.x_degree),
                      ("y_degree", args.y_degree),
                      ("mu_degree", args.mu_degree),
                      ("del_order", args.del_order),
                      ("seed", args.seed)):
        if val is not None:
            setattr(spec, attr, val)
    return spec


def _render_text(doc: dict, out):
    def walk(value, indent):
        pad = "  " * indent
        if isinstance(value, dict):
            for k in sorted(value):
                v = value[k]
                if isinstance(v, (dict, list)):
                    print(f"{pad}{k}:", file=out)
                    walk(v, indent + 1)
                else:
                    print(f"{pad}{k}: {v}", file=out)
        elif isinstance(value, list):
            for v in value:
                if isinstance(v, (dict, list)):
                    walk(v, indent + 1)
                else:
                    print(f"{pad}- {v}", file=out)
        else:
            print(f"{pad}{value}", file=out)
    walk(doc, 0)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.time()
    try:
        spec = _apply_overrides(load_problem(args.input), args)
    except (ParseError, OSError, ValueError) as exc:
        _log(f"error: {exc}")
        return EXIT_PARSE

    try:
        if args.command == "gkz":
            results = cmd_gkz(spec)
        elif args.command == "annihilator":
            results = cmd_annihilator(spec)
        elif args.command == "picard-fuchs":
            results = cmd_picard_fuchs(spec, cross_check=args.cross_check)
        else:
            results = cmd_verify(spec)
    except (pullback.InstabilityError, cohomology.InstabilityError) as exc:
        _log(f"instability: {exc}")
        return EXIT_INSTABILITY
    except CertificateFailure as exc:
        _log(f"certificate failure: {exc}")
        return EXIT_CERTIFICATE
    except (ParseError, ValueError) as exc:
        _log(f"error: {exc}")
        return EXIT_PARSE

    doc = {
        "format_version": FORMAT_VERSION,
        "command": args.command,
        "input": {
            "x": list(spec.x_vars), "y": list(spec.y_vars),
            "params": list(spec.params), "f": list(spec.f_texts),
            "u": list(spec.u), "v": list(spec.v),
            "max_order": spec.max_order,
        },
        "results": results,
    }
    if args.format == "machine":
        json.dump(doc, sys.stdout, sort_keys=True, separators=(",", ":"))
        sys.stdout.write("\n")
    else:
        _render_text(doc, sys.stdout)
        _log(f"elapsed: {time.time() - started:.2f}s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
