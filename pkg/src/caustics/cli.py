"""Command-line front end.

Commands: class, terms, base-points, branches, dual-degree, verify,
bl-compare, table.  Exit codes: 0 success, 1 parse error, 2 degenerate
configuration, 3 inconsistent computation paths.

JSON output is byte-stable for a fixed (input, seed, version): timings are
reported on stderr only.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import __version__
from .context import NeedMoreTerms
from .curve import (PlaneCurve, multiplicity, normalize_point_cases,
                    singular_points)
from .parser import (ParseError, parse_extension, parse_point,
                     parse_polynomial, render_polynomial)
from .puiseux import (branch_cases, branch_tangent_contact,
                      branch_tangent_line, dual_degree, first_char_exponent)
from .reflect import (DegenerateConfiguration, InconsistentPaths,
                      base_points, brocard_lemoyne, delta1_estimate, mclass,
                      theorem1_terms)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DEGENERATE = 2
EXIT_INCONSISTENT = 3

PATH_SETS = {
    "t1": ("t1",),
    "ledger": ("ledger",),
    "flemma": ("flemma",),
    "all": ("t1", "ledger", "flemma"),
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="caustics",
        description="Exact class computation for caustics by reflection of "
                    "plane algebraic curves.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, source=True, many_sources=False):
        p.add_argument("--curve", required=True,
                       help="homogeneous polynomial in x, y, z")
        p.add_argument("--ext", default=None,
                       help="extension modulus in t over Q(i), e.g. 't^3-20'")
        if source:
            p.add_argument("--source", required=True,
                           help="light position 'x0:y0:z0'")
        if many_sources:
            p.add_argument("--source", action="append", required=True,
                           help="light position 'x0:y0:z0' (repeatable)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true")
        p.add_argument("--delta1", default="1",
                       help="integer override for the map degree, or "
                            "'estimate'")
        p.add_argument("--paths", default="all",
                       choices=sorted(PATH_SETS))
        p.add_argument("--max-trunc", type=int, default=None,
                       help="initial series truncation order")

    common(sub.add_parser("class", help="class of the caustic, all paths"))
    common(sub.add_parser("terms", help="the closed-formula term bundle"))
    common(sub.add_parser("base-points",
                          help="base clusters of the reflected map"))
    common(sub.add_parser("verify",
                          help="all paths plus the oracle checks"))
    common(sub.add_parser("bl-compare",
                          help="historical formula vs the exact class"))
    p = sub.add_parser("branches", help="branch data at singular points")
    p.add_argument("--curve", required=True)
    p.add_argument("--ext", default=None)
    p.add_argument("--at", default=None, help="optional point 'x0:y0:z0'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p = sub.add_parser("dual-degree", help="class of the mirror curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--ext", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    common(sub.add_parser("table", help="one row per source"),
           source=False, many_sources=True)
    return ap


def _parse_inputs(args, need_source=True):
    ctx = parse_extension(args.ext) if args.ext else None
    F = parse_polynomial(args.curve, ctx)
    curve = PlaneCurve(F)
    sources = []
    if need_source:
        texts = args.source if isinstance(args.source, list) else [args.source]
        for text in texts:
            coords = parse_point(text, F.ctx)
            cases = normalize_point_cases(F.ctx, coords)
            if len(cases) != 1:
                raise ParseError("source splits into inequivalent conjugate "
                                 "cases; split the modulus", 0)
            sources.append((text, cases[0][1]))
    return curve, sources


def _delta1_value(args, curve, source, rng):
    if args.delta1 == "estimate":
        est = delta1_estimate(curve, source, trials=2, rng=rng)
        if est is None:
            print("delta1 estimate inconclusive; using 1", file=sys.stderr)
            return 1
        return est
    return int(args.delta1)


def _report_dict(args, rep, source_text):
    terms = rep.terms
    return {
        "tool": "caustics",
        "version": __version__,
        "seed": args.seed,
        "curve": args.curve,
        "ext": args.ext,
        "source": source_text,
        "d": rep.d,
        "dual_degree": rep.dual_degree,
        "g": terms.g,
        "f": terms.f,
        "f_prime": terms.f_prime,
        "g_prime": terms.g_prime,
        "q_prime": terms.q_prime,
        "mu_I": terms.mu_I,
        "mu_J": terms.mu_J,
        "mu_S": terms.mu_S,
        "c_prime": terms.c_prime,
        "source_at_infinity": terms.at_infinity,
        "mclass_theorem1": rep.mclass_theorem1,
        "mclass_ledger": rep.mclass_ledger,
        "mclass_flemma": rep.mclass_flemma,
        "delta1": rep.delta1,
        "mclass": rep.mclass,
        "class": rep.caustic_class,
        "consistent": rep.consistent,
    }


def _emit(args, payload):
    if args.json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for key, value in payload.items():
            print("%s: %s" % (key, value))


def _human_class_report(rep, source_text):
    t = rep.terms
    lines = ["caustic class report",
             "  source: %s%s" % (source_text,
                                 "  (at infinity)" if t.at_infinity else ""),
             "  mirror degree d = %d, class d^v = %d" % (rep.d,
                                                         rep.dual_degree)]
    if t.at_infinity:
        lines.append("  terms: g=%d mu_I=%d mu_J=%d mu_S=%d c'=%d"
                     % (t.g, t.mu_I, t.mu_J, t.mu_S, t.c_prime))
    else:
        lines.append("  terms: g=%d f=%d f'=%d g'=%d q'=%d"
                     % (t.g, t.f, t.f_prime, t.g_prime, t.q_prime))
    lines.append("  mclass: theorem-1=%s ledger=%s reflected-polar=%s"
                 % (rep.mclass_theorem1, rep.mclass_ledger,
                    rep.mclass_flemma))
    lines.append("  delta1 = %d  =>  class(caustic) = %d"
                 % (rep.delta1, rep.caustic_class))
    lines.append("  consistent: %s" % rep.consistent)
    return "\n".join(lines)


def cmd_class(args, verify=False):
    curve, sources = _parse_inputs(args)
    text, source = sources[0]
    rng = random.Random(args.seed)
    delta1 = _delta1_value(args, curve, source, rng)
    t0 = time.time()
    rep = mclass(curve, source, paths=PATH_SETS[args.paths], delta1=delta1,
                 rng=rng, t_order=args.max_trunc, verify_h=verify)
    elapsed = time.time() - t0
    print("computed in %.2fs" % elapsed, file=sys.stderr)
    if verify:
        checks = len(rep.h_records)
        print("verified %d branch contributions against the direct "
              "valuation" % checks, file=sys.stderr)
    if not rep.consistent:
        print("INCONSISTENT PATHS: t1=%s ledger=%s flemma=%s"
              % (rep.mclass_theorem1, rep.mclass_ledger, rep.mclass_flemma),
              file=sys.stderr)
        if args.json:
            _emit(args, _report_dict(args, rep, text))
        return EXIT_INCONSISTENT
    if args.json:
        _emit(args, _report_dict(args, rep, text))
    else:
        print(_human_class_report(rep, text))
    return EXIT_OK


def cmd_terms(args):
    curve, sources = _parse_inputs(args)
    text, source = sources[0]
    terms = theorem1_terms(curve, source, args.max_trunc)
    payload = {
        "d": terms.d, "dual_degree": terms.dual, "g": terms.g, "f": terms.f,
        "f_prime": terms.f_prime, "g_prime": terms.g_prime,
        "q_prime": terms.q_prime, "mu_I": terms.mu_I, "mu_J": terms.mu_J,
        "mu_S": terms.mu_S, "c_prime": terms.c_prime,
        "source_at_infinity": terms.at_infinity,
        "mclass": terms.mclass(),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_base_points(args):
    curve, sources = _parse_inputs(args)
    text, source = sources[0]
    clusters = base_points(curve, source)
    rows = []
    for cl in clusters:
        rows.append({
            "context_degree": cl.ctx.degree,
            "pivot": "xyz"[cl.point.pivot],
            "at_infinity": cl.point.pivot != 2,
            "multiplicity_on_curve": multiplicity(curve, cl.point),
        })
    payload = {"base_clusters": rows,
               "total_points": sum(cl.ctx.degree for cl in clusters)
               // source.ctx.degree}
    if args.json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print("base clusters (%d points):" % payload["total_points"])
        for row in rows:
            print("  degree %d cluster, pivot %s, mu = %d%s"
                  % (row["context_degree"], row["pivot"],
                     row["multiplicity_on_curve"],
                     ", at infinity" if row["at_infinity"] else ""))
    return EXIT_OK


def cmd_branches(args):
    ctx = parse_extension(args.ext) if args.ext else None
    F = parse_polynomial(args.curve, ctx)
    curve = PlaneCurve(F)
    points = []
    if args.at:
        coords = parse_point(args.at, F.ctx)
        for _leaf, pt in normalize_point_cases(F.ctx, coords):
            points.append(pt)
    else:
        points = [cl.point for cl in singular_points(curve)]
    rows = []
    for pt in points:
        for case in branch_cases(curve, pt):
            for br in case.branches:
                K = first_char_exponent(br)
                rows.append({
                    "point_context_degree": case.ctx.degree,
                    "branch_context_degree": br.ctx.degree,
                    "multiplicity": case.mu,
                    "e": br.e,
                    "tangent_contact": branch_tangent_contact(br),
                    "char_exponent_t_units": K,
                })
    payload = {"branches": rows}
    if args.json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for row in rows:
            print("branch: e=%d, i(B,T)=%d, first char exponent=%s, "
                  "cluster degree %d (point mu=%d)"
                  % (row["e"], row["tangent_contact"],
                     row["char_exponent_t_units"],
                     row["branch_context_degree"], row["multiplicity"]))
    return EXIT_OK


def cmd_dual_degree(args):
    ctx = parse_extension(args.ext) if args.ext else None
    F = parse_polynomial(args.curve, ctx)
    curve = PlaneCurve(F)
    value = dual_degree(curve, rng=random.Random(args.seed))
    payload = {"d": curve.d, "dual_degree": value}
    _emit(args, payload)
    return EXIT_OK


def cmd_bl_compare(args):
    curve, sources = _parse_inputs(args)
    text, source = sources[0]
    rep = brocard_lemoyne(curve, source)
    payload = {
        "bl_value": rep.bl_value,
        "corrections": list(rep.corrections),
        "correction_sum": rep.correction_sum,
        "mclass": rep.mclass,
    }
    if args.json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print("historical formula value: %d" % rep.bl_value)
        print("contact corrections (I, J, S|IS, S|JS): %s"
              % (tuple(rep.corrections),))
        print("exact mclass: %d = %d + %d"
              % (rep.mclass, rep.bl_value, rep.correction_sum))
    return EXIT_OK


def cmd_table(args):
    curve, sources = _parse_inputs(args)
    rng = random.Random(args.seed)
    rows = []
    worst = EXIT_OK
    for text, source in sources:
        try:
            delta1 = _delta1_value(args, curve, source, rng)
            rep = mclass(curve, source, paths=PATH_SETS[args.paths],
                         delta1=delta1, rng=rng, t_order=args.max_trunc)
        except DegenerateConfiguration as err:
            rows.append({"source": text, "degenerate": str(err)})
            worst = max(worst, EXIT_DEGENERATE)
            continue
        rows.append({"source": text, "class": rep.caustic_class,
                     "mclass": rep.mclass, "consistent": rep.consistent})
        if not rep.consistent:
            worst = max(worst, EXIT_INCONSISTENT)
    if args.json:
        print(json.dumps({"rows": rows}, sort_keys=True,
                         separators=(",", ":")))
    else:
        for row in rows:
            if "degenerate" in row:
                print("%-24s degenerate: %s" % (row["source"],
                                                row["degenerate"]))
            else:
                print("%-24s class = %-4d (mclass %d, consistent %s)"
                      % (row["source"], row["class"], row["mclass"],
                         row["consistent"]))
    return worst


_VALUE_FLAGS = ("--curve", "--source", "--ext", "--at", "--delta1")


def _merge_dash_values(argv):
    """Join '--flag' '-value' pairs into '--flag=-value' so polynomial and
    point expressions starting with a minus parse cleanly."""
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        if tok in _VALUE_FLAGS and k + 1 < len(argv) \
                and argv[k + 1].startswith("-"):
            out.append("%s=%s" % (tok, argv[k + 1]))
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_merge_dash_values(list(argv)))
    try:
        if args.command == "class":
            return cmd_class(args)
        if args.command == "verify":
            return cmd_class(args, verify=True)
        if args.command == "terms":
            return cmd_terms(args)
        if args.command == "base-points":
            return cmd_base_points(args)
        if args.command == "branches":
            return cmd_branches(args)
        if args.command == "dual-degree":
            return cmd_dual_degree(args)
        if args.command == "bl-compare":
            return cmd_bl_compare(args)
        if args.command == "table":
            return cmd_table(args)
        raise AssertionError("unhandled command %r" % args.command)
    except ParseError as err:
        print("parse error: %s" % err, file=sys.stderr)
        return EXIT_PARSE
    except DegenerateConfiguration as err:
        print("degenerate configuration: %s" % err, file=sys.stderr)
        return EXIT_DEGENERATE
    except InconsistentPaths as err:
        print("inconsistent paths: %s" % err, file=sys.stderr)
        return EXIT_INCONSISTENT
    except ValueError as err:
        print("error: %s" % err, file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
