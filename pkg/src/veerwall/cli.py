"""Command line interface.

Exit codes: 0 success, 1 a theorem violation was found, 2 bad input.
The worker count for ``batch`` is read from ``VEERWALL_WORKERS``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .branched import BranchedSurface, boundary_triangulation, complementary_regions_of_B
from .branched import dual_graph, dual_to_dot
from .errors import InputError, StructureError, TheoremViolation, VeerwallError
from .flowgraph import build_flow_graph, reduce, to_dot
from .report import (CSV_FIELDS, EXIT_INPUT, EXIT_OK, EXIT_THEOREM, analyze, csv_row,
                     strip_timings, summarize)
from .sigparse import read_census
from .spectral import (adjacency, asymptotic_bound, bound, perron,
                       wall_width_bound_check)
from .triangulation import VeeringTriangulation
from .walls import detect_walls, render_ascii

WORKERS_ENV = "VEERWALL_WORKERS"


def _dump(obj, out):
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load(args):
    return VeeringTriangulation.from_signature(args.signature, flip=args.flip)


def _fail(exc):
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    if isinstance(exc, (InputError, StructureError)):
        return EXIT_INPUT
    return EXIT_THEOREM


def cmd_validate(args, out):
    vt = _load(args)
    counts = vt.tet_type_counts()
    if args.json:
        _dump(vt.to_json(), out)
    else:
        out.write(f"{args.signature}: veering, {vt.tet_count} tetrahedra, "
                  f"{vt.edge_count} edges, {vt.cusp_count} cusp(s), "
                  f"types {counts}\n")
    return EXIT_OK


def cmd_analyze(args, out):
    if args.dot:
        vt = _load(args)
        fg = build_flow_graph(vt)
        if args.dot == "dual":
            bs = BranchedSurface(vt)
            out.write(dual_to_dot(bs, dual_graph(bs, args.ab_cap)))
            return EXIT_OK
        walls = detect_walls(vt, fg)
        cycles = [c for w in walls for c in w.infinitesimal_cycles]
        if args.dot == "flow":
            out.write(to_dot(fg, "flow", cycles))
        else:
            out.write(to_dot(reduce(fg, walls), "flow_red"))
        return EXIT_OK
    rep, code = analyze(args.signature, flip=args.flip, ab_cap=args.ab_cap)
    if code == EXIT_INPUT:
        print(f"error: {rep['error']['kind']}: {rep['error']['message']}", file=sys.stderr)
        return code
    if args.json:
        _dump(rep, out)
    else:
        _human(rep, out)
    if code:
        print(f"theorem violation: {rep['error']['kind']}: {rep['error']['message']}",
              file=sys.stderr)
    return code


def _human(rep, out):
    out.write(f"signature          {rep['signature']}\n")
    if "tet_count" in rep:
        out.write(f"tetrahedra         {rep['tet_count']}  types {rep['tet_types']}\n")
    if "scc" in rep:
        s = rep["scc"]
        out.write(f"flow graph         N={rep['flow']['N']} E={rep['flow']['E']}\n")
        out.write(f"strongly connected {s['strongly_connected']}  "
                  f"components={s['component_count']} infinitesimal={s['infinitesimal_count']}\n")
    for w in rep.get("walls", []):
        out.write(f"wall               w={w['w']} h={w['h']} twisted={w['twisted']}\n")
    if "accounting" in rep:
        a = rep["accounting"]
        out.write(f"reduced            N'={a['N_prime']} W={a['W']} removed={a['removed']}\n")
    if "spectral" in rep:
        out.write(f"lambda(reduced)    {rep['spectral']['lambda']:.12f}\n")
    if "boundary" in rep:
        out.write(f"ladderpole loops   {rep['boundary']['loop_counts']}\n")
    out.write(f"theorem verified   {rep['theorem_verified']}\n")


def cmd_walls(args, out):
    vt = _load(args)
    walls = detect_walls(vt)
    if args.json:
        _dump([w.to_json() for w in walls], out)
    elif not walls:
        out.write("no walls\n")
    else:
        for w in walls:
            out.write(render_ascii(vt, w) if args.ascii else
                      f"w={w.width} h={w.period} twisted={w.twisted} "
                      f"cycles={[list(c) for c in w.infinitesimal_cycles]}\n")
    return EXIT_OK


def cmd_boundary(args, out):
    vt = _load(args)
    bs = BranchedSurface(vt)
    bd = boundary_triangulation(bs)
    regions = complementary_regions_of_B(bs, bd)
    if args.json:
        _dump({"cusps": bd.to_json(),
               "regions": [{"cusp": r.cusp, "polygon_cusps": r.polygon_cusps,
                            "description": r.description,
                            "ladderpole_slope": r.ladderpole_slope} for r in regions]}, out)
    else:
        for c, r in zip(bd.cusps, regions):
            out.write(f"cusp {c.cusp}: {len(c.triangles)} link triangles, "
                      f"{c.loop_count} ladderpole loop(s); region {r.description}\n")
    return EXIT_OK


def cmd_spectral(args, out):
    vt = _load(args)
    fg = build_flow_graph(vt)
    walls = detect_walls(vt, fg)
    g = fg if args.graph == "flow" else reduce(fg, walls)
    mat = adjacency(g)
    res = {"graph": args.graph, "matrix": mat.to_json()}
    if mat.irreducible:
        res["perron"] = perron(mat).to_json()
    else:
        res["perron"] = None
    check = wall_width_bound_check(vt, args.lam, args.e, args.e_prime,
                                   require=args.check, walls=walls)
    res["wall_width_check"] = check.to_json()
    if args.json:
        _dump(res, out)
    else:
        out.write(f"{args.graph}: {mat.n} vertices, irreducible={mat.irreducible}\n")
        if res["perron"]:
            out.write(f"lambda = {res['perron']['lambda']:.12f}\n")
            out.write(f"left   = {[round(x, 9) for x in res['perron']['left']]}\n")
        out.write(f"W = {check.W}" + (f", bound {check.rhs:.6f}, holds={check.holds}"
                                       if check.rhs is not None else "") + "\n")
    return EXIT_OK


def cmd_bound(args, out):
    value = bound(args.P)
    ratio = value / asymptotic_bound(args.P) if args.P > 1 else float("nan")
    out.write(f"bound({args.P}) = {value!r}\nratio to (9/2) P^18 log P = {ratio!r}\n")
    return EXIT_OK


def _batch_one(item):
    sig, flip = item
    rep, code = analyze(sig, flip=flip)
    return strip_timings(rep), code


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_batch(signatures, flip=False, workers=1):
    """Reports for ``signatures`` in input order."""
    items = [(s, flip) for s in signatures]
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_batch_one, items, chunksize=8))
    return [_batch_one(it) for it in items]


def cmd_batch(args, out):
    try:
        with open(args.file) as fh:
            sigs = list(read_census(fh))
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    results = run_batch(sigs, args.flip, _workers())
    reports = [r for r, _ in results]
    if args.jsonl:
        for r in reports:
            out.write(json.dumps(r, sort_keys=True) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        if reports:
            writer.writeheader()
        for r in reports:
            writer.writerow(csv_row(r))
        out.write(buf.getvalue())
    summary = summarize(reports)
    if args.summary:
        with open(args.summary, "w") as fh:
            _dump(summary, fh)
    else:
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_THEOREM if any(c == EXIT_THEOREM for _, c in results) else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="veerwall", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def sig(sp):
        sp.add_argument("signature", help="taut isomorphism signature <iso>_<digits>")
        sp.add_argument("--flip", action="store_true", help="reverse the coorientation")

    sp = sub.add_parser("validate", help="check that a signature is veering")
    sig(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("analyze", help="full analysis of one signature")
    sig(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--dot", choices=("flow", "flow-red", "dual"),
                    help="print a Graphviz graph instead of the report")
    sp.add_argument("--ab-cap", type=int, default=None,
                    help="longest AB cycle to report (default 4 * tetrahedra)")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("batch", help="analyze every signature in a census file")
    sp.add_argument("file")
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true", help="CSV rows (default)")
    fmt.add_argument("--jsonl", action="store_true", help="one JSON report per line")
    sp.add_argument("--summary", help="write summary statistics to this file")
    sp.add_argument("--flip", action="store_true")
    sp.set_defaults(func=cmd_batch)

    sp = sub.add_parser("walls", help="list walls")
    sig(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--ascii", action="store_true", help="draw each wall grid")
    sp.set_defaults(func=cmd_walls)

    sp = sub.add_parser("boundary", help="cusp links and ladderpole loops")
    sig(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("spectral", help="adjacency matrix and Perron data")
    sig(sp)
    sp.add_argument("--graph", choices=("flow", "flow-red"), default="flow-red")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--lambda", dest="lam", type=float, help="dilatation for the W check")
    sp.add_argument("--e", type=int, help="edge count e for the W check")
    sp.add_argument("--e-prime", dest="e_prime", type=int, help="edge count e' for the W check")
    sp.add_argument("--check", action="store_true",
                    help="fail unless lambda, e and e' are all supplied")
    sp.set_defaults(func=cmd_spectral)

    sp = sub.add_parser("bound", help="evaluate the tetrahedron bound")
    sp.add_argument("--P", type=float, required=True)
    sp.set_defaults(func=cmd_bound)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (InputError, StructureError, TheoremViolation) as exc:
        return _fail(exc)
    except VeerwallError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT if isinstance(exc, ValueError) else EXIT_THEOREM


if __name__ == "__main__":
    sys.exit(main())
