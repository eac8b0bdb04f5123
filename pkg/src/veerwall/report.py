"""The analysis pipeline and its report records."""

from __future__ import annotations

import time
from collections import Counter

from . import __version__
from .branched import (BranchedSurface, ab_cycles_in_wall, boundary_triangulation,
                       complementary_regions_of_B, dual_graph, expected_ab_count)
from .errors import InputError, StructureError, TheoremViolation, VeerwallError
from .flowgraph import build_flow_graph, condensation_summary, reduce, scc
from .spectral import adjacency, perron
from .triangulation import BLUE_FAN, RED_FAN, TOGGLE, VeeringTriangulation
from .walls import accounting, complementary_regions, detect_walls, verify_theorem

EXIT_OK, EXIT_THEOREM, EXIT_INPUT = 0, 1, 2


class _Clock:
    def __init__(self):
        self.times = {}
        self._t = time.perf_counter()

    def lap(self, name):
        now = time.perf_counter()
        self.times[name] = round(now - self._t, 6)
        self._t = now


def _region_stats(regions):
    return {"count": len(regions),
            "annulus": sum(r.core == "annulus" for r in regions),
            "mobius": sum(r.core == "mobius" for r in regions),
            "tongues": sum(r.tongue_count for r in regions),
            "patterns": sorted(r.pattern for r in regions)}


def analyze(signature, flip=False, swap_colors=False, regions=True, ab_cap=None):
    """Run the full pipeline on one signature.

    Returns ``(report, exit_code)``.  The report is filled in as far as
    the pipeline got; on failure it carries an ``error`` record.
    """
    rep = {"signature": signature, "flip": flip, "version": __version__,
           "veering_valid": False, "theorem_verified": False}
    clock = _Clock()
    try:
        vt = VeeringTriangulation.from_signature(signature, flip=flip,
                                                 swap_colors=swap_colors)
        clock.lap("triangulation")
        rep["veering_valid"] = True
        rep["tet_count"] = vt.tet_count
        rep["edge_count"] = vt.edge_count
        rep["cusp_count"] = vt.cusp_count
        counts = Counter(vt.tet_type)
        rep["tet_types"] = {"toggle": counts[TOGGLE], "red_fan": counts[RED_FAN],
                            "blue_fan": counts[BLUE_FAN]}

        fg = build_flow_graph(vt)
        indeg = fg.indegree()
        rep["flow"] = {"N": fg.n, "E": len(fg.edges),
                       "indegrees": sorted(set(indeg.values()))}
        cond = scc(fg)
        rep["scc"] = condensation_summary(cond)
        clock.lap("flow_graph")

        walls = detect_walls(vt, fg, cond)
        rep["walls"] = [{"w": w.width, "h": w.period, "twisted": w.twisted,
                         "mobius": w.mobius, "cycles": [list(c) for c in w.infinitesimal_cycles]}
                        for w in walls]
        report = verify_theorem(vt, fg, cond, walls)
        red = reduce(fg, walls)
        rep["reduced"] = {"N_prime": red.n, "strongly_connected": True}
        rep["accounting"] = accounting(vt, walls, red).to_json()
        clock.lap("walls")

        mat = adjacency(red)
        pd = perron(mat)
        rep["spectral"] = {"lambda": pd.eigenvalue, "residual": pd.residual,
                           "iterations": pd.iterations,
                           "left": [round(x, 12) for x in pd.left.tolist()]}
        clock.lap("spectral")

        bs = BranchedSurface(vt)
        bd = boundary_triangulation(bs)
        complementary_regions_of_B(bs, bd)
        rep["boundary"] = {"loop_counts": bd.loop_counts(),
                           "branch_circles": len(bs.branch_circles)}
        dg = dual_graph(bs, ab_cap)
        ab = []
        for w in walls:
            found = len(ab_cycles_in_wall(bs, dg, w))
            if found != expected_ab_count(w):
                raise TheoremViolation(
                    f"wall of width {w.width} holds {found} AB cycles",
                    {"signature": signature, "wall": w.to_json()})
            ab.append(found)
        rep["ab_cycles"] = {"total": len(dg.ab_cycles), "per_wall": ab}
        clock.lap("branched")

        if regions:
            rf = complementary_regions(vt, "flow", fg, walls, bs)
            rr = complementary_regions(vt, "flow-red", fg, walls, bs)
            rep["regions"] = {"flow": _region_stats(rf), "flow_red": _region_stats(rr)}
            clock.lap("regions")
        rep["theorem_verified"] = report.passed
        rep["timings"] = clock.times
        return rep, EXIT_OK
    except (InputError, StructureError) as exc:
        rep["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        return rep, EXIT_INPUT
    except TheoremViolation as exc:
        rep["error"] = {"kind": type(exc).__name__, "message": str(exc),
                        "bundle": _plain(exc.bundle)}
        return rep, EXIT_THEOREM
    except VeerwallError as exc:
        rep["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        return rep, EXIT_THEOREM


def _plain(obj):
    """Bundles may hold tuples, sets and frozensets; make them JSON-ready."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    return obj


CSV_FIELDS = ("signature", "tet_count", "veering_valid", "toggle", "red_fan", "blue_fan",
              "N", "components", "infinitesimal", "strongly_connected", "walls", "W",
              "N_prime", "lambda_red", "loop_counts", "theorem_verified", "error")


def csv_row(rep):
    """Flat record of a report for CSV output."""
    walls = ";".join(f"{w['w']}x{w['h']}{'t' if w['twisted'] else ''}"
                     for w in rep.get("walls", []))
    types = rep.get("tet_types", {})
    scc_ = rep.get("scc", {})
    acc = rep.get("accounting", {})
    spec = rep.get("spectral", {})
    return {
        "signature": rep["signature"],
        "tet_count": rep.get("tet_count", ""),
        "veering_valid": rep["veering_valid"],
        "toggle": types.get("toggle", ""),
        "red_fan": types.get("red_fan", ""),
        "blue_fan": types.get("blue_fan", ""),
        "N": rep.get("flow", {}).get("N", ""),
        "components": scc_.get("component_count", ""),
        "infinitesimal": scc_.get("infinitesimal_count", ""),
        "strongly_connected": scc_.get("strongly_connected", ""),
        "walls": walls,
        "W": acc.get("W", ""),
        "N_prime": acc.get("N_prime", ""),
        "lambda_red": f"{spec['lambda']:.9f}" if "lambda" in spec else "",
        "loop_counts": ";".join(map(str, rep.get("boundary", {}).get("loop_counts", []))),
        "theorem_verified": rep["theorem_verified"],
        "error": rep.get("error", {}).get("kind", ""),
    }


def summarize(reports):
    """Summary statistics over a batch."""
    ok = [r for r in reports if "error" not in r]
    hist = Counter(w["w"] for r in ok for w in r.get("walls", []))
    n_sc = sum(1 for r in ok if r["scc"]["strongly_connected"])
    return {
        "lines": len(reports),
        "analyzed": len(ok),
        "errors": len(reports) - len(ok),
        "strongly_connected": n_sc,
        "fraction_strongly_connected": round(n_sc / len(ok), 6) if ok else 0.0,
        "wall_width_histogram": {str(k): hist[k] for k in sorted(hist)},
        "twisted_walls": sum(w["twisted"] for r in ok for w in r.get("walls", [])),
        "max_W": max((r["accounting"]["W"] for r in ok), default=0),
        "theorem_verified": sum(1 for r in ok if r["theorem_verified"]),
    }


def strip_timings(rep):
    rep = dict(rep)
    rep.pop("timings", None)
    return rep
