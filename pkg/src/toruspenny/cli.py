"""``toruspenny`` command line.

Exit codes: 0 success, 1 verification failed, 2 usage or invalid input,
3 numerical failure. Reports go to stdout as JSON, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .catalog import (
    CATALOG,
    ToroidalDrawing,
    catalog_entry,
    drawing_from_json,
    drawing_to_json,
    verify_drawing,
)
from .errors import CatalogError, ConvergenceError, InvalidInputError, StructureError, TorusPennyError
from .graphs import SmallGraph, harborth_bound, is_planar, named_graph
from .optimizer import OptimizerParams, optimize, uniqueness_survey
from .packing import analyze, config_from_json, config_to_json, verify_penny
from .render import RenderOptions, render_drawing, render_packing

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so ``run`` can return."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def _emit(report: dict, out=None) -> None:
    out = out or sys.stdout
    json.dump({"schema_version": SCHEMA_VERSION, **report}, out, indent=2)
    out.write("\n")


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc


def _expected_graph(spec: str) -> SmallGraph:
    if spec.endswith(".json"):
        return SmallGraph.from_json(_read_json(spec))
    try:
        return named_graph(catalog_entry(spec).expected)
    except CatalogError:
        return named_graph(spec)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    cfg = config_from_json(_read_json(args.config))
    expected = _expected_graph(args.expect)
    tol = 1e-9 if args.tol is None else args.tol
    verdict = verify_penny(cfg, expected, tol=tol, exact=args.exact)
    report = {
        "command": "verify",
        "node_numbering": "1-based",
        "expected": args.expect,
        "exact": bool(args.exact),
        "passed": verdict.passed,
        "reasons": verdict.reasons,
    }
    if verdict.contact is not None:
        cg = verdict.contact
        report["diameter"] = cg.diameter
        report["diameter_squared"] = str(cg.diameter_sq) if args.exact else float(cg.diameter_sq)
        report["contact_edges"] = [[i + 1, j + 1] for i, j in cg.edges]
    report["violations"] = [v.to_dict() for v in verdict.violations]
    report["extra_contacts"] = [[i + 1, j + 1] for i, j in verdict.extra_contacts]
    if verdict.witness is not None:
        report["isomorphism"] = [w + 1 for w in verdict.witness]
    _emit(report)
    if not verdict.passed:
        for r in verdict.reasons:
            print(f"verify: {r}", file=sys.stderr)
    return EXIT_OK if verdict.passed else EXIT_FAILED


def _cmd_analyze(args) -> int:
    cfg = config_from_json(_read_json(args.config))
    rep = analyze(cfg, tol=args.tol)
    _emit({"command": "analyze", **rep.to_dict()})
    return EXIT_OK


def _params(args, **extra) -> OptimizerParams:
    kw = dict(seed=args.seed, **extra)
    if getattr(args, "tol", None) is not None:
        kw["convergence_tol"] = args.tol
    if getattr(args, "max_iterations", None) is not None:
        kw["max_iterations"] = args.max_iterations
    return OptimizerParams(**kw)


def _cmd_optimize(args) -> int:
    params = _params(args, restarts=args.restarts, workers=args.workers)
    res = optimize(args.n, params)
    _emit({
        "command": "optimize",
        "n": args.n,
        "seed": args.seed,
        "restarts": args.restarts,
        "diameter": res.diameter,
        "best_restart": res.best_restart,
        "hits": res.hits(),
        "configuration": config_to_json(res.configuration),
    })
    return EXIT_OK


def _cmd_survey(args) -> int:
    params = _params(args, workers=args.workers)
    kw = {} if args.tol is None else {"refine_tol": args.tol}
    res = uniqueness_survey(args.target, args.trials, params, **kw)
    _emit({"command": "survey", "seed": args.seed, **res.to_dict()})
    print(
        f"survey: {len(res.classes)} class(es) at the reference diameter, "
        f"{len(res.unfiltered_classes)} unfiltered, {res.failures} failures, "
        f"{res.rejected} rejected",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_catalog(args) -> int:
    if args.action == "list":
        _emit({
            "command": "catalog",
            "entries": [
                {"name": e.name, "expected": e.expected, "description": e.description,
                 "penny": e.penny, "drawing": e.drawing is not None}
                for e in CATALOG.values()
            ],
        })
        return EXIT_OK
    if not args.name:
        raise _UsageError("catalog emit needs an entry name")
    entry = catalog_entry(args.name)
    data = drawing_to_json(entry.drawing()) if entry.drawing else config_to_json(entry.build())
    _emit(data)
    return EXIT_OK


def _load_renderable(args):
    if args.catalog:
        entry = catalog_entry(args.catalog)
        return entry.drawing() if entry.drawing else entry.build()
    data = _read_json(args.input)
    if isinstance(data, dict) and "edges" in data:
        return drawing_from_json(data)
    return config_from_json(data)


def _cmd_render(args) -> int:
    if bool(args.input) == bool(args.catalog):
        raise _UsageError("render needs exactly one of --input or --catalog")
    obj = _load_renderable(args)
    opts = RenderOptions(
        tiling=args.tiling, canvas_size=args.size,
        show_edges=not args.no_edges, show_labels=args.labels,
    )
    if isinstance(obj, ToroidalDrawing):
        svg = render_drawing(obj, opts)
        kind, edges = "drawing", len(obj.edges)
    else:
        svg = render_packing(obj, None, opts)
        kind, edges = "packing", None
    if args.out in (None, "-"):
        sys.stdout.write(svg)
        return EXIT_OK
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    n = obj.n
    _emit({
        "command": "render",
        "kind": kind,
        "out": args.out,
        "tiling": args.tiling,
        "circles": args.tiling ** 2 * n,
        "edge_groups": edges if edges is not None else svg.count('<g class="edge"'),
    })
    return EXIT_OK


def _cmd_bound(args) -> int:
    _emit({"command": "bound", "n": args.n, "bound": harborth_bound(args.n)})
    return EXIT_OK


def _cmd_planar(args) -> int:
    g = SmallGraph.from_json(_read_json(args.graph))
    res = is_planar(g)
    report = {"command": "planar", "n": g.n, "edge_count": g.edge_count, "planar": res.planar}
    if not res.planar:
        report["witness_kind"] = res.witness_kind
        report["witness_edges"] = [list(e) for e in res.witness.edges()] if res.witness else None
    _emit(report)
    return EXIT_OK


def _cmd_check_drawing(args) -> int:
    d = drawing_from_json(_read_json(args.drawing))
    verdict = verify_drawing(d)
    _emit({
        "command": "check-drawing",
        "passed": verdict.passed,
        "crossings": [list(c) for c in verdict.crossings],
    })
    return EXIT_OK if verdict.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toruspenny", description="Penny graphs on the flat square torus.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", help="check a configuration realises a penny graph")
    v.add_argument("config", nargs="?", default="-", help="configuration JSON (default: stdin)")
    v.add_argument("--expect", required=True, help="graph name (k5, k33, octahedron, ...) or graph JSON file")
    v.add_argument("--exact", action="store_true", help="rational arithmetic, zero tolerance")
    v.add_argument("--tol", type=float, default=None, help="relative contact tolerance (default 1e-9)")
    v.set_defaults(func=_cmd_verify)

    a = sub.add_parser("analyze", help="contact graph and its properties")
    a.add_argument("config", nargs="?", default="-")
    a.add_argument("--tol", type=float, default=None)
    a.set_defaults(func=_cmd_analyze)

    o = sub.add_parser("optimize", help="maximise the minimum distance of n points")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--restarts", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--workers", type=int, default=1)
    o.add_argument("--max-iterations", type=int, default=None)
    o.add_argument("--tol", type=float, default=None)
    o.set_defaults(func=_cmd_optimize)

    s = sub.add_parser("survey", help="sample and cluster equal-edge realisations")
    s.add_argument("--target", default="k33")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--max-iterations", type=int, default=None)
    s.add_argument("--tol", type=float, default=None, help="refinement residual tolerance")
    s.set_defaults(func=_cmd_survey)

    c = sub.add_parser("catalog", help="list or emit reference configurations")
    c.add_argument("action", choices=["list", "emit"])
    c.add_argument("name", nargs="?")
    c.set_defaults(func=_cmd_catalog)

    r = sub.add_parser("render", help="write an SVG picture")
    r.add_argument("--input", help="configuration or drawing JSON ('-' for stdin)")
    r.add_argument("--catalog", help="catalog entry name")
    r.add_argument("--tiling", type=int, default=1)
    r.add_argument("--size", type=int, default=480)
    r.add_argument("--out", default=None, help="output file (default: SVG on stdout)")
    r.add_argument("--no-edges", action="store_true")
    r.add_argument("--labels", action="store_true")
    r.set_defaults(func=_cmd_render)

    b = sub.add_parser("bound", help="maximum edge count of an n-penny planar graph")
    b.add_argument("--n", type=int, required=True)
    b.set_defaults(func=_cmd_bound)

    pl = sub.add_parser("planar", help="planarity test with Kuratowski witness")
    pl.add_argument("graph", nargs="?", default="-")
    pl.set_defaults(func=_cmd_planar)

    cd = sub.add_parser("check-drawing", help="crossing check for a toroidal drawing JSON")
    cd.add_argument("drawing", nargs="?", default="-")
    cd.set_defaults(func=_cmd_check_drawing)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"toruspenny {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInputError as exc:
        print(f"toruspenny {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, StructureError) as exc:
        print(f"toruspenny {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TorusPennyError as exc:
        print(f"toruspenny {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
