"""``ruledsurf`` command line: analyze, mesh, verify and examples.

Exit codes: 0 ok, 1 input error, 2 analysis error, 3 IO error, 4 verification failure.
"""

import argparse
import os
import sys

from .errors import AnalysisError, ExpressionError, JetError, RuledSurfError, SceneError
from .fmt import dumps
from .geometry import export_mesh
from .oracle import FdConfig, verify
from .report import report_dict, run_analysis
from .scene import BUILTINS, builtin_text, load_scene

EXIT_OK, EXIT_INPUT, EXIT_ANALYSIS, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3, 4


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="output file (analyze, verify, examples) or directory (mesh)")
    p.add_argument("--jet-order", type=int, dest="jet_order")
    p.add_argument("--tol", type=float)
    p.add_argument("--x-range", type=float, nargs=2, metavar=("A", "B"), dest="x_range")
    p.add_argument("--t-range", type=float, nargs=2, metavar=("A", "B"), dest="t_range")
    p.add_argument("--resolution", type=int, nargs=2, metavar=("NX", "NT"))
    p.add_argument("--json", action="store_true", help="machine-readable errors and summaries")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="ruledsurf", description="Singularities of ruled surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("analyze", "classify the singular points of a scene"),
        ("mesh", "write an OBJ mesh and a CSV of invariants"),
        ("verify", "cross-check the analysis against finite differences"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("scene", help="scene file, or the name of a built-in example")
    p = sub.add_parser("examples", parents=[common], help="print a built-in scene")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    return parser


def _overrides(args):
    keys = ("jet_order", "tol", "x_range", "t_range", "resolution")
    return {k: (list(v) if isinstance(v, list) else v) for k in keys if (v := getattr(args, k)) is not None}


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _fail(args, code, payload):
    payload = {**payload, "exit_code": code}
    if getattr(args, "json", False):
        sys.stdout.write(dumps(payload))
    else:
        pos = f" (position {payload['position']})" if "position" in payload else ""
        sys.stderr.write(f"ruledsurf: {payload['reason']}: {payload['message']}{pos}\n")
    return code


def cmd_analyze(args):
    an = run_analysis(load_scene(args.scene, _overrides(args)))
    _write(dumps(report_dict(an)), args.out)
    return EXIT_OK


def cmd_mesh(args):
    an = run_analysis(load_scene(args.scene, _overrides(args)))
    opts = an.scene.options
    out_dir = args.out or "."
    stem = an.scene.name or "surface"
    bundle, obj_path, csv_path = export_mesh(
        an.ctx, opts.x_range, opts.t_range, opts.resolution, out_dir, stem, an.locus
    )
    summary = {
        "obj": obj_path,
        "csv": csv_path,
        "vertices": int(bundle.vertices.shape[0] * bundle.vertices.shape[1]),
        "striction_polylines": len(bundle.striction),
        "singular_polylines": len(bundle.singular_lines),
        "singular_points": len(bundle.singular_points),
        "notes": list(an.locus.notes),
    }
    if args.json:
        sys.stdout.write(dumps(summary))
    else:
        sys.stdout.write(f"wrote {obj_path}\nwrote {csv_path}\n")
    return EXIT_OK


def _marginal_points(reports):
    out = []
    for rep in reports:
        for sub in rep.samples or (rep,):
            if sub.marginal:
                out.append({**sub.point.to_dict(), "names": list(sub.marginal)})
    return out


def cmd_verify(args):
    an = run_analysis(load_scene(args.scene, _overrides(args)))
    opts = an.scene.options
    result = verify(an.ctx, opts.x_range, opts.t_range, FdConfig(), an.reports)
    result["surface"] = an.scene.name
    result["marginal"] = _marginal_points(an.reports)
    _write(dumps(result), args.out)
    return EXIT_OK if result["pass"] else EXIT_VERIFY


def cmd_examples(args):
    if args.list or args.name is None:
        names = sorted(BUILTINS)
        _write(dumps(names) if args.json else "\n".join(names) + "\n", args.out)
        return EXIT_OK
    _write(builtin_text(args.name), args.out)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "mesh": cmd_mesh, "verify": cmd_verify, "examples": cmd_examples}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SceneError, ExpressionError) as exc:
        return _fail(args, EXIT_INPUT, exc.to_dict())
    except (AnalysisError, JetError) as exc:
        return _fail(args, EXIT_ANALYSIS, exc.to_dict())
    except RuledSurfError as exc:
        return _fail(args, EXIT_ANALYSIS, exc.to_dict())
    except OSError as exc:
        payload = {"error": type(exc).__name__, "reason": "io-error", "message": str(exc)}
        return _fail(args, EXIT_IO, payload)


if __name__ == "__main__":
    sys.exit(main())
