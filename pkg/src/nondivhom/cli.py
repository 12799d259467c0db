"""Command-line interface.

Exit codes: 0 success, 1 error, 2 unresolved verdict.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import constructions as cons
from .errors import HomogenizationError, UnknownName

EXIT_OK, EXIT_ERROR, EXIT_UNRESOLVED = 0, 1, 2
MIN_N, MAX_N = 16, 512


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 is reserved for unresolved verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _resolution(text):
    N = int(text)
    if not MIN_N <= N <= MAX_N:
        raise argparse.ArgumentTypeError(f"resolution must lie in [{MIN_N}, {MAX_N}]")
    return N


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_source(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gallery", metavar="NAME", help="named reference field")
    g.add_argument("--input", metavar="PATH", help="field JSON file")


def _add_output(p, formats=("json", "table")):
    p.add_argument("--output", metavar="PATH", help="write the result here instead of stdout")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser():
    parser = _Parser(prog="nondivhom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="type-eps / type-eps^2 verdict at N and 2N")
    _add_source(p)
    p.add_argument("--resolution", type=_resolution)
    p.add_argument("--tolerance", type=_positive, default=None, help="verdict tolerance")
    _add_output(p, ("json", "table", "csv"))

    p = sub.add_parser("tensor", help="effective matrix and third-order tensor")
    _add_source(p)
    p.add_argument("--resolution", type=_resolution)
    p.add_argument("--tolerance", type=_positive, default=None, help="solver residual tolerance")
    _add_output(p, ("json", "table", "csv"))

    p = sub.add_parser("invariant", help="invariant measure summary")
    _add_source(p)
    p.add_argument("--resolution", type=_resolution)
    p.add_argument("--tolerance", type=_positive, default=None, help="solver residual tolerance")
    _add_output(p, ("json", "table", "csv"))

    p = sub.add_parser("gallery", help="list or export gallery fields")
    p.add_argument("name", nargs="?", help="export this entry; list all if omitted")
    p.add_argument("--resolution", type=_resolution)
    _add_output(p)

    p = sub.add_parser("verify", help="run a property suite")
    from .suites import SUITE_NAMES

    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("rate", help="Dirichlet convergence-rate experiment")
    from .dirichlet_lab import PRESETS

    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=PRESETS)
    g.add_argument("--input", metavar="PATH", help="experiment spec JSON")
    p.add_argument("--interior", action="store_true", help="measure errors on [1/4, 3/4]^n")
    p.add_argument("--workers", type=int, default=1)
    _add_output(p, ("csv", "json", "table"))
    return parser


# -- helpers --------------------------------------------------------------------------

def _load_field(args, N=None):
    from .field import field_from_json
    from .homogenize import default_resolution

    if args.gallery:
        return cons.gallery(args.gallery, N).field
    with open(args.input) as fh:
        obj = json.load(fh)
    n = int(obj.get("dimension", 2))
    return field_from_json(obj, N or default_resolution(n))


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(args, text):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tensor_rows(c):
    n = c.shape[0]
    rows = []
    for j in range(n):
        for k in range(n):
            for l in range(k, n):
                rows.append((j + 1, k + 1, l + 1, float(c[j, k, l])))
    return rows


def _tensor_csv(c):
    lines = ["j,k,l,c"] + [f"{j},{k},{l},{v!r}" for j, k, l, v in _tensor_rows(c)]
    return "\n".join(lines) + "\n"


def _tensor_table(c):
    return "\n".join(f"c_{j}^{k}{l} = {v: .10e}" for j, k, l, v in _tensor_rows(c)) + "\n"


# -- commands -------------------------------------------------------------------------

def cmd_classify(args):
    from .homogenize import VERDICT_TOL, Verdict, classify

    A = _load_field(args)
    rep = classify(A, args.resolution, tol=args.tolerance or VERDICT_TOL)
    if args.format == "json":
        out = rep.to_dict()
        out["source"] = args.gallery or args.input
        text = _dump(out)
    elif args.format == "csv":
        text = _tensor_csv(rep.refined.c)
    else:
        text = (f"verdict     {rep.verdict}\n"
                f"max |C|     {rep.max_C:.6e}\n"
                f"threshold   {rep.threshold:.3e}\n"
                f"resolutions {rep.resolution_pair[0]} -> {rep.resolution_pair[1]}\n"
                f"gap         {rep.gap:.3e}\n" + _tensor_table(rep.refined.c))
    _emit(args, text)
    return EXIT_UNRESOLVED if rep.verdict is Verdict.UNRESOLVED else EXIT_OK


def cmd_tensor(args):
    from .homogenize import third_order_tensor
    from .periodic_solver import DEFAULT_TOL

    A = _load_field(args)
    T = third_order_tensor(A, args.resolution, args.tolerance or DEFAULT_TOL)
    if args.format == "json":
        text = _dump(T.to_dict())
    elif args.format == "csv":
        text = _tensor_csv(T.c)
    else:
        eff = "\n".join("  " + " ".join(f"{x: .10f}" for x in row) for row in T.effective)
        text = f"N = {T.resolution}\nAbar =\n{eff}\n" + _tensor_table(T.c)
    _emit(args, text)
    return EXIT_OK


def cmd_invariant(args):
    from .homogenize import effective_matrix
    from .periodic_solver import DEFAULT_TOL, solve_invariant_measure

    A = _load_field(args)
    r, rep = solve_invariant_measure(A, args.resolution, args.tolerance or DEFAULT_TOL)
    if args.format == "csv":
        vals = r.values
        N = r.resolution
        idx = np.indices(vals.shape).reshape(vals.ndim, -1).T
        head = ",".join(f"y{i + 1}" for i in range(vals.ndim)) + ",r"
        lines = [head] + [",".join(repr(float(i) / N) for i in ix) + f",{float(vals[tuple(ix)])!r}"
                          for ix in idx]
        text = "\n".join(lines) + "\n"
    else:
        out = {"resolution": r.resolution, "min": r.min(), "max": r.max(), "mean": r.mean(),
               "effective": effective_matrix(A.at_resolution(r.resolution), r).tolist(),
               "report": rep.to_dict()}
        if args.format == "json":
            text = _dump(out)
        else:
            text = "".join(f"{k:10s} {out[k]}\n" for k in ("resolution", "min", "max", "mean",
                                                           "effective"))
    _emit(args, text)
    return EXIT_OK


def cmd_gallery(args):
    if args.name is None:
        _emit(args, "".join(f"{n}\n" for n in cons.GALLERY_NAMES))
        return EXIT_OK
    entry = cons.gallery(args.name, args.resolution)
    if args.format == "json":
        text = _dump(entry.to_json_obj())
    else:
        lines = [f"name      {entry.name}", f"verdict   {entry.expected_verdict}",
                 f"citation  {entry.citation}"]
        lines += [f"c_{r.index[0] + 1}^{r.index[1] + 1}{r.index[2] + 1} = {r.value:.10e} "
                  f"+- {r.tol:.1e} ({r.kind}{', printed ' + r.printed if r.printed else ''})"
                  for r in entry.reference]
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_OK


def cmd_verify(args):
    from .suites import run_suite

    res = run_suite(args.suite, args.trials, args.seed)
    if args.format == "json":
        text = _dump(res.to_dict())
    else:
        status = "PASS" if res.passed else "FAIL"
        lines = [f"{res.name}: {status} ({len(res.checks)} checks, seed {res.seed}, "
                 f"trials {res.trials})"]
        lines += [f"  failed {c.label}: {c.value:.3e} > {c.tol:.1e}" for c in res.failures]
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    if not res.passed:
        first = res.failures[0] if res.failures else None
        if first is not None:
            print(f"first failing assertion: {first.label} ({first.value:.3e} vs {first.tol:.1e})",
                  file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def load_rate_spec(path):
    """Experiment spec JSON: {"gallery" | "field", "f", "g", "epsilons", ...}."""
    from .dirichlet_lab import BvpSpec
    from .field import field_from_json

    with open(path) as fh:
        obj = json.load(fh)
    if "gallery" in obj:
        entry = cons.gallery(obj["gallery"])
        A = entry.field
        bvp = entry.bvp or {}
    else:
        fobj = obj["field"]
        A = field_from_json(fobj, int(obj.get("resolution", 32)))
        bvp = {}
    kw = {}
    for key in ("cells_per_period", "x3_cells"):
        if key in obj:
            kw[key] = int(obj[key])
    eps = obj.get("epsilons", bvp.get("epsilons"))
    if eps is not None:
        kw["epsilons"] = tuple(float(e) for e in eps)
    return BvpSpec(A, f=str(obj.get("f", bvp.get("f", "0"))), g=str(obj.get("g", bvp.get("g", "0"))),
                   name=str(obj.get("name", path)), **kw)


def cmd_rate(args):
    from .dirichlet_lab import preset, run_rate_experiment

    spec = preset(args.preset) if args.preset else load_rate_spec(args.input)
    ex = run_rate_experiment(spec, interior=args.interior, workers=args.workers)
    if args.format == "csv":
        text = ex.to_csv()
    elif args.format == "json":
        text = ex.to_json() + "\n"
    else:
        text = ex.to_csv().replace(",", "  ")
    _emit(args, text)
    print(f"fitted_rate_u = {ex.fit_u.slope:.4f} (residual {ex.fit_u.residual:.3g}); "
          f"fitted_rate_z = {ex.fit_z.slope:.4f} (residual {ex.fit_z.residual:.3g})"
          + (f"; flags: {', '.join(ex.flags)}" if ex.flags else ""), file=sys.stderr)
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "tensor": cmd_tensor, "invariant": cmd_invariant,
            "gallery": cmd_gallery, "verify": cmd_verify, "rate": cmd_rate}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (HomogenizationError, UnknownName, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
