"""Command-line interface: evaluate instances, sweep grids, run the check suite.

Subcommands
-----------
``eval``
    Evaluate one instance (or a JSON batch) with a chosen subset of routes.
``compare``
    Run every applicable route on one instance and report discrepancies.
``sweep``
    Evaluate a grid of (n, k) combinations for fixed weights, one output row
    per grid point.
``check``
    Run the identity/consistency suite; exits 3 if anything fails.

Exit codes: 0 success, 1 usage error, 2 invalid instance data (bad p/k),
3 check-suite failure.  All output is byte-deterministic for a given
command line, including Monte Carlo results (seeds are mandatory).
"""

from __future__ import annotations

import argparse
import json
import sys

from .model import build_instance
from .quadrature import QuadratureSpec
from .survival import DETERMINISTIC_ROUTES, RouteReport, compare_routes
from .checks import run_check_suite

__all__ = ["run", "main", "emit_report", "emit_reports", "report_to_dict"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise UsageError(message)


# ---------------------------------------------------------------------------
# serialization: floats carry 17 significant digits so parsing returns the
# exact same binary value.

def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _json_value(obj, indent, level):
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_json_value(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_json_value(v, indent, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _dumps(obj) -> str:
    return _json_value(obj, 2, 0) + "\n"


def report_to_dict(report: RouteReport) -> dict:
    gaussian = report.gaussian
    if gaussian is None and report.gaussian_reason is not None:
        gaussian = {"inapplicable": report.gaussian_reason}
    mc = None
    if report.mc is not None:
        mc = {
            "estimate": report.mc.estimate,
            "stderr": report.mc.stderr,
            "replications": report.mc.replications,
            "seed": report.mc.seed,
        }
    return {
        "instance": {
            "n": report.n,
            "d": report.d,
            "p": list(report.p),
            "k": list(report.k),
        },
        "routes": {
            "exact": report.exact,
            "dirichlet": report.dirichlet,
            "gaussian": gaussian,
            "mc": mc,
        },
        "diagnostics": {
            "delta_n": report.delta_n,
            "gamma_tilde": report.gamma_tilde,
            "max_rel_diff": report.max_rel_diff,
        },
        "params": {"nodes": report.nodes, "tolerance": report.tolerance},
    }


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return _fmt_float(value)
    return str(value)


def _csv_lines(reports):
    d = reports[0].d
    if any(r.d != d for r in reports):
        raise UsageError("csv output requires a uniform dimension across instances")
    header = (
        ["n", "d"]
        + [f"p_{i+1}" for i in range(d)]
        + [f"k_{i+1}" for i in range(d)]
        + ["exact", "dirichlet", "gaussian", "mc_est", "mc_se",
           "delta_n", "gamma_tilde", "max_rel_diff"]
    )
    lines = [",".join(header)]
    for r in reports:
        row = [str(r.n), str(r.d)]
        row += [_fmt_float(v) for v in r.p]
        row += [str(v) for v in r.k]
        row += [_csv_cell(r.exact), _csv_cell(r.dirichlet), _csv_cell(r.gaussian)]
        row += [
            _csv_cell(r.mc.estimate if r.mc else None),
            _csv_cell(r.mc.stderr if r.mc else None),
        ]
        row += [_csv_cell(r.delta_n), _csv_cell(r.gamma_tilde), _csv_cell(r.max_rel_diff)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def emit_report(report: RouteReport, fmt: str = "json") -> bytes:
    """Serialize one report; JSON keys follow the documented layout."""
    return emit_reports([report], fmt, single=True)


def emit_reports(reports, fmt: str = "json", single: bool = False) -> bytes:
    if fmt == "json":
        payload = report_to_dict(reports[0]) if single else [report_to_dict(r) for r in reports]
        return _dumps(payload).encode()
    if fmt == "csv":
        return _csv_lines(reports).encode()
    raise UsageError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# argument handling

def _float_list(text):
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")


def _int_range(text):
    """``start:stop:step`` (inclusive) or a single integer."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        if len(parts) == 3:
            start, stop, step = (int(v) for v in parts)
            if step <= 0 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
    except ValueError:
        pass
    raise UsageError(f"expected INT or START:STOP:STEP, got {text!r}")


def _add_common(sub):
    sub.add_argument("--nodes", type=int, default=48, help="Gauss-Legendre nodes per axis")
    sub.add_argument("--tolerance", type=float, default=1e-8, help="recorded agreement tolerance")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", help="output path (default: standard output)")
    sub.add_argument("--mc-reps", type=int, help="Monte Carlo replications (enables the mc route)")
    sub.add_argument("--seed", type=int, help="RNG seed; required whenever MC runs")


def _build_parser():
    parser = _Parser(prog="mnsurv", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    ev = subs.add_parser("eval", help="evaluate one instance (or a JSON batch)")
    ev.add_argument("--n", type=int)
    ev.add_argument("--p", help="comma-separated weights")
    ev.add_argument("--k", help="comma-separated thresholds")
    ev.add_argument("--input", help="JSON file with a list of {n, p, k} objects")
    ev.add_argument(
        "--routes",
        help="subset of exact,dirichlet,gaussian,mc (default: the deterministic "
        "three, plus mc when --mc-reps is given)",
    )
    _add_common(ev)

    cp = subs.add_parser("compare", help="run all applicable routes and compare")
    cp.add_argument("--n", type=int)
    cp.add_argument("--p", help="comma-separated weights")
    cp.add_argument("--k", help="comma-separated thresholds")
    cp.add_argument("--input", help="JSON file with a list of {n, p, k} objects")
    _add_common(cp)

    sw = subs.add_parser("sweep", help="evaluate a grid of (n, k) combinations")
    sw.add_argument("--n", required=True, help="INT or START:STOP:STEP (inclusive)")
    sw.add_argument("--p", required=True, help="comma-separated weights, fixed over the sweep")
    group = sw.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", help="fixed comma-separated thresholds")
    group.add_argument(
        "--k-all",
        action="store_true",
        help="all thresholds with every k_i >= 1 and sum <= n",
    )
    _add_common(sw)

    ck = subs.add_parser("check", help="run the identity/consistency suite")
    ck.add_argument("--tol", type=float, default=1e-8, help="route-agreement tolerance")
    ck.add_argument("--identity-tol", type=float, default=1e-10,
                    help="pointwise identity tolerance")
    ck.add_argument("--seed", type=int, default=7, help="seed for the randomized panels")
    return parser


def _instances_from_args(args):
    if args.input is not None:
        if args.n is not None or args.p is not None or args.k is not None:
            raise UsageError("--input replaces --n/--p/--k")
        try:
            with open(args.input, "rb") as fh:
                records = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.input} is not valid JSON: {exc}")
        if not isinstance(records, list):
            raise UsageError("--input must contain a JSON list of {n, p, k} objects")
        return [(rec.get("n"), rec.get("p"), rec.get("k")) for rec in records]
    if args.n is None or args.p is None or args.k is None:
        raise UsageError("either --input or all of --n/--p/--k are required")
    return [(args.n, _float_list(args.p), _int_list(args.k))]


def _mc_spec(args):
    if args.tolerance <= 0.0:
        raise UsageError("--tolerance must be positive")
    if args.mc_reps is None:
        return None
    if args.seed is None:
        raise UsageError("--seed is required whenever MC is requested")
    return QuadratureSpec(
        mode="monte-carlo", replications=args.mc_reps, seed=args.seed
    )


def _write(args, payload: bytes):
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


def _run_eval(args, routes):
    spec = QuadratureSpec(nodes=args.nodes)
    base_mc = _mc_spec(args)
    if routes is not None and "mc" in routes and base_mc is None:
        raise UsageError("route 'mc' requires --mc-reps and --seed")
    triples = _instances_from_args(args)
    reports = []
    for idx, (n, p, k) in enumerate(triples):
        inst = build_instance(n, p, k)
        mc = base_mc
        if mc is not None and len(triples) > 1:
            mc = QuadratureSpec(mode="monte-carlo", replications=mc.replications,
                                seed=mc.seed + idx)
        reports.append(
            compare_routes(inst, spec, mc_spec=mc, routes=routes, tolerance=args.tolerance)
        )
    _write(args, emit_reports(reports, args.format, single=len(reports) == 1))
    return 0


def _run_sweep(args):
    spec = QuadratureSpec(nodes=args.nodes)
    base_mc = _mc_spec(args)
    p = _float_list(args.p)
    d = len(p)
    grid = []
    for n in _int_range(args.n):
        if args.k_all:
            for k in _enumerate_thresholds(d, n):
                grid.append((n, k))
        else:
            grid.append((n, _int_list(args.k)))
    reports = []
    for idx, (n, k) in enumerate(grid):
        inst = build_instance(n, p, k)
        mc = base_mc
        if mc is not None:
            mc = QuadratureSpec(mode="monte-carlo", replications=mc.replications,
                                seed=mc.seed + idx)
        reports.append(compare_routes(inst, spec, mc_spec=mc, tolerance=args.tolerance))
    if not reports:
        raise UsageError("sweep grid is empty")
    _write(args, emit_reports(reports, args.format))
    return 0


def _enumerate_thresholds(d, n, prefix=()):
    """All k with every k_i >= 1 and kappa_d <= n, in lexicographic order."""
    used = sum(prefix)
    if len(prefix) == d:
        yield list(prefix)
        return
    remaining_axes = d - len(prefix) - 1
    for v in range(1, n - used - remaining_axes + 1):
        yield from _enumerate_thresholds(d, n, prefix + (v,))


def _run_check(args):
    if args.tol <= 0.0 or args.identity_tol <= 0.0:
        raise UsageError("tolerances must be positive")
    results = run_check_suite(
        seed=args.seed, route_tol=args.tol, identity_tol=args.identity_tol
    )
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        line = f"[{status}] {res.name:<26} residual={res.residual:.3e} tol={res.tolerance:.1e}"
        if res.detail:
            line += f"  ({res.detail})"
        print(line)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 3 if failed else 0


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "eval":
            if args.routes is None:
                routes = list(DETERMINISTIC_ROUTES)
                if args.mc_reps is not None:
                    routes.append("mc")
            else:
                routes = [tok.strip() for tok in args.routes.split(",") if tok.strip()]
            unknown = set(routes) - set(DETERMINISTIC_ROUTES + ("mc",))
            if unknown:
                raise UsageError(f"unknown routes: {sorted(unknown)}")
            return _run_eval(args, routes)
        if args.command == "compare":
            return _run_eval(args, None)
        if args.command == "sweep":
            return _run_sweep(args)
        if args.command == "check":
            return _run_check(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
