"""Command-line front end.

Exit status is 0 on success, 1 when a computation fails and 2 for invalid
arguments.  Output is JSON (default) or CSV with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import tolerances as tol
from .critical import critical_points
from .errors import DegenerateModelError, DomainError, ModelError, UnsupportedCaseError
from .finite import check_lemma1_range, convergence_study, smallest_lemma1_constant
from .model import ModelParams, ReducedParams
from .thermo import LN2, field_selection, limit_pressure

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- argument handling ----------------------------------------------------------


def _add_model_flags(sp: argparse.ArgumentParser, with_field: bool = True) -> None:
    g = sp.add_argument_group("model (full form)")
    for name in ("j11", "j12", "j22"):
        g.add_argument(f"--{name}", type=float)
    if with_field:
        g.add_argument("--h1", type=float, default=0.0)
        g.add_argument("--h2", type=float, default=0.0)
    g.add_argument("--alpha", type=float, default=0.5, help="fraction of spins in population 1")
    g.add_argument("--beta", type=float)
    r = sp.add_argument_group("model (reduced symmetric form)")
    r.add_argument("--a", type=float, help="J11 / |lambda_M|; defaults to 1 - |b|")
    r.add_argument("--b", type=float, help="J12 / |lambda_M|")
    r.add_argument("--t", type=float, help="2 / (beta |lambda_M|)")


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--output", default=None, help="output file (default stdout)")
    sp.add_argument("--threads", type=int, default=None, help="worker threads (default all cores)")
    sp.add_argument("--seed-grid", type=int, default=tol.SEED_GRID, help="seed grid size of the generic finder")


def _reduced(args) -> ReducedParams:
    if args.b is None or args.t is None:
        raise UsageError("the reduced form needs both --b and --t")
    a = 1.0 - abs(args.b) if args.a is None else args.a
    return ReducedParams.from_abt(a, args.b, args.t)


def _params(args, h1: float = 0.0, h2: float = 0.0) -> ModelParams:
    reduced = any(getattr(args, k) is not None for k in ("a", "b", "t"))
    full = any(getattr(args, k) is not None for k in ("j11", "j12", "j22", "beta"))
    if reduced and full:
        raise UsageError("use either --j11/--j12/--j22/--beta or --a/--b/--t, not both")
    if reduced:
        if args.alpha != 0.5:
            raise UsageError("the reduced form fixes --alpha 0.5")
        return _reduced(args).to_model_params(h1, h2)
    missing = [k for k in ("j11", "j12", "j22", "beta") if getattr(args, k) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + k for k in missing))
    return ModelParams(args.j11, args.j12, args.j22, h1, h2, args.alpha, args.beta)


def parse_range(text: str) -> np.ndarray:
    """``lo:hi:count`` with inclusive ends; ``count = 1`` gives ``[lo]``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}: {exc}") from None
    if count < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise argparse.ArgumentTypeError(f"bad range {text!r}: need finite ends and count >= 1")
    return np.array([lo]) if count == 1 else np.linspace(lo, hi, count)


def parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}: {exc}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


# --- output ---------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# --- commands -------------------------------------------------------------------


def cmd_pressure(args) -> str:
    res = limit_pressure(_params(args, args.h1, args.h2), args.seed_grid)
    if args.format == "json":
        return _json(res.to_dict())
    rows = [[res.pressure, res.f_max, res.degenerate_ground_state, m.mu1, m.mu2] for m in res.argmax]
    return _csv(["pressure", "f_max", "degenerate_ground_state", "mu1", "mu2"], rows)


def cmd_critical_points(args) -> str:
    label, points = critical_points(_params(args, args.h1, args.h2), args.seed_grid)
    label = None if label is None else str(label)
    records = [dict(case_label=label, **c.to_dict()) for c in points]
    if args.format == "json":
        return _json(records)
    header = list(records[0]) if records else ["case_label"]
    return _csv(header, [[rec[k] for k in header] for rec in records])


def _phase_cell(t: float, b: float, a: float | None, seed_grid: int) -> list:
    # invalid (a, b, t) is a usage error and propagates
    p = ReducedParams.from_abt(1.0 - abs(b) if a is None else a, b, t).to_model_params()
    try:
        label, points = critical_points(p, seed_grid)
    except ModelError:
        # a cell outside every analysed case stays in the table, marked n/a
        return [t, b, "n/a", 0, 0, math.nan]
    n_max = sum(c.kind.is_maximum for c in points)
    return [t, b, None if label is None else str(label), len(points), n_max, LN2 + max(c.f_value for c in points)]


def cmd_phase_diagram(args) -> str:
    if args.j11 is not None or args.beta is not None:
        raise UsageError("phase-diagram takes the reduced form only (--a, --b-range, --t-range)")
    cells = [(float(t), float(b)) for t in args.t_range for b in args.b_range]
    with ThreadPoolExecutor(max_workers=args.threads or os.cpu_count() or 1) as pool:
        rows = list(pool.map(lambda c: _phase_cell(c[0], c[1], args.a, args.seed_grid), cells))
    header = ["t", "b", "case_label", "n_critical", "n_maxima", "pressure"]
    if args.format == "json":
        return _json([dict(zip(header, [None if isinstance(v, float) and math.isnan(v) else v for v in row]))
                      for row in rows])
    return _csv(header, rows)


def cmd_finite_n(args) -> str:
    p = _params(args, args.h1, args.h2)
    C = smallest_lemma1_constant(args.bound_max) if args.C is None else args.C
    bounds = check_lemma1_range(args.bound_max, C)
    rows = convergence_study(p, args.sizes, C=C, threads=args.threads)
    header = ["N", "n1", "n2", "p_N", "p_limit", "residual", "envelope"]
    table = [[r.n, r.n1, r.n2, r.p_n, r.p_limit, r.residual, r.envelope] for r in rows]
    if args.format == "csv":
        return _csv(header, table)
    return _json({
        "C": C,
        "multiplicity_bounds": {
            "n_max": bounds.n_max,
            "upper_slack": bounds.upper_slack,
            "lower_slack": bounds.lower_slack,
            "upper_violations": bounds.upper_violations,
            "lower_violations": bounds.lower_violations,
        },
        "rows": [dict(zip(header, row)) for row in table],
    })


def cmd_field_selection(args) -> str:
    if args.h1 == 0.0 and args.h2 == 0.0:
        raise UsageError("field-selection needs a nonzero --h1/--h2 direction")
    eps = max(abs(args.h1), abs(args.h2)) if args.epsilon is None else args.epsilon
    rep = field_selection(_params(args), (args.h1, args.h2), eps, args.seed_grid)
    if args.format == "json":
        return _json(rep.to_dict())
    sel = rep.selected
    mu = ["", ""] if isinstance(sel, str) else [sel.mu1, sel.mu2]
    return _csv(
        ["h1", "h2", "selected", "mu1", "mu2", "dot_product", "gap", "stable_under_halving"],
        [[rep.field[0], rep.field[1], "tie" if isinstance(sel, str) else "unique", *mu,
          rep.dot_product, rep.gap, rep.stable_under_halving]],
    )


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bipartite-mf", description="Bipartite mean-field spin model.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pressure", help="limit pressure ln 2 + max f")
    _add_model_flags(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_pressure)

    sp = sub.add_parser("critical-points", help="critical points of f with classification")
    _add_model_flags(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_critical_points)

    sp = sub.add_parser("phase-diagram", help="case map over a (t, b) grid, CSV by default")
    _add_model_flags(sp, with_field=False)
    _add_common(sp)
    sp.add_argument("--b-range", type=parse_range, required=True, metavar="LO:HI:N")
    sp.add_argument("--t-range", type=parse_range, required=True, metavar="LO:HI:N")
    sp.set_defaults(func=cmd_phase_diagram, format="csv")

    sp = sub.add_parser("finite-n", help="exact finite-N pressure against the limit")
    _add_model_flags(sp)
    _add_common(sp)
    sp.add_argument("--sizes", type=parse_sizes, required=True, help="comma-separated N values")
    sp.add_argument("--C", type=float, default=None, help="multiplicity-bound constant (default: smallest valid integer)")
    sp.add_argument("--bound-max", type=int, default=1000, help="largest n in the multiplicity-bound check")
    sp.set_defaults(func=cmd_finite_n)

    sp = sub.add_parser("field-selection", help="ground state picked by a small field")
    _add_model_flags(sp)
    _add_common(sp)
    sp.add_argument("--epsilon", type=float, default=None,
                    help="field scale max(|h1|, |h2|); default is the given field's own scale")
    sp.set_defaults(func=cmd_field_selection)
    return parser


def _looks_negative(token: str) -> bool:
    if not token.startswith("-"):
        return False
    try:
        float(token.split(":")[0].split(",")[0])
    except ValueError:
        return False
    return True


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Join ``--flag -1e-4`` into ``--flag=-1e-4``.

    argparse only recognises plain negative decimals as values, so exponents
    and ``lo:hi:n`` ranges with a negative start would be read as flags.
    """
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i].startswith("--") and "=" not in argv[i] and i + 1 < len(argv) and _looks_negative(argv[i + 1]):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is not None and args.threads < 1:
        parser.print_usage(sys.stderr)
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    if args.seed_grid < 1:
        print("error: --seed-grid must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        text = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE if _is_input_error(exc) else EXIT_NUMERIC
    except (RuntimeError, ArithmeticError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _is_input_error(exc: ModelError) -> bool:
    """Parameter validation failures are usage errors; the rest are numeric."""
    return isinstance(exc, (DomainError, UnsupportedCaseError, DegenerateModelError))


if __name__ == "__main__":
    sys.exit(main())
