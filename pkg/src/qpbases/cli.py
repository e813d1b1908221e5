"""qpbases command line: root data, monomial censuses, character series and
verification suites.

Exit codes: 0 success (all rows verified), 1 mismatch or abort, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import characters as ch
from .forms import FormNotPositiveDefinite
from .lie_data import AlgebraSpec, InvalidAlgebra, build_root_system
from .qp_enum import WeightError, WeightSpec, enumerate_census, census_to_series
from .series import SeriesError, format_series
from .verify import (ManifestError, load_manifest, parse_row, reports_json, run_suite,
                     suite_exit_code)

THREADS_ENV = "QPBASES_THREADS"
FORMULA_NAMES = {"L-sum": "L_sum", "N-sum": "N_sum", "rect-sum": "rect_sum",
                 "product": "product", "pbw": "pbw", "census": "census"}
CENSUS_MODES = ("verma", "standard", "rectangular", "alt_e")


class UsageError(Exception):
    pass


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _mode(text: str) -> str:
    return text.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of default flag values; flags override it")
    common.add_argument("--family", help="A, B, C, D, E, F or G")
    common.add_argument("--rank", type=int)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", help="write here instead of stdout")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker budget (default from ${THREADS_ENV}, else 1)")

    weight = argparse.ArgumentParser(add_help=False)
    weight.add_argument("--level", type=int, help="level k (standard / alt_e)")
    weight.add_argument("--k0", type=int)
    weight.add_argument("--j", type=int)
    weight.add_argument("--kj", type=int)
    weight.add_argument("--max-q", type=int, dest="max_q", help="truncation degree M")

    parser = argparse.ArgumentParser(prog="qpbases", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("roots", parents=[common], help="positive roots and Cartan data")

    p = sub.add_parser("census", parents=[common, weight], help="count admissible monomials")
    p.add_argument("--mode", type=_mode, choices=CENSUS_MODES, default="standard")
    p.add_argument("--list", action="store_true", help="also list the monomials")
    p.add_argument("--list-guard", type=int, default=2000, dest="list_guard")
    p.add_argument("--force-list", action="store_true", dest="force_list")

    p = sub.add_parser("char", parents=[common, weight], help="character series")
    p.add_argument("--formula", choices=sorted(FORMULA_NAMES), required=False)
    p.add_argument("--mode", type=_mode, choices=CENSUS_MODES, default="standard",
                   help="weight for --formula census")

    p = sub.add_parser("verify", parents=[common, weight], help="run cross-checks")
    p.add_argument("--manifest", help="JSON array of rows")
    p.add_argument("--mode", type=_mode, choices=("identity",) + CENSUS_MODES)
    p.add_argument("--fault", choices=("drop_root",))
    p.add_argument("--timing", action="store_true", help="include timings in the report")
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        unknown = sorted(set(cfg) - set(vars(args)))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        # re-parse so explicit flags win over the file
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def _algebra(args):
    if args.family is None or args.rank is None:
        raise UsageError("--family and --rank are required")
    try:
        return build_root_system(AlgebraSpec(str(args.family).upper(), args.rank))
    except InvalidAlgebra as e:
        raise UsageError(str(e)) from None


def _max_q(args) -> int:
    if args.max_q is None:
        raise UsageError("--max-q is required")
    if args.max_q < 0:
        raise UsageError("--max-q must be nonnegative")
    return args.max_q


def _weight(args, mode: str) -> WeightSpec:
    try:
        if mode == "verma":
            return WeightSpec.verma()
        if mode == "rectangular":
            return WeightSpec.rectangular(args.k0, args.j, args.kj)
        return WeightSpec(mode, k=args.level)
    except WeightError as e:
        raise UsageError(str(e)) from None


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _series_out(args, doc: dict, series) -> str:
    if args.format == "json":
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if args.format == "csv":
        header = ["q"] + [f"y{i}" for i in range(1, series.rank + 1)] + ["coefficient"]
        return _csv([header] + [[q, *y, c] for (q, y), c in series.terms()])
    return format_series(series, max_terms=10 ** 9) + "\n"


def cmd_roots(args) -> int:
    rs = _algebra(args)
    if args.format == "json":
        _emit(args, rs.to_json(indent=2) + "\n")
    elif args.format == "csv":
        l = rs.rank
        rows = [["height"] + [f"a{i}" for i in range(1, l + 1)]]
        rows += [[sum(a), *a] for a in rs.roots_by_height()]
        _emit(args, _csv(rows))
    else:
        lines = [f"{rs.spec.name}: {len(rs.positive_roots)} positive roots",
                 f"highest root {list(rs.highest_root)}",
                 f"nu {list(rs.nu)}",
                 f"level-one nodes {list(rs.level_one_nodes)}"]
        lines += [" ".join(str(x) for x in a) for a in rs.roots_by_height()]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_census(args) -> int:
    rs = _algebra(args)
    M = _max_q(args)
    spec = _weight(args, args.mode)
    try:
        spec.validate(rs)
    except WeightError as e:
        raise UsageError(str(e)) from None
    census = enumerate_census(rs, spec, M, list_guard=args.list_guard, force_list=args.force_list,
                              listing=args.list)
    if args.format == "json":
        d = census.to_dict()
        if "listing_suppressed" in census.checks:
            d["listing_suppressed"] = census.checks["listing_suppressed"]
        text = json.dumps(d, sort_keys=True, separators=(",", ":")) + "\n"
    elif args.format == "csv":
        header = ["q"] + [f"n{i}" for i in range(1, rs.rank + 1)] + ["count"]
        text = _csv([header] + [[q, *ct, c] for (q, ct), c in sorted(census.entries.items())])
    else:
        lines = [f"{rs.spec.name} {spec.to_dict()} M={M}: {census.total()} monomials"]
        for (q, ct), c in sorted(census.entries.items()):
            lines.append(f"q^{q} color-type {list(ct)}: {c}")
        for m in census.monomials or []:
            lines.append(" ".join(f"x[{i},{n}]({-e})" for i, n, e in m.triples()) or "1")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return 1 if census.checks.get("min_energy_failures") else 0


def cmd_char(args) -> int:
    if args.formula is None:
        raise UsageError("--formula is required")
    rs = _algebra(args)
    M = _max_q(args)
    formula = FORMULA_NAMES[args.formula]
    try:
        if formula == "L_sum":
            if args.level is None:
                raise UsageError("L-sum needs --level")
            series = ch.char_L_sum(rs, args.level, M)
            params = {"k": args.level}
        elif formula == "N_sum":
            series, params = ch.char_N_sum(rs, M), {}
        elif formula == "rect_sum":
            series = ch.char_rect_sum(rs, args.k0, args.j, args.kj, M)
            params = {"k0": args.k0, "j": args.j, "kj": args.kj}
        elif formula == "product":
            series, params = ch.char_product(rs, M), {}
        elif formula == "pbw":
            series, params = ch.pbw_census(rs, M), {}
        else:
            spec = _weight(args, args.mode)
            spec.validate(rs)
            series, params = census_to_series(enumerate_census(rs, spec, M)), spec.to_dict()
    except (ch.CharacterError, WeightError) as e:
        raise UsageError(str(e)) from None
    params["M"] = M
    _emit(args, _series_out(args, ch.series_document(formula, rs, params, series), series))
    return 0


def _inline_row(args) -> dict:
    if args.mode is None:
        raise UsageError("give --manifest or an inline row with --mode")
    row = {"family": args.family, "rank": args.rank, "mode": args.mode, "M": _max_q(args)}
    if args.family is None or args.rank is None:
        raise UsageError("--family and --rank are required")
    if args.mode in ("standard", "alt_e"):
        row["k"] = args.level
    elif args.mode == "rectangular":
        row.update(k0=args.k0, j=args.j, kj=args.kj)
    if args.fault:
        if args.mode != "identity":
            raise UsageError("--fault applies to identity rows only")
        row["fault"] = args.fault
    return row


def cmd_verify(args) -> int:
    try:
        if args.manifest:
            rows = load_manifest(args.manifest)
        else:
            rows = [parse_row(_inline_row(args))]
    except ManifestError as e:
        raise UsageError(str(e)) from None
    reports = run_suite(rows, threads=args.threads)
    if args.format == "json":
        text = reports_json(reports, with_timing=args.timing)
    elif args.format == "csv":
        out = [["task", "spec", "M", "status", "first_mismatch"]]
        for r in reports:
            fm = "" if r.first_mismatch is None else json.dumps(r.first_mismatch, sort_keys=True)
            out.append([r.task, r.spec, r.M, r.status, fm])
        text = _csv(out)
    else:
        lines = []
        for r in reports:
            line = f"{r.status.upper():9s} {r.task}"
            if r.first_mismatch:
                fm = r.first_mismatch
                line += (f"  ({fm['comparison']} at q^{fm['q']} y^{fm['y']}: "
                         f"{fm['lhs']} vs {fm['rhs']})")
            if r.error:
                line += f"  [{r.error}]"
            if args.timing and r.timing:
                line += f"  {sum(r.timing.values()):.2f}s"
            lines.append(line)
        text = "\n".join(lines) + ("\n" if lines else "")
    _emit(args, text)
    return suite_exit_code(reports)


COMMANDS = {"roots": cmd_roots, "census": cmd_census, "char": cmd_char, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors with status 2
        return int(e.code or 0)
    except UsageError as e:
        print(f"qpbases: error: {e}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SeriesError, InvalidAlgebra, WeightError) as e:
        print(f"qpbases: error: {e}", file=sys.stderr)
        return 2
    except FormNotPositiveDefinite as e:
        print(f"qpbases: aborted: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
