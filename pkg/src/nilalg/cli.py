"""Command-line front end: ``nilalg <subcommand> ...``.

Exit codes: 0 success (``iso``: isomorphic), 1 claim failure (``iso``:
distinct), 2 inconclusive ``iso``, 64 usage error, 65 malformed input
document, 70 search or scan budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import families as fam
from .algebra import associativity_defect, centers, classify_profile, is_associative, power_series
from .census import run_census
from .documents import dumps, load_table, table_to_document, write_atomic
from .errors import (BudgetExceeded, DimensionMismatch, InvalidDimension, InvalidParameter,
                     MalformedDocument, NilAlgError)
from .field import FieldSpec, Matrix
from .grading import associated_graded, is_naturally_graded
from .iso import IsoResult, invariants, iso_search, verify_witness
from .spectral import char_sequence
from .verify import SUITES, run_suites

EX_USAGE = 64
EX_DATAERR = 65
EX_SOFTWARE = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _matrix_strings(m) -> list[list[str]]:
    F = m.field
    return [[F.format_scalar(x) for x in row] for row in m.entries]


def _emit(args, report: dict, summary: str) -> None:
    print(summary)
    if getattr(args, "out", None):
        write_atomic(args.out, dumps(report))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _parse_beta(text: str | None, F: FieldSpec):
    if text is None:
        return None
    return [[F.parse_scalar(x) for x in row.split(",")] for row in text.split(";")]


def cmd_build(args) -> int:
    F = args.field
    alpha = F.parse_scalar(args.alpha) if args.alpha is not None else None
    fid = fam.FamilyId.parse(args.family, n=args.dim, p=args.p, alpha=alpha,
                             beta=_parse_beta(args.beta, F))
    table = fid.build(F)
    text = dumps(table_to_document(table))
    if args.out:
        write_atomic(args.out, text)
        print(f"{fid.name} over {F.name}: dim {table.n}, written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args) -> int:
    t = load_table(args.table)
    assoc = is_associative(t)
    ps = power_series(t)
    nil = len(ps) if ps.nilpotent else None
    report = {"associative": assoc, "nilpotent": ps.nilpotent, "nilindex": nil,
              "associativity_defects": [list(d) for d in associativity_defect(t)]}
    nil_text = str(nil) if nil is not None else "not nilpotent"
    _emit(args, report, f"associative: {str(assoc).lower()}; nilindex: {nil_text}")
    return 0


def cmd_profile(args) -> int:
    t = load_table(args.table)
    prof = classify_profile(t)
    zl, zr, z = centers(t)
    report = {"dims": list(prof.dims), "nilindex": prof.nilindex, "classification": prof.label,
              "center_dims": [zl.dim, zr.dim, z.dim]}
    _emit(args, report, f"dims: {list(prof.dims)}; nilindex: {prof.nilindex}; profile: {prof.label}")
    return 0


def cmd_charseq(args) -> int:
    t = load_table(args.table)
    res = char_sequence(t, args.strategy, count=args.count, seed=args.seed)
    F = t.field
    report = {"char_seq": list(res.sequence), "strategy": res.strategy,
              "witness": [F.format_scalar(x) for x in res.witness]}
    bound = "" if res.strategy == "exhaustive" else " (lower bound)"
    _emit(args, report, f"char_seq: {tuple(res.sequence)}{bound}; witness: {report['witness']}")
    return 0


def cmd_grade(args) -> int:
    t = load_table(args.table)
    gr = associated_graded(t)
    verdict = is_naturally_graded(t, method=args.method, max_nodes=args.max_nodes)
    report = {"component_dims": list(gr.component_dims),
              "adapted_basis": _matrix_strings(gr.adapted_basis) if t.n else [],
              "placement": list(gr.placement),
              "induced_table": table_to_document(gr.induced_table),
              "naturally_graded": verdict.answer,
              "separating_invariant": verdict.coordinate,
              "witness": _matrix_strings(verdict.witness) if verdict.witness is not None else None}
    _emit(args, report, f"components: {list(gr.component_dims)}; naturally graded: {verdict.answer}"
          + (f" ({verdict.coordinate})" if verdict.coordinate else ""))
    return 0


def cmd_invariants(args) -> int:
    t = load_table(args.table)
    inv = invariants(t, seed=args.seed)
    report = inv.to_dict()
    _emit(args, report, "; ".join(f"{k}: {v}" for k, v in sorted(report.items())))
    return 0


def cmd_iso(args) -> int:
    a, b = load_table(args.a), load_table(args.b)
    if a.n != b.n or a.field != b.field:
        raise DimensionMismatch("tables differ in dimension or field")
    if args.witness:
        w = load_matrix(args.witness, a.field)
        ok = verify_witness(a, b, w)
        report = {"outcome": "Witness" if ok else "Inconclusive", "field": a.field.name,
                  "witness": _matrix_strings(w) if ok else None, "coordinate": None, "nodes": 0}
        _emit(args, report, "witness verified" if ok else "witness rejected")
        return 0 if ok else 2
    if args.search:
        res = iso_search(a, b, max_nodes=args.max_nodes, workers=args.workers, seed=args.seed)
    else:
        diff = invariants(a, args.seed).difference(invariants(b, args.seed))
        res = IsoResult("ProvedDistinct", coordinate=diff, field=a.field.name) if diff else None
    if res is None:
        report = {"outcome": "Inconclusive", "field": a.field.name, "witness": None,
                  "coordinate": None, "nodes": 0}
        _emit(args, report, "invariants agree; rerun with --search to decide")
        return 2
    report = {"outcome": res.outcome, "field": res.field, "coordinate": res.coordinate,
              "nodes": res.nodes,
              "witness": _matrix_strings(res.witness) if res.witness is not None else None}
    line = {"Witness": f"isomorphic over {res.field}",
            "ProvedDistinct": f"distinct: invariant {res.coordinate} differs",
            "ExhaustedNo": f"not isomorphic over {res.field} (exhaustive search, {res.nodes} nodes)",
            "Inconclusive": f"inconclusive over {res.field} ({res.nodes} probes)"}[res.outcome]
    _emit(args, report, line)
    return {"Witness": 0, "ProvedDistinct": 1, "ExhaustedNo": 1}.get(res.outcome, 2)


def load_matrix(path: str, F: FieldSpec) -> Matrix:
    """Read ``{"matrix": [[scalar-string, ...], ...]}`` (a saved ``iso`` report also works)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: invalid JSON ({exc.msg})") from None
    rows = doc.get("matrix", doc.get("witness")) if isinstance(doc, dict) else None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedDocument("witness file needs a 'matrix' list of rows")
    try:
        return Matrix(F, [[F.parse_scalar(x) for x in r] for r in rows])
    except (ValueError, TypeError, AttributeError, ZeroDivisionError) as exc:
        raise MalformedDocument(f"bad witness matrix: {exc}") from None


def cmd_census(args) -> int:
    report = run_census(args.dim, args.field, classify=args.classify, workers=args.workers)
    if args.out:
        write_atomic(args.out, report.to_json())
    if args.csv:
        if report.classes is None:
            raise UsageError("--csv needs --classify")
        write_atomic(args.csv, report.to_csv())
    classes = f"; classes: {report.iso_class_count}" if report.classes is not None else ""
    print(f"dim {args.dim} over {args.field.name}: scanned {report.total_tables_scanned}; "
          f"associative: {report.associative_count}; nilpotent: {report.nilpotent_count}{classes}")
    for v in report.verdicts:
        print(f"{'PASS' if v.passed else 'FAIL'}  {v.name} ({v.checked} checked)")
    return 0 if all(v.passed for v in report.verdicts) else 1


def cmd_verify(args) -> int:
    names = []
    for s in args.suite or []:
        for part in s.split(","):
            part = part.strip()
            if not part:
                continue
            if part == "all":
                names.extend(SUITES)
            elif part in SUITES:
                names.append(part)
            else:
                raise UsageError(f"unknown suite {part!r}; choose from {', '.join(SUITES)}, all")
    if not names:
        raise UsageError("no suite selected")
    names = list(dict.fromkeys(names))
    claims = run_suites(names, seed=args.seed, workers=args.workers, census_dim=args.dim)
    for c in claims:
        print(f"{'PASS' if c.passed else 'FAIL'}  [{c.suite}] {c.name}  ({c.scale})"
              + (f": {c.detail}" if c.detail else ""))
    failed = sum(not c.passed for c in claims)
    print(f"{len(claims) - failed}/{len(claims)} claims passed")
    if args.out:
        write_atomic(args.out, dumps({"suites": names, "seed": args.seed,
                                      "claims": [c.to_dict() for c in claims],
                                      "passed": failed == 0}))
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled strategies (default 0)")
    common.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    common.add_argument("--out", help="write the machine-readable JSON report here")

    p = _Parser(prog="nilalg", description="Nilpotent associative algebras given by structure constants.")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    b = sub.add_parser("build", parents=[common], help="write the table of a classified family")
    b.add_argument("--family", required=True,
                   help="mu0, mu0split, heis, muprime, mu1_K, lambdaK, piK, mu2_K")
    b.add_argument("--dim", type=int, help="dimension n")
    b.add_argument("--p", type=int, help="number of split generators (mu0split, heis, muprime)")
    b.add_argument("--alpha", help="family parameter as a scalar string")
    b.add_argument("--beta", help="muprime beta matrix, rows separated by ';', entries by ','")
    b.add_argument("--field", type=_field, default=FieldSpec.parse("Q"), help="Q or GF(p)")
    b.set_defaults(func=cmd_build)

    for name, func, helptext in (("check", cmd_check, "associativity and nilindex"),
                                 ("profile", cmd_profile, "dimension profile and centers"),
                                 ("invariants", cmd_invariants, "isomorphism invariants")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("table", help="table document (JSON)")
        c.set_defaults(func=func)

    c = sub.add_parser("charseq", parents=[common], help="characteristic sequence")
    c.add_argument("table")
    c.add_argument("--strategy", choices=("auto", "exhaustive", "sampled"), default="auto")
    c.add_argument("--count", type=int, default=64, help="random samples for the sampled strategy")
    c.set_defaults(func=cmd_charseq)

    g = sub.add_parser("grade", parents=[common], help="associated graded algebra")
    g.add_argument("table")
    g.add_argument("--method", choices=("invariants", "search"), default="invariants")
    g.add_argument("--max-nodes", type=int, default=None)
    g.set_defaults(func=cmd_grade)

    i = sub.add_parser("iso", parents=[common], help="isomorphism test (exit 0 iso, 1 distinct, 2 inconclusive)")
    i.add_argument("a")
    i.add_argument("b")
    mode = i.add_mutually_exclusive_group()
    mode.add_argument("--witness", help="JSON file with a candidate matrix to verify")
    mode.add_argument("--search", action="store_true", help="search for a witness")
    i.add_argument("--max-nodes", type=int, default=None, help="search node budget")
    i.set_defaults(func=cmd_iso)

    cs = sub.add_parser("census", parents=[common], help="exhaustive scan over GF(p)")
    cs.add_argument("--dim", type=int, required=True)
    cs.add_argument("--field", type=_field, required=True, help="gf2, gf3, GF(p)")
    cs.add_argument("--classify", action="store_true", help="group tables into isomorphism classes")
    cs.add_argument("--csv", help="write class representatives as CSV")
    cs.set_defaults(func=cmd_census)

    v = sub.add_parser("verify-paper", parents=[common], help="run the verification suites")
    v.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)}, all (repeatable)")
    v.add_argument("--dim", type=int, default=3, help="largest census dimension over GF(2)")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nilalg: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except FileNotFoundError as exc:
        print(f"nilalg: error: {exc.filename}: no such file", file=sys.stderr)
        return EX_USAGE
    except (InvalidParameter, InvalidDimension, ValueError) as exc:
        print(f"nilalg: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except MalformedDocument as exc:
        print(f"nilalg: malformed input: {exc}", file=sys.stderr)
        return EX_DATAERR
    except BudgetExceeded as exc:
        print(f"nilalg: budget exhausted: {exc}", file=sys.stderr)
        return EX_SOFTWARE
    except NilAlgError as exc:
        print(f"nilalg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
