"""Command-line front end.

Exit codes partition the outcomes: 0 success, 1 validation findings,
2 parse/usage/IO errors, 3 no proof found.
"""

from __future__ import annotations

import argparse
import json
import sys

from .assertions import (
    AssertionParseError,
    NotFlat,
    assertion_to_json,
    atom_key,
    atoms_of,
    parse_assertion,
    render_atom,
    render_assertion,
)
from .grammar import CategoryIndex
from .lanfile import ParseError, parse_document, render_language
from .prover import (
    FailureReport,
    ProverConfig,
    failure_to_json,
    prove,
    render_tree,
    saturate,
    tree_to_json_text,
)
from .syntax import validate_language

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_NO_PROOF = 3


class _CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_source(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _CliFailure(EXIT_PARSE, f"cannot read {path}: {exc.strerror}")


def _load_language(path: str):
    try:
        return parse_document(_read_source(path))
    except ParseError as exc:
        raise _CliFailure(EXIT_PARSE, f"{path}: {exc}")


def _validated_language(path: str):
    lang = _load_language(path)
    report = validate_language(lang)
    if not report.ok:
        raise _CliFailure(EXIT_VALIDATION,
                          "\n".join(str(f) for f in report))
    return lang


def _parse_cli_assertion(text: str, what: str):
    try:
        return parse_assertion(text)
    except AssertionParseError as exc:
        raise _CliFailure(EXIT_PARSE, f"cannot parse {what}: {exc}")


def _config(args, lang) -> ProverConfig:
    override = None
    if args.ineffectual is not None:
        names = [n for n in args.ineffectual.split(",") if n]
        idx = CategoryIndex(lang)
        unknown = sorted(n for n in names if n not in idx.by_metavar)
        if unknown:
            raise _CliFailure(
                EXIT_VALIDATION,
                "\n".join(f"unknown-metavariable: ineffectual name {n} is not "
                          f"a declared metavariable" for n in unknown))
        override = frozenset(names)
    return ProverConfig(max_passes=args.max_passes,
                        ineffectual_override=override)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def cmd_check(args) -> int:
    lang = _load_language(args.lang_path)
    report = validate_language(lang)
    if args.format == "json":
        payload = {"findings": [{"code": f.code, "message": f.message}
                                for f in report]}
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for finding in report:
            print(finding)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_derive(args) -> int:
    lang = _validated_language(args.lang_path)
    cfg = _config(args, lang)
    pre = _parse_cli_assertion(args.pre, "--pre")
    final, _ = saturate(lang, pre, cfg)
    if args.format == "json":
        print(json.dumps({"atoms": assertion_to_json(final)},
                         sort_keys=True, indent=2))
    else:
        for negated, atom in sorted(atoms_of(final),
                                    key=lambda sa: (atom_key(sa[1]), sa[0])):
            print(("~" if negated else "") + render_atom(atom))
    return EXIT_OK


def cmd_prove(args) -> int:
    lang = _validated_language(args.lang_path)
    cfg = _config(args, lang)
    pre = _parse_cli_assertion(args.pre, "--pre")
    goal = _parse_cli_assertion(args.goal, "--goal")
    result = prove(lang, pre, goal, cfg)
    if isinstance(result, FailureReport):
        if args.format == "json":
            print(json.dumps(failure_to_json(result), sort_keys=True, indent=2))
        else:
            print(f"no proof found for: {render_assertion(goal)}")
            print("missing:")
            for negated, atom in result.missing:
                print("  " + ("~" if negated else "") + render_atom(atom))
            if result.nearest_misses:
                print("nearest misses:")
                for at, reason in result.nearest_misses:
                    print(f"  {at}: {reason}")
        return EXIT_NO_PROOF
    if args.format == "json":
        print(tree_to_json_text(result))
    else:
        sys.stdout.write(render_tree(result))
    return EXIT_OK


def cmd_render(args) -> int:
    lang = _validated_language(args.lang_path)
    sys.stdout.write(render_language(lang))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lanprove",
        description="Analyze .lan language definitions: validate them, "
                    "derive assertions, and emit checkable proof derivations.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="validate a definition")
    check.add_argument("lang_path")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.set_defaults(handler=cmd_check)

    def analysis_flags(p):
        p.add_argument("lang_path")
        p.add_argument("--pre", default="true",
                       help="precondition assertion (default: true)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--ineffectual", default=None, metavar="MV,MV,...",
                       help="override the %%ineffectual directive")
        p.add_argument("--max-passes", type=_positive, default=None)

    derive = sub.add_parser("derive", help="list every derivable assertion")
    analysis_flags(derive)
    derive.set_defaults(handler=cmd_derive)

    prove_p = sub.add_parser("prove", help="prove {pre} L {goal}")
    analysis_flags(prove_p)
    prove_p.add_argument("--goal", required=True,
                         help="postcondition assertion to prove")
    prove_p.set_defaults(handler=cmd_prove)

    render = sub.add_parser("render", help="reprint a definition canonically")
    render.add_argument("lang_path")
    render.set_defaults(handler=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE
    try:
        return args.handler(args)
    except NotFlat as exc:
        print(f"assertions must be flat conjunctions of possibly negated "
              f"atoms: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _CliFailure as failure:
        print(failure, file=sys.stderr)
        return failure.code


if __name__ == "__main__":
    sys.exit(main())
