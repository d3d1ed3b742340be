"""Command-line front end.

Commands and exit codes::

    qvl verify --requirements F.psa --design F.asm --ontology F.kb...
               [--root QNAME] [--format text|machine] [--explain]
        0 all obligations satisfied, 1 any violated, 2 errors
    qvl materialize --ontology F.kb... [--abox F.asm]
        prints the fact store, canonically sorted
    qvl explain --ontology F.kb... --abox F.asm --fact "<atom>"
        0 proof printed, 1 fact not derived, 2 errors
    qvl trace --project F.proj --fragment DOC#ID (--up|--down)
    qvl check FILE...
        parse-only lint; 0 all parse, 2 any failure

Results go to standard output, diagnostics to standard error.  A ``.kb``
file's default namespace is its file stem; identical invocations on
identical files produce byte-identical output.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .cad import assembly_to_abox, parse_assembly
from .errors import QvlError
from .kbtext import namespace_for_path, parse_ground_atom, parse_kb
from .model import KnowledgeBase, Name, check_rule_safety, merge_modules
from .project import parse_project, trace
from .psa import lint_annotations, parse_annotations, requirements_of
from .reasoner import entails, explain, materialize
from .verifier import (
    input_digest,
    prepare_rules,
    render_report,
    render_store,
    run_verification,
)


class _UsageError(QvlError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None


def _load_ontologies(paths: Sequence[str]) -> tuple[list[KnowledgeBase], list[str]]:
    modules: list[KnowledgeBase] = []
    digests: list[str] = []
    for path in paths:
        text = _read(path)
        digests.append(input_digest(path, text))
        modules.extend(parse_kb(text, namespace_for_path(path), file=path))
    if not modules:
        raise _UsageError("no spec blocks found in the ontology files")
    return modules, digests


def _resolve_root(spec: Optional[str], modules: Sequence[KnowledgeBase]) -> Optional[Name]:
    if spec is None:
        return None
    if ":" in spec:
        ns, local = spec.split(":", 1)
        return Name(ns, local)
    matches = [kb.name for kb in modules if kb.name.local == spec]
    if not matches:
        raise _UsageError(f"--root {spec} does not name a loaded spec")
    if len(matches) > 1:
        names = ", ".join(str(n) for n in matches)
        raise _UsageError(f"--root {spec} is ambiguous ({names}); qualify it")
    return matches[0]


def _background(args) -> tuple[KnowledgeBase, list[str]]:
    modules, digests = _load_ontologies(args.ontology)
    root = _resolve_root(getattr(args, "root", None), modules)
    return merge_modules(modules, root), digests


def _cmd_verify(args) -> int:
    background, digests = _background(args)
    design_text = _read(args.design)
    digests.append(input_digest(args.design, design_text))
    abox = assembly_to_abox(parse_assembly(design_text, file=args.design))
    req_text = _read(args.requirements)
    digests.append(input_digest(args.requirements, req_text))
    doc = parse_annotations(req_text, file=args.requirements)
    for warning in lint_annotations(doc):
        print(f"warning: {warning}", file=sys.stderr)
    run = run_verification(requirements_of(doc), abox, background, inputs=digests)
    sys.stdout.write(render_report(run.report, args.format,
                                   include_proofs=args.explain))
    return 0 if run.report.all_satisfied else 1


def _cmd_materialize(args) -> int:
    background, _ = _background(args)
    facts = list(background.assertions)
    if args.abox:
        facts = list(assembly_to_abox(parse_assembly(_read(args.abox), file=args.abox))) + facts
    store = materialize(prepare_rules(background), facts)
    sys.stdout.write(render_store(store))
    return 0


def _cmd_explain(args) -> int:
    background, _ = _background(args)
    abox = assembly_to_abox(parse_assembly(_read(args.abox), file=args.abox))
    store = materialize(prepare_rules(background), list(abox) + list(background.assertions))
    goal = parse_ground_atom(args.fact)
    if not entails(store, goal):
        print(f"not derived: {goal}")
        return 1
    print(explain(store, goal).render())
    return 0


def _cmd_trace(args) -> int:
    graph = parse_project(_read(args.project),
                          namespace_for_path(args.project), file=args.project)
    direction = "up" if args.up else "down"
    for fragment in trace(graph, args.fragment, direction):
        print(fragment)
    return 0


def _check_one(path: str) -> list[str]:
    """Parse a single file by extension; returns warnings."""
    text = _read(path)
    suffix = Path(path).suffix
    if suffix == ".kb":
        for kb in parse_kb(text, namespace_for_path(path), file=path):
            for rule in kb.rules:
                check_rule_safety(rule)
        return []
    if suffix == ".asm":
        parse_assembly(text, file=path)
        return []
    if suffix == ".psa":
        return lint_annotations(parse_annotations(text, file=path))
    if suffix == ".proj":
        parse_project(text, namespace_for_path(path), file=path)
        return []
    raise _UsageError(f"{path}: unknown file type {suffix!r} "
                      "(expected .kb, .asm, .psa or .proj)")


def _cmd_check(args) -> int:
    failed = False
    for path in args.files:
        try:
            warnings = _check_one(path)
        except QvlError as exc:
            failed = True
            print(f"error: {exc}", file=sys.stderr)
            continue
        for warning in warnings:
            print(f"warning: {path}: {warning}", file=sys.stderr)
        print(f"OK {path}")
    return 2 if failed else 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qvl",
        description="Verify qualitative CAD design requirements against an "
                    "annotated principle solution.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="check every requirement against a design")
    verify.add_argument("--requirements", required=True, metavar="FILE.psa")
    verify.add_argument("--design", required=True, metavar="FILE.asm")
    verify.add_argument("--ontology", required=True, nargs="+", metavar="FILE.kb")
    verify.add_argument("--root", metavar="QNAME",
                        help="merge root; default: union of all listed specs")
    verify.add_argument("--format", choices=["text", "machine"], default="text")
    verify.add_argument("--explain", action="store_true",
                        help="include proof trees for satisfied obligations")
    verify.set_defaults(func=_cmd_verify)

    mat = sub.add_parser("materialize", help="print the materialized fact store")
    mat.add_argument("--ontology", required=True, nargs="+", metavar="FILE.kb")
    mat.add_argument("--abox", metavar="FILE.asm")
    mat.add_argument("--root", metavar="QNAME")
    mat.set_defaults(func=_cmd_materialize)

    expl = sub.add_parser("explain", help="print the proof tree of one fact")
    expl.add_argument("--ontology", required=True, nargs="+", metavar="FILE.kb")
    expl.add_argument("--abox", required=True, metavar="FILE.asm")
    expl.add_argument("--fact", required=True, metavar="ATOM")
    expl.add_argument("--root", metavar="QNAME")
    expl.set_defaults(func=_cmd_explain)

    tr = sub.add_parser("trace", help="walk the refinement relation")
    tr.add_argument("--project", required=True, metavar="FILE.proj")
    tr.add_argument("--fragment", required=True, metavar="DOC#ID")
    group = tr.add_mutually_exclusive_group(required=True)
    group.add_argument("--up", action="store_true")
    group.add_argument("--down", action="store_true")
    tr.set_defaults(func=_cmd_trace)

    check = sub.add_parser("check", help="parse-only lint of input files")
    check.add_argument("files", nargs="+", metavar="FILE")
    check.set_defaults(func=_cmd_check)
    return parser


def run(argv: Sequence[str]) -> int:
    try:
        args = _parser().parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except QvlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
