"""Requirement verification: does the design ABox entail every requirement?

The background ontology (merged modules) is compiled to rules, the design
ABox is materialized, and each requirement atom becomes one obligation:
satisfied obligations carry a proof tree, violated ones a missing-premise
diagnosis.  Reports render byte-identically across runs on equal inputs.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

from .model import Atom, KnowledgeBase, atom_sort_key, check_rule_safety, is_ground
from .reasoner import (
    FactStore,
    HornRule,
    MissingPremiseReport,
    ProofTree,
    compile_axioms,
    diagnose,
    entails,
    explain,
    materialize,
)

REPORT_FORMATS = ("text", "machine")


@dataclass(frozen=True)
class Obligation:
    goal: Atom
    satisfied: bool
    proof: Optional[ProofTree] = None
    diagnosis: Optional[MissingPremiseReport] = None


@dataclass(frozen=True)
class VerificationReport:
    obligations: tuple[Obligation, ...]
    inputs: tuple[str, ...] = ()

    @property
    def satisfied_count(self) -> int:
        return sum(1 for o in self.obligations if o.satisfied)

    @property
    def violated_count(self) -> int:
        return len(self.obligations) - self.satisfied_count

    @property
    def all_satisfied(self) -> bool:
        return self.violated_count == 0


@dataclass(frozen=True)
class VerificationRun:
    """A report together with the store and rules that produced it."""

    report: VerificationReport
    store: FactStore
    rules: tuple[HornRule, ...]


def input_digest(label: str, text: str) -> str:
    return f"{label} sha256={hashlib.sha256(text.encode('utf-8')).hexdigest()}"


def prepare_rules(background: KnowledgeBase) -> tuple[HornRule, ...]:
    """Compile the merged background to rules and check them for safety."""
    rules = compile_axioms(background)
    for rule in rules:
        check_rule_safety(rule)
    return rules


def verify_view(requirements: Sequence[Atom], design_abox: Sequence[Atom],
                background: KnowledgeBase,
                inputs: Sequence[str] = ()) -> VerificationReport:
    """Check that the design entails every requirement atom.

    The store is the materialization of the background's compiled rules over
    the design ABox plus the background's own assertions.
    """
    return run_verification(requirements, design_abox, background, inputs).report


def run_verification(requirements: Sequence[Atom], design_abox: Sequence[Atom],
                     background: KnowledgeBase,
                     inputs: Sequence[str] = ()) -> VerificationRun:
    for atom in requirements:
        if not is_ground(atom):
            raise ValueError(f"requirements must be ground: {atom}")
    rules = prepare_rules(background)
    facts = tuple(design_abox) + tuple(background.assertions)
    store = materialize(rules, facts)
    obligations = []
    for goal in requirements:
        if entails(store, goal):
            obligations.append(Obligation(goal, True, proof=explain(store, goal)))
        else:
            obligations.append(Obligation(goal, False,
                                          diagnosis=diagnose(rules, store, goal)))
    report = VerificationReport(tuple(obligations), tuple(inputs))
    return VerificationRun(report, store, rules)


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------

def _render_candidate(candidate, lines: list[str]) -> None:
    total = len(candidate.satisfied) + len(candidate.missing)
    lines.append(f"  candidate rule {candidate.rule_id} "
                 f"({len(candidate.satisfied)} of {total} body atoms satisfied)")
    if candidate.substitution:
        binding = ", ".join(f"?{var} = {term}" for var, term in candidate.substitution)
        lines.append(f"    where {binding}")
    missing = ", ".join(str(a) for a in candidate.missing)
    lines.append(f"    missing: {missing}")


def _render_text(report: VerificationReport, include_proofs: bool) -> str:
    lines: list[str] = []
    if report.inputs:
        lines.append("inputs:")
        for item in report.inputs:
            lines.append(f"  {item}")
    for obligation in report.obligations:
        verdict = "SATISFIED" if obligation.satisfied else "VIOLATED"
        lines.append(f"{verdict} {obligation.goal}")
        if obligation.satisfied and include_proofs and obligation.proof is not None:
            lines.append(obligation.proof.render("  "))
        if not obligation.satisfied and obligation.diagnosis is not None:
            if not obligation.diagnosis.candidates:
                lines.append("  no rule can derive this goal")
            for candidate in obligation.diagnosis.candidates:
                _render_candidate(candidate, lines)
    lines.append(f"summary: {report.satisfied_count} satisfied, "
                 f"{report.violated_count} violated")
    return "\n".join(lines) + "\n"


def _render_machine(report: VerificationReport) -> str:
    lines: list[str] = []
    for item in report.inputs:
        lines.append(f"INPUT\t{item}")
    for obligation in report.obligations:
        if obligation.satisfied:
            depth = obligation.proof.depth() if obligation.proof is not None else 0
            lines.append(f"SATISFIED\t{obligation.goal}\tproof-depth={depth}")
        else:
            missing: list[Atom] = []
            seen = set()
            if obligation.diagnosis is not None:
                for candidate in obligation.diagnosis.candidates:
                    for atom in candidate.missing:
                        if atom not in seen:
                            seen.add(atom)
                            missing.append(atom)
            detail = "missing=" + ";".join(str(a) for a in missing)
            lines.append(f"VIOLATED\t{obligation.goal}\t{detail}")
    lines.append(f"SUMMARY\tsatisfied={report.satisfied_count}"
                 f"\tviolated={report.violated_count}")
    return "\n".join(lines) + "\n"


def render_report(report: VerificationReport, format: str = "text",
                  include_proofs: bool = False) -> str:
    """``text``: human-readable, with indented proof trees when requested.
    ``machine``: line-oriented VERDICT<TAB>atom<TAB>detail records."""
    if format == "text":
        return _render_text(report, include_proofs)
    if format == "machine":
        return _render_machine(report)
    raise ValueError(f"unknown report format: {format!r}")


def render_store(store: FactStore) -> str:
    """Canonically sorted fact listing, one atom per line."""
    atoms = sorted(store, key=atom_sort_key)
    return "\n".join(str(a) for a in atoms) + ("\n" if atoms else "")
