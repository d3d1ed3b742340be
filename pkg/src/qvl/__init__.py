"""qvl: qualitative verification of CAD designs against principle solutions.

A knowledge-base core (modules of axioms, Horn rules and assertions), a
forward-chaining reasoner with provenance, ingestion for CAD construction
histories (``.asm``) and annotated principle solutions (``.psa``), a
verifier producing proof/diagnosis reports, and a refinement-trace project
graph (``.proj``).  ``qvl.cli`` is the command-line front end and
``qvl.service`` the HTTP API.
"""
from importlib import resources
from pathlib import Path

from .errors import QvlError
from .model import (
    Atom,
    BuiltinAtom,
    ClassAtom,
    DataAtom,
    DataValue,
    HornRule,
    Individual,
    KnowledgeBase,
    Name,
    RoleAtom,
    Variable,
    check_rule_safety,
    merge_modules,
)
from .kbtext import parse_kb, print_kb
from .reasoner import (
    FactStore,
    compile_axioms,
    diagnose,
    entails,
    explain,
    materialize,
)
from .cad import assembly_to_abox, parse_assembly
from .psa import parse_annotations, requirements_of
from .project import fragments_of_concept, parse_project, trace
from .verifier import render_report, verify_view

__version__ = "0.1.0"

__all__ = [
    "Atom", "BuiltinAtom", "ClassAtom", "DataAtom", "DataValue", "FactStore",
    "HornRule", "Individual", "KnowledgeBase", "Name", "QvlError", "RoleAtom",
    "Variable", "assembly_to_abox", "check_rule_safety", "compile_axioms",
    "diagnose", "entails", "explain", "fixtures_dir", "fragments_of_concept",
    "materialize", "merge_modules", "parse_annotations", "parse_assembly",
    "parse_kb", "parse_project", "print_kb", "render_report", "requirements_of",
    "trace", "verify_view",
]


def fixtures_dir() -> Path:
    """Directory holding the bundled crane/winch fixture files."""
    return Path(resources.files(__name__) / "fixtures")
