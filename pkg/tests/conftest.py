"""Shared fixtures: the bundled crane/winch inputs and a bound-checked
materialization wrapper used throughout the suite."""
from __future__ import annotations

import pytest

from proof_check import assert_sound_store

from qvl import fixtures_dir
from qvl.cad import assembly_to_abox, parse_assembly
from qvl.kbtext import namespace_for_path, parse_kb
from qvl.model import KnowledgeBase, merge_modules
from qvl.psa import parse_annotations, requirements_of
from qvl.reasoner import herbrand_bound, materialize

ONTOLOGY_FILES = ("rules.kb", "geom.kb", "feat.kb")

#: one line per acceptance criterion, appended by test_acceptance on success
acceptance_results: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_results:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_results:
            terminalreporter.write_line(line)


def checked_materialize(rules, facts):
    """materialize() plus the Herbrand termination bound and a full
    justification replay; used instead of the raw call in every test."""
    store = materialize(rules, facts)
    assert len(store) <= herbrand_bound(rules, facts)
    assert_sound_store(store, {r.id: r for r in rules}, set(facts))
    return store


def load_fixture(name: str) -> str:
    return (fixtures_dir() / name).read_text(encoding="utf-8")


def load_background() -> KnowledgeBase:
    modules = []
    for name in ONTOLOGY_FILES:
        modules.extend(parse_kb(load_fixture(name), namespace_for_path(name), file=name))
    return merge_modules(modules)


def load_abox(asm_name: str):
    return assembly_to_abox(parse_assembly(load_fixture(asm_name), file=asm_name))


def load_requirements(psa_name: str):
    return requirements_of(parse_annotations(load_fixture(psa_name), file=psa_name))


@pytest.fixture(scope="session")
def fixtures():
    return fixtures_dir()


@pytest.fixture(scope="session")
def background() -> KnowledgeBase:
    return load_background()


@pytest.fixture(scope="session")
def crane_abox():
    return load_abox("crane.asm")


@pytest.fixture(scope="session")
def crane_bad_abox():
    return load_abox("crane-bad.asm")


@pytest.fixture(scope="session")
def crane_requirements():
    return load_requirements("crane.psa")


@pytest.fixture(scope="session")
def winch_abox():
    return load_abox("winch.asm")


@pytest.fixture(scope="session")
def winch_requirements():
    return load_requirements("winch.psa")
