"""Logical vocabulary shared by every part of the engine.

Names, terms, atoms, axioms, Horn rules and knowledge-base modules, plus the
two module-level operations: :func:`merge_modules` and
:func:`check_rule_safety`.  All values are immutable after construction and
safe to share between threads.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import (
    DuplicateRuleId,
    DuplicateSpec,
    ImportCycle,
    UndeclaredName,
    UnknownImport,
    UnsafeVariable,
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

#: Comparison operators allowed in builtin atoms.
BUILTIN_OPS = ("eq", "lt", "le", "gt", "ge")


def is_identifier(text: str) -> bool:
    return bool(_IDENT_RE.match(text))


def render_number(value: float) -> str:
    """Canonical text for a numeric data value; round-trips through parsing."""
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def render_string(value: str) -> str:
    out = value.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


@dataclass(frozen=True)
class Name:
    """A namespaced identifier, e.g. ``geom:isParallelWith``."""

    namespace: str
    local: str

    def __post_init__(self) -> None:
        if not is_identifier(self.namespace):
            raise ValueError(f"invalid namespace: {self.namespace!r}")
        if not is_identifier(self.local):
            raise ValueError(f"invalid local name: {self.local!r}")

    def __str__(self) -> str:
        return f"{self.namespace}:{self.local}"

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.namespace, self.local)


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Individual:
    name: Name

    def __str__(self) -> str:
        return str(self.name)


@dataclass(frozen=True)
class Variable:
    symbol: str

    def __post_init__(self) -> None:
        if not is_identifier(self.symbol):
            raise ValueError(f"invalid variable name: {self.symbol!r}")

    def __str__(self) -> str:
        return f"?{self.symbol}"


@dataclass(frozen=True)
class DataValue:
    """A finite 64-bit float or a string literal."""

    value: Union[float, str]

    def __post_init__(self) -> None:
        v = self.value
        if isinstance(v, bool):
            raise TypeError("data values are numbers or strings, not booleans")
        if isinstance(v, int):
            object.__setattr__(self, "value", float(v))
        elif isinstance(v, float):
            if not math.isfinite(v):
                raise ValueError("data values must be finite")
        elif not isinstance(v, str):
            raise TypeError(f"unsupported data value: {v!r}")

    @property
    def is_number(self) -> bool:
        return isinstance(self.value, float)

    def __str__(self) -> str:
        if isinstance(self.value, float):
            return render_number(self.value)
        return render_string(self.value)


Term = Union[Individual, Variable, DataValue]


def term_sort_key(term: Term):
    if isinstance(term, Individual):
        return (0, term.name.sort_key)
    if isinstance(term, Variable):
        return (1, term.symbol)
    if isinstance(term.value, float):
        return (2, (0, term.value, ""))
    return (2, (1, 0.0, term.value))


# --------------------------------------------------------------------------
# Atoms
# --------------------------------------------------------------------------

def _check_entity(term: Term, role: str) -> None:
    if isinstance(term, DataValue):
        raise TypeError(f"{role} must be an individual or variable, not a data value")


@dataclass(frozen=True)
class ClassAtom:
    concept: Name
    subject: Term

    def __post_init__(self) -> None:
        _check_entity(self.subject, "class-atom subject")

    def __str__(self) -> str:
        return f"{self.concept}({self.subject})"


@dataclass(frozen=True)
class RoleAtom:
    role: Name
    subject: Term
    obj: Term

    def __post_init__(self) -> None:
        _check_entity(self.subject, "role-atom subject")
        _check_entity(self.obj, "role-atom object")

    def __str__(self) -> str:
        return f"{self.role}({self.subject},{self.obj})"


@dataclass(frozen=True)
class DataAtom:
    property: Name
    subject: Term
    value: Term

    def __post_init__(self) -> None:
        _check_entity(self.subject, "data-atom subject")
        if isinstance(self.value, Individual):
            raise TypeError("data-atom value must be a data value or variable")

    def __str__(self) -> str:
        return f"{self.property}({self.subject},{self.value})"


@dataclass(frozen=True)
class BuiltinAtom:
    op: str
    left: Term
    right: Term

    def __post_init__(self) -> None:
        if self.op not in BUILTIN_OPS:
            raise ValueError(f"unknown builtin operator: {self.op}")
        for side in (self.left, self.right):
            if isinstance(side, Individual):
                raise TypeError("builtin arguments must be variables or data values")

    def __str__(self) -> str:
        return f"{self.op}({self.left},{self.right})"


Atom = Union[ClassAtom, RoleAtom, DataAtom, BuiltinAtom]


def atom_terms(atom: Atom) -> tuple[Term, ...]:
    if isinstance(atom, ClassAtom):
        return (atom.subject,)
    if isinstance(atom, RoleAtom):
        return (atom.subject, atom.obj)
    if isinstance(atom, DataAtom):
        return (atom.subject, atom.value)
    return (atom.left, atom.right)


def atom_variables(atom: Atom) -> set[str]:
    return {t.symbol for t in atom_terms(atom) if isinstance(t, Variable)}


def is_ground(atom: Atom) -> bool:
    return not any(isinstance(t, Variable) for t in atom_terms(atom))


def atom_sort_key(atom: Atom):
    if isinstance(atom, ClassAtom):
        return (0, atom.concept.sort_key, tuple(term_sort_key(t) for t in atom_terms(atom)))
    if isinstance(atom, RoleAtom):
        return (1, atom.role.sort_key, tuple(term_sort_key(t) for t in atom_terms(atom)))
    if isinstance(atom, DataAtom):
        return (2, atom.property.sort_key, tuple(term_sort_key(t) for t in atom_terms(atom)))
    return (3, ("", atom.op), tuple(term_sort_key(t) for t in atom_terms(atom)))


# --------------------------------------------------------------------------
# Axioms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SubClassOf:
    sub: Name
    sup: Name


@dataclass(frozen=True)
class SubPropertyOf:
    sub: Name
    sup: Name


@dataclass(frozen=True)
class SubPropertyChain:
    chain: tuple[Name, ...]
    sup: Name

    def __post_init__(self) -> None:
        object.__setattr__(self, "chain", tuple(self.chain))
        if len(self.chain) < 2:
            raise ValueError("property chains need at least two links")


@dataclass(frozen=True)
class InverseProperties:
    first: Name
    second: Name


@dataclass(frozen=True)
class Symmetric:
    prop: Name


@dataclass(frozen=True)
class Transitive:
    prop: Name


@dataclass(frozen=True)
class Domain:
    prop: Name
    cls: Name


@dataclass(frozen=True)
class Range:
    prop: Name
    cls: Name


Axiom = Union[SubClassOf, SubPropertyOf, SubPropertyChain, InverseProperties,
              Symmetric, Transitive, Domain, Range]


def axiom_subject(axiom: Axiom) -> Name:
    """The name an axiom is declared on (the subject of its source item)."""
    if isinstance(axiom, (SubClassOf, SubPropertyOf)):
        return axiom.sub
    if isinstance(axiom, SubPropertyChain):
        return axiom.sup
    if isinstance(axiom, InverseProperties):
        return axiom.first
    if isinstance(axiom, (Symmetric, Transitive)):
        return axiom.prop
    return axiom.prop


# --------------------------------------------------------------------------
# Rules, declarations, modules
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HornRule:
    id: Name
    body: tuple[Atom, ...]
    head: Atom

    def __post_init__(self) -> None:
        object.__setattr__(self, "body", tuple(self.body))
        if not self.body:
            raise ValueError(f"rule {self.id} has an empty body")
        if isinstance(self.head, BuiltinAtom):
            raise ValueError(f"rule {self.id}: head cannot be a builtin atom")


DECLARATION_KINDS = ("class", "prop", "data")


@dataclass(frozen=True)
class Declaration:
    kind: str
    name: Name

    def __post_init__(self) -> None:
        if self.kind not in DECLARATION_KINDS:
            raise ValueError(f"unknown declaration kind: {self.kind}")


@dataclass(frozen=True)
class KnowledgeBase:
    """One named module: declarations, axioms, rules and ground assertions."""

    name: Name
    imports: tuple[Name, ...] = ()
    declares: tuple[Declaration, ...] = ()
    axioms: tuple[Axiom, ...] = ()
    rules: tuple[HornRule, ...] = ()
    assertions: tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "imports", tuple(self.imports))
        object.__setattr__(self, "declares", tuple(self.declares))
        object.__setattr__(self, "axioms", tuple(self.axioms))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "assertions", tuple(self.assertions))
        for atom in self.assertions:
            if isinstance(atom, BuiltinAtom) or not is_ground(atom):
                raise ValueError(f"assertions must be ground non-builtin atoms: {atom}")

    def declared(self, kind: str) -> set[Name]:
        return {d.name for d in self.declares if d.kind == kind}


def check_rule_safety(rule: HornRule) -> HornRule:
    """Return ``rule`` unchanged iff every head/builtin variable is bound.

    A variable is bound when it occurs in at least one non-builtin body atom.
    """
    bound: set[str] = set()
    for atom in rule.body:
        if not isinstance(atom, BuiltinAtom):
            bound |= atom_variables(atom)
    for var in sorted(atom_variables(rule.head)):
        if var not in bound:
            raise UnsafeVariable(rule.id, var)
    for atom in rule.body:
        if isinstance(atom, BuiltinAtom):
            for var in sorted(atom_variables(atom)):
                if var not in bound:
                    raise UnsafeVariable(rule.id, var)
    return rule


def _dedup(items: Iterable):
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out


def _closure_of(root: Name, by_name: dict[Name, KnowledgeBase]) -> set[Name]:
    """Transitive import closure; raises on unknown imports and cycles."""
    closed: set[Name] = set()
    stack: list[Name] = []
    on_stack: set[Name] = set()

    def visit(name: Name, required_by: Name | None) -> None:
        if name in on_stack:
            cycle = stack[stack.index(name):] + [name]
            raise ImportCycle(cycle)
        if name in closed:
            return
        if name not in by_name:
            raise UnknownImport(name, required_by)
        stack.append(name)
        on_stack.add(name)
        for imp in by_name[name].imports:
            visit(imp, name)
        on_stack.discard(name)
        stack.pop()
        closed.add(name)

    visit(root, None)
    return closed


def _check_declared(merged_declares: Sequence[Declaration],
                    axioms: Sequence[Axiom],
                    rules: Sequence[HornRule]) -> None:
    classes = {d.name for d in merged_declares if d.kind == "class"}
    props = {d.name for d in merged_declares if d.kind == "prop"}
    datas = {d.name for d in merged_declares if d.kind == "data"}

    def need(name: Name, kind: str, context: str) -> None:
        pool = {"class": classes, "prop": props, "data": datas,
                "prop or data": props | datas}[kind]
        if name not in pool:
            raise UndeclaredName(name, kind, context)

    for ax in axioms:
        ctx = f"axiom on {axiom_subject(ax)}"
        if isinstance(ax, SubClassOf):
            need(ax.sub, "class", ctx)
            need(ax.sup, "class", ctx)
        elif isinstance(ax, SubPropertyOf):
            need(ax.sub, "prop", ctx)
            need(ax.sup, "prop", ctx)
        elif isinstance(ax, SubPropertyChain):
            need(ax.sup, "prop", ctx)
            for link in ax.chain:
                need(link, "prop", ctx)
        elif isinstance(ax, InverseProperties):
            need(ax.first, "prop", ctx)
            need(ax.second, "prop", ctx)
        elif isinstance(ax, (Symmetric, Transitive)):
            need(ax.prop, "prop", ctx)
        elif isinstance(ax, Domain):
            need(ax.prop, "prop or data", ctx)
            need(ax.cls, "class", ctx)
        elif isinstance(ax, Range):
            need(ax.prop, "prop", ctx)
            need(ax.cls, "class", ctx)
    for rule in rules:
        ctx = f"rule {rule.id}"
        for atom in (*rule.body, rule.head):
            if isinstance(atom, ClassAtom):
                need(atom.concept, "class", ctx)
            elif isinstance(atom, RoleAtom):
                need(atom.role, "prop", ctx)
            elif isinstance(atom, DataAtom):
                need(atom.property, "data", ctx)


def merge_modules(modules: Sequence[KnowledgeBase], root: Name | None = None) -> KnowledgeBase:
    """Flatten a module set into a single knowledge base.

    With ``root`` given, the result is the union over the transitive import
    closure of ``root`` (the spec'd behaviour).  With ``root=None`` the union
    covers every listed module, named after the last one; this is what the
    CLI uses when no explicit root is requested.

    Order is deterministic: module order (input list), then declaration
    order within each module.  Duplicates are removed; two distinct rules
    sharing an id raise :class:`DuplicateRuleId`; every name referenced by an
    axiom or rule must be declared in some merged module.
    """
    modules = list(modules)
    if not modules:
        raise ValueError("merge_modules needs at least one module")
    by_name: dict[Name, KnowledgeBase] = {}
    for kb in modules:
        if kb.name in by_name:
            raise DuplicateSpec(kb.name)
        by_name[kb.name] = kb

    if root is None:
        closure = set(by_name)
        for kb in modules:
            for imp in kb.imports:
                if imp not in by_name:
                    raise UnknownImport(imp, kb.name)
        # cycle detection over the whole set
        for kb in modules:
            _closure_of(kb.name, by_name)
        result_name = modules[-1].name
    else:
        closure = _closure_of(root, by_name)
        result_name = root

    members = [kb for kb in modules if kb.name in closure]
    declares = _dedup(d for kb in members for d in kb.declares)
    axioms = _dedup(a for kb in members for a in kb.axioms)
    rules = _dedup(r for kb in members for r in kb.rules)
    assertions = _dedup(a for kb in members for a in kb.assertions)

    seen_ids: set[Name] = set()
    for rule in rules:
        if rule.id in seen_ids:
            raise DuplicateRuleId(rule.id)
        seen_ids.add(rule.id)

    _check_declared(declares, axioms, rules)
    return KnowledgeBase(name=result_name, imports=(), declares=tuple(declares),
                         axioms=tuple(axioms), rules=tuple(rules),
                         assertions=tuple(assertions))
