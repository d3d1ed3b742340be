"""Forward-chaining Horn engine with per-fact provenance.

Axioms compile to rules (the standard OWL-RL reading), a semi-naive fixpoint
materializes the closure, and the resulting :class:`FactStore` answers ground
entailment queries, produces proof trees and explains failures through
missing-premise diagnosis.  The store is immutable once materialization
returns; queries are read-only and safe to run concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import BuiltinTypeError, NotDerived, UnsafeVariable
from .model import (
    Atom,
    BuiltinAtom,
    ClassAtom,
    DataAtom,
    DataValue,
    Domain,
    HornRule,
    Individual,
    InverseProperties,
    KnowledgeBase,
    Name,
    Range,
    RoleAtom,
    SubClassOf,
    SubPropertyChain,
    SubPropertyOf,
    Symmetric,
    Transitive,
    Variable,
    atom_terms,
    check_rule_safety,
    is_ground,
)

Substitution = dict[str, object]


# --------------------------------------------------------------------------
# Axiom compilation
# --------------------------------------------------------------------------

def compile_axioms(kb: KnowledgeBase) -> tuple[HornRule, ...]:
    """The module's own rules plus one generated rule per axiom.

    Generated ids are ``ax<k>`` in the module's namespace, numbered in axiom
    order (inverse-property axioms yield two rules).  Domain axioms on data
    properties produce a data-atom body; everything else follows the table:
    SubClassOf(A,B): A(?x) => B(?x); SubPropertyOf(P,Q): P(?x,?y) => Q(?x,?y);
    SubPropertyChain([P1..Pn],Q): P1(?x0,?x1),...,Pn(?x<n-1>,?xn) => Q(?x0,?xn);
    InverseProperties(P,Q): both directions; Symmetric(P): P(?x,?y) => P(?y,?x);
    Transitive(P): P(?x,?y),P(?y,?z) => P(?x,?z); Domain(P,C): P(?x,?y) => C(?x);
    Range(P,C): P(?x,?y) => C(?y).
    """
    rules: list[HornRule] = list(kb.rules)
    taken = {r.id for r in rules}
    data_props = {d.name for d in kb.declares if d.kind == "data"}
    ns = kb.name.namespace
    counter = 0

    def fresh_id() -> Name:
        nonlocal counter
        counter += 1
        while Name(ns, f"ax{counter}") in taken:
            counter += 1
        name = Name(ns, f"ax{counter}")
        taken.add(name)
        return name

    x, y, z = Variable("x"), Variable("y"), Variable("z")

    def prop_atom(prop: Name, subject, value) -> Atom:
        if prop in data_props:
            return DataAtom(prop, subject, value)
        return RoleAtom(prop, subject, value)

    for axiom in kb.axioms:
        if isinstance(axiom, SubClassOf):
            rules.append(HornRule(fresh_id(), (ClassAtom(axiom.sub, x),),
                                  ClassAtom(axiom.sup, x)))
        elif isinstance(axiom, SubPropertyOf):
            rules.append(HornRule(fresh_id(), (RoleAtom(axiom.sub, x, y),),
                                  RoleAtom(axiom.sup, x, y)))
        elif isinstance(axiom, SubPropertyChain):
            hops = [Variable(f"x{i}") for i in range(len(axiom.chain) + 1)]
            body = tuple(RoleAtom(link, hops[i], hops[i + 1])
                         for i, link in enumerate(axiom.chain))
            rules.append(HornRule(fresh_id(), body,
                                  RoleAtom(axiom.sup, hops[0], hops[-1])))
        elif isinstance(axiom, InverseProperties):
            rules.append(HornRule(fresh_id(), (RoleAtom(axiom.first, x, y),),
                                  RoleAtom(axiom.second, y, x)))
            rules.append(HornRule(fresh_id(), (RoleAtom(axiom.second, x, y),),
                                  RoleAtom(axiom.first, y, x)))
        elif isinstance(axiom, Symmetric):
            rules.append(HornRule(fresh_id(), (RoleAtom(axiom.prop, x, y),),
                                  RoleAtom(axiom.prop, y, x)))
        elif isinstance(axiom, Transitive):
            rules.append(HornRule(fresh_id(),
                                  (RoleAtom(axiom.prop, x, y), RoleAtom(axiom.prop, y, z)),
                                  RoleAtom(axiom.prop, x, z)))
        elif isinstance(axiom, Domain):
            rules.append(HornRule(fresh_id(), (prop_atom(axiom.prop, x, y),),
                                  ClassAtom(axiom.cls, x)))
        elif isinstance(axiom, Range):
            rules.append(HornRule(fresh_id(), (RoleAtom(axiom.prop, x, y),),
                                  ClassAtom(axiom.cls, y)))
        else:
            raise TypeError(f"unknown axiom: {axiom!r}")
    return tuple(rules)


# --------------------------------------------------------------------------
# Matching and builtin evaluation
# --------------------------------------------------------------------------

def atom_key(atom: Atom) -> tuple[str, Name]:
    if isinstance(atom, ClassAtom):
        return ("class", atom.concept)
    if isinstance(atom, RoleAtom):
        return ("role", atom.role)
    if isinstance(atom, DataAtom):
        return ("data", atom.property)
    raise TypeError("builtin atoms are not indexable facts")


def _match_term(pattern, value, subst: Substitution) -> Optional[Substitution]:
    if isinstance(pattern, Variable):
        bound = subst.get(pattern.symbol)
        if bound is None:
            out = dict(subst)
            out[pattern.symbol] = value
            return out
        return subst if bound == value else None
    return subst if pattern == value else None


def match_atom(pattern: Atom, fact: Atom, subst: Substitution) -> Optional[Substitution]:
    """Extend ``subst`` so that ``pattern`` maps onto the ground ``fact``."""
    if type(pattern) is not type(fact) or atom_key(pattern) != atom_key(fact):
        return None
    current = subst
    for p, f in zip(atom_terms(pattern), atom_terms(fact)):
        current = _match_term(p, f, current)
        if current is None:
            return None
    return current


def substitute(atom: Atom, subst: Substitution) -> Atom:
    """Apply ``subst``; unbound variables stay in place."""
    def term(t):
        if isinstance(t, Variable):
            return subst.get(t.symbol, t)
        return t

    if isinstance(atom, ClassAtom):
        return ClassAtom(atom.concept, term(atom.subject))
    if isinstance(atom, RoleAtom):
        return RoleAtom(atom.role, term(atom.subject), term(atom.obj))
    if isinstance(atom, DataAtom):
        return DataAtom(atom.property, term(atom.subject), term(atom.value))
    return BuiltinAtom(atom.op, term(atom.left), term(atom.right))


def _lenient_substitute(atom: Atom, subst: Substitution) -> Atom:
    """Like :func:`substitute`, but keeps a variable in place when binding it
    would make the atom ill-typed (used when rendering near-miss atoms)."""
    def entity(term):
        if isinstance(term, Variable):
            bound = subst.get(term.symbol)
            if bound is not None and not isinstance(bound, DataValue):
                return bound
            return term
        return term

    def value(term):
        if isinstance(term, Variable):
            bound = subst.get(term.symbol)
            if bound is not None and not isinstance(bound, Individual):
                return bound
            return term
        return term

    if isinstance(atom, ClassAtom):
        return ClassAtom(atom.concept, entity(atom.subject))
    if isinstance(atom, RoleAtom):
        return RoleAtom(atom.role, entity(atom.subject), entity(atom.obj))
    if isinstance(atom, DataAtom):
        return DataAtom(atom.property, entity(atom.subject), value(atom.value))
    return BuiltinAtom(atom.op, value(atom.left), value(atom.right))


def eval_builtin(atom: BuiltinAtom, subst: Substitution) -> bool:
    """Evaluate a comparison once both arguments are bound data values."""
    def resolve(side):
        if isinstance(side, Variable):
            bound = subst.get(side.symbol)
            if bound is None:
                raise UnsafeVariable(Name("qvl", "builtin"), side.symbol)
            side = bound
        if not isinstance(side, DataValue):
            raise BuiltinTypeError(substitute(atom, subst),
                                   f"{side} is not a data value")
        return side.value

    left, right = resolve(atom.left), resolve(atom.right)
    if atom.op == "eq":
        if isinstance(left, str) != isinstance(right, str):
            raise BuiltinTypeError(substitute(atom, subst),
                                   "cannot compare a string with a number")
        return left == right
    if isinstance(left, str) or isinstance(right, str):
        raise BuiltinTypeError(substitute(atom, subst),
                               "ordering builtins require numeric operands")
    if atom.op == "lt":
        return left < right
    if atom.op == "le":
        return left <= right
    if atom.op == "gt":
        return left > right
    return left >= right


# --------------------------------------------------------------------------
# Fact store and provenance
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Justification:
    """Why a fact holds: asserted, or derived by a rule from premises."""

    rule_id: Optional[Name]
    premises: tuple[Atom, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "premises", tuple(self.premises))
        if self.rule_id is not None and not self.premises:
            raise ValueError("derived justifications need at least one premise")
        if self.rule_id is None and self.premises:
            raise ValueError("asserted justifications have no premises")

    @property
    def is_asserted(self) -> bool:
        return self.rule_id is None

    @classmethod
    def asserted(cls) -> "Justification":
        return cls(None, ())

    @classmethod
    def derived(cls, rule_id: Name, premises: Sequence[Atom]) -> "Justification":
        return cls(rule_id, tuple(premises))


class FactStore:
    """Materialized closure: ground facts in derivation order plus provenance."""

    def __init__(self) -> None:
        self._just: dict[Atom, Justification] = {}
        self._by_key: dict[tuple[str, Name], list[Atom]] = {}

    def _add(self, fact: Atom, justification: Justification) -> bool:
        if fact in self._just:
            return False
        self._just[fact] = justification
        self._by_key.setdefault(atom_key(fact), []).append(fact)
        return True

    def __contains__(self, fact: Atom) -> bool:
        return fact in self._just

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._just)

    def __len__(self) -> int:
        return len(self._just)

    @property
    def facts(self):
        """Set-like view of all facts, in derivation order when iterated."""
        return self._just.keys()

    def facts_for_key(self, key: tuple[str, Name]) -> Sequence[Atom]:
        return self._by_key.get(key, ())

    def justification(self, fact: Atom) -> Justification:
        try:
            return self._just[fact]
        except KeyError:
            raise NotDerived(fact) from None

    def justifications(self, fact: Atom) -> list[Justification]:
        """Per-fact justification list; the first found derivation is kept."""
        return [self.justification(fact)]

    @property
    def provenance(self) -> Mapping[Atom, Justification]:
        return dict(self._just)


def _require_ground(atom: Atom) -> None:
    if isinstance(atom, BuiltinAtom):
        raise ValueError(f"builtin atoms are not facts: {atom}")
    if not is_ground(atom):
        raise ValueError(f"expected a ground atom: {atom}")


def _positive_body(rule: HornRule) -> list[Atom]:
    return [a for a in rule.body if not isinstance(a, BuiltinAtom)]


def _builtins(rule: HornRule) -> list[BuiltinAtom]:
    return [a for a in rule.body if isinstance(a, BuiltinAtom)]


def _join(patterns: Sequence[Atom], pivot: int,
          old: dict, delta: dict) -> Iterator[tuple[Substitution, tuple[Atom, ...]]]:
    """All ways to match ``patterns`` with the pivot atom drawn from delta.

    Positions before the pivot match pre-round facts only, positions after it
    match everything; this is the standard semi-naive split that enumerates
    each new combination exactly once per round.
    """
    def source(i: int) -> Iterable[Atom]:
        key = atom_key(patterns[i])
        if i == pivot:
            return delta.get(key, ())
        if i < pivot:
            return old.get(key, ())
        old_part = old.get(key, ())
        new_part = delta.get(key, ())
        if not new_part:
            return old_part
        return list(old_part) + list(new_part)

    def rec(i: int, subst: Substitution, premises: list[Atom]):
        if i == len(patterns):
            yield subst, tuple(premises)
            return
        for fact in source(i):
            extended = match_atom(patterns[i], fact, subst)
            if extended is not None:
                premises.append(fact)
                yield from rec(i + 1, extended, premises)
                premises.pop()

    yield from rec(0, {}, [])


def materialize(rules: Sequence[HornRule], facts: Sequence[Atom]) -> FactStore:
    """Least fixpoint of ``rules`` over ``facts`` (semi-naive evaluation).

    Rules must be safe and have at least one non-builtin body atom; facts
    must be ground.  Builtins are evaluated once all their variables are
    bound.  No rule invents individuals, so the closure is finite.
    """
    rules = [check_rule_safety(r) for r in rules]
    for rule in rules:
        if not _positive_body(rule):
            raise ValueError(
                f"rule {rule.id} has no non-builtin body atom; "
                "derived facts need fact premises")

    store = FactStore()
    for fact in facts:
        _require_ground(fact)
        store._add(fact, Justification.asserted())

    old: dict[tuple[str, Name], list[Atom]] = {}
    delta: dict[tuple[str, Name], list[Atom]] = {}
    for fact in store:
        delta.setdefault(atom_key(fact), []).append(fact)

    prepared = [(rule, _positive_body(rule), _builtins(rule)) for rule in rules]

    while delta:
        fresh: list[tuple[Atom, Justification]] = []
        fresh_set: set[Atom] = set()
        for rule, positive, builtins in prepared:
            for pivot in range(len(positive)):
                for subst, premises in _join(positive, pivot, old, delta):
                    if not all(eval_builtin(b, subst) for b in builtins):
                        continue
                    head = substitute(rule.head, subst)
                    if head in store._just or head in fresh_set:
                        continue
                    fresh_set.add(head)
                    fresh.append((head, Justification.derived(rule.id, premises)))
        for key, atoms in delta.items():
            old.setdefault(key, []).extend(atoms)
        delta = {}
        for head, justification in fresh:
            store._add(head, justification)
            delta.setdefault(atom_key(head), []).append(head)
    return store


def entails(store: FactStore, goal: Atom) -> bool:
    """True iff the ground ``goal`` is in the materialized closure."""
    _require_ground(goal)
    return goal in store


# --------------------------------------------------------------------------
# Proof trees
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProofTree:
    """Derivation of a fact: leaves are asserted, inner nodes are rule firings."""

    fact: Atom
    rule_id: Optional[Name]
    children: tuple["ProofTree", ...]

    @property
    def is_asserted(self) -> bool:
        return self.rule_id is None

    def depth(self) -> int:
        if not self.children:
            return 0
        return 1 + max(child.depth() for child in self.children)

    def nodes(self) -> Iterator["ProofTree"]:
        yield self
        for child in self.children:
            yield from child.nodes()

    def render(self, indent: str = "") -> str:
        label = "asserted" if self.is_asserted else f"rule {self.rule_id}"
        lines = [f"{indent}{self.fact}   [{label}]"]
        for child in self.children:
            lines.append(child.render(indent + "  "))
        return "\n".join(lines)


def explain(store: FactStore, goal: Atom) -> ProofTree:
    """Proof tree for an entailed ground goal; raises NotDerived otherwise."""
    _require_ground(goal)
    if goal not in store:
        raise NotDerived(goal)

    def build(fact: Atom) -> ProofTree:
        justification = store.justification(fact)
        children = tuple(build(p) for p in justification.premises)
        return ProofTree(fact, justification.rule_id, children)

    return build(goal)


# --------------------------------------------------------------------------
# Missing-premise diagnosis
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosisCandidate:
    """One rule that could have produced the goal, with its best near-miss."""

    rule_id: Name
    substitution: tuple[tuple[str, object], ...]
    satisfied: tuple[Atom, ...]
    missing: tuple[Atom, ...]

    def substitution_map(self) -> dict[str, object]:
        return dict(self.substitution)


@dataclass(frozen=True)
class MissingPremiseReport:
    goal: Atom
    candidates: tuple[DiagnosisCandidate, ...]


def _best_partial_matches(rule: HornRule, theta0: Substitution, store: FactStore):
    """Substitutions maximizing the number of satisfied body atoms.

    Search is one level deep: missing atoms are reported, never recursively
    diagnosed.  All tied maxima are returned, in deterministic search order.
    """
    indexed = list(enumerate(rule.body))
    positive = [(i, a) for i, a in indexed if not isinstance(a, BuiltinAtom)]
    builtins = [(i, a) for i, a in indexed if isinstance(a, BuiltinAtom)]
    best_count = -1
    results: list[tuple[Substitution, set[int]]] = []

    def finish(subst: Substitution, satisfied: set[int]) -> None:
        nonlocal best_count, results
        done = set(satisfied)
        for i, b in builtins:
            resolved = substitute(b, subst)
            if is_ground(resolved):
                try:
                    ok = eval_builtin(b, subst)
                except BuiltinTypeError:
                    ok = False
                if ok:
                    done.add(i)
        count = len(done)
        if count > best_count:
            best_count = count
            results = [(subst, done)]
        elif count == best_count:
            results.append((subst, done))

    total = len(rule.body)

    def search(pos: int, subst: Substitution, satisfied: set[int]) -> None:
        remaining = (len(positive) - pos) + len(builtins)
        if len(satisfied) + remaining < best_count:
            return
        if pos == len(positive):
            finish(subst, satisfied)
            return
        i, pattern = positive[pos]
        for fact in store.facts_for_key(atom_key(pattern)):
            extended = match_atom(pattern, fact, subst)
            if extended is not None:
                search(pos + 1, extended, satisfied | {i})
        search(pos + 1, subst, satisfied)

    search(0, dict(theta0), set())

    out = []
    seen = set()
    for subst, done in results:
        binding = tuple(sorted(subst.items()))
        sat = tuple(_lenient_substitute(rule.body[i], subst) for i in range(total) if i in done)
        missing = tuple(_lenient_substitute(rule.body[i], subst) for i in range(total) if i not in done)
        key = (binding, sat, missing)
        if key in seen:
            continue
        seen.add(key)
        out.append((binding, sat, missing))
    return out


def diagnose(rules: Sequence[HornRule], store: FactStore, goal: Atom) -> MissingPremiseReport:
    """For every rule whose head unifies with the (non-entailed) goal, report
    the body atoms still missing under the best partial instantiation."""
    _require_ground(goal)
    if goal in store:
        raise ValueError(f"{goal} is already entailed; diagnose expects a failing goal")
    candidates: list[DiagnosisCandidate] = []
    for rule in rules:
        theta0 = match_atom(rule.head, goal, {})
        if theta0 is None:
            continue
        for binding, satisfied, missing in _best_partial_matches(rule, theta0, store):
            if not missing:
                raise ValueError(
                    f"rule {rule.id} derives {goal} from the store; "
                    "materialization and diagnosis disagree")
            candidates.append(DiagnosisCandidate(rule.id, binding, satisfied, missing))
    return MissingPremiseReport(goal, tuple(candidates))


# --------------------------------------------------------------------------
# Termination bound
# --------------------------------------------------------------------------

def herbrand_bound(rules: Sequence[HornRule], facts: Sequence[Atom]) -> int:
    """Upper bound on closure size over the symbols of ``rules`` and ``facts``:
    |concepts|*|individuals| + |roles|*|individuals|^2
    + |data properties|*|individuals|*|distinct values|.
    """
    concepts: set[Name] = set()
    roles: set[Name] = set()
    data_props: set[Name] = set()
    individuals: set[Individual] = set()
    values: set[DataValue] = set()

    def scan(atom: Atom) -> None:
        if isinstance(atom, ClassAtom):
            concepts.add(atom.concept)
        elif isinstance(atom, RoleAtom):
            roles.add(atom.role)
        elif isinstance(atom, DataAtom):
            data_props.add(atom.property)
        for term in atom_terms(atom):
            if isinstance(term, Individual):
                individuals.add(term)
            elif isinstance(term, DataValue):
                values.add(term)

    for rule in rules:
        for atom in (*rule.body, rule.head):
            scan(atom)
    for fact in facts:
        scan(fact)

    n = len(individuals)
    return len(concepts) * n + len(roles) * n * n + len(data_props) * n * len(values)
