"""Parser and canonical printer for the ``.kb`` knowledge-base language.

Grammar (UTF-8, ``//`` comments, case-sensitive identifiers)::

    file      := { spec }
    spec      := "spec" QNAME [ "=" QNAME { "and" QNAME } ] "{" { item } "}"
    item      := classD | propD | dpropD | ruleD | indD
    classD    := "class" QNAME { "sub" QNAME }
    propD     := "prop" QNAME { clause }
    clause    := "domain" QNAME | "range" QNAME | "inverse" QNAME | "sub" QNAME
               | "symmetric" | "transitive" | "chain" QNAME "o" QNAME { "o" QNAME }
    dpropD    := "data" QNAME [ "domain" QNAME ]
    ruleD     := "rule" IDENT ":" atom { "," atom } "=>" atom
    indD      := "individual" QNAME [ "types" QNAME { "," QNAME } ]
                 [ "facts" fact { "," fact } ]
    fact      := QNAME QNAME | QNAME NUMBER | QNAME STRING
    atom      := QNAME "(" term { "," term } ")"
               | ("eq"|"lt"|"le"|"gt"|"ge") "(" term "," term ")"
    term      := QNAME | "?" IDENT | NUMBER | STRING
    QNAME     := [ IDENT ":" ] IDENT

Unqualified names take the per-file default namespace.  ``chain P o Q`` on
``prop R`` states that the composition of P and Q is contained in R.

In rule atoms a two-argument predicate is read as a data atom when it is
declared ``data`` somewhere in the same file, or when its second argument is
a literal; otherwise it is a role atom.  Cross-module data properties must
therefore be re-declared in files whose rules use them.
"""
from __future__ import annotations

import re

from . import lexer
from .errors import DuplicateRuleId, DuplicateSpec
from .lexer import Cursor, Token, tokenize
from .model import (
    Atom,
    BUILTIN_OPS,
    BuiltinAtom,
    ClassAtom,
    DataAtom,
    DataValue,
    Declaration,
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
    axiom_subject,
    is_ground,
)

KEYWORDS = frozenset({
    "spec", "and", "class", "prop", "data", "rule", "individual",
    "sub", "domain", "range", "inverse", "symmetric", "transitive",
    "chain", "o", "types", "facts",
})

_ITEM_WORDS = ("class", "prop", "data", "rule", "individual")


def namespace_for_path(path: str) -> str:
    """Default namespace for a source file: its sanitized stem."""
    stem = re.sub(r"\.[^.]*$", "", path.replace("\\", "/").rsplit("/", 1)[-1])
    ns = re.sub(r"[^A-Za-z0-9_]", "_", stem) or "kb"
    if ns[0].isdigit():
        ns = "_" + ns
    return ns


def _prescan_data_names(tokens: list[Token], default_namespace: str) -> set[Name]:
    """Collect every ``data`` declaration of the file before parsing rules."""
    names: set[Name] = set()
    for i, tok in enumerate(tokens):
        if tok.kind != lexer.IDENT or tok.text != "data":
            continue
        if i > 0 and tokens[i - 1].kind == lexer.PUNCT and tokens[i - 1].text == ":":
            continue  # qualified local part, not the keyword
        j = i + 1
        if j >= len(tokens) or tokens[j].kind != lexer.IDENT:
            continue
        if j + 2 < len(tokens) and tokens[j + 1].kind == lexer.PUNCT \
                and tokens[j + 1].text == ":" and tokens[j + 2].kind == lexer.IDENT:
            names.add(Name(tokens[j].text, tokens[j + 2].text))
        else:
            names.add(Name(default_namespace, tokens[j].text))
    return names


def parse_term(cur: Cursor, default_namespace: str, *, ground_only: bool = False):
    tok = cur.peek()
    if cur.at_punct("?"):
        if ground_only:
            cur.error("a ground term", tok)
        cur.advance()
        sym = cur.expect_any_ident("a variable name")
        return Variable(sym.text)
    if tok.kind == lexer.NUMBER:
        cur.advance()
        return DataValue(tok.value)
    if tok.kind == lexer.STRING:
        cur.advance()
        return DataValue(tok.value)
    return Individual(cur.parse_qname(default_namespace, "a term"))


def parse_atom(cur: Cursor, default_namespace: str, data_names: set[Name],
               *, ground_only: bool = False) -> Atom:
    tok = cur.peek()
    if tok.kind == lexer.IDENT and tok.text in BUILTIN_OPS \
            and cur.peek(1).kind == lexer.PUNCT and cur.peek(1).text == "(":
        op = cur.advance().text
        cur.expect_punct("(")
        left = parse_term(cur, default_namespace, ground_only=ground_only)
        cur.expect_punct(",")
        right = parse_term(cur, default_namespace, ground_only=ground_only)
        cur.expect_punct(")")
        for side in (left, right):
            if isinstance(side, Individual):
                cur.error("a variable or literal builtin argument", tok)
        return BuiltinAtom(op, left, right)

    pred = cur.parse_qname(default_namespace, "a predicate name")
    cur.expect_punct("(")
    args = [parse_term(cur, default_namespace, ground_only=ground_only)]
    while cur.accept_punct(","):
        args.append(parse_term(cur, default_namespace, ground_only=ground_only))
    close = cur.peek()
    cur.expect_punct(")")

    if len(args) == 1:
        if isinstance(args[0], DataValue):
            cur.error("an individual or variable subject", tok)
        return ClassAtom(pred, args[0])
    if len(args) != 2:
        cur.error("an atom with one or two arguments", close)
    subject, second = args
    if isinstance(subject, DataValue):
        cur.error("an individual or variable subject", tok)
    if pred in data_names:
        if isinstance(second, Individual):
            cur.error(f"a literal or variable value for data property {pred}", tok)
        return DataAtom(pred, subject, second)
    if isinstance(second, DataValue):
        return DataAtom(pred, subject, second)
    return RoleAtom(pred, subject, second)


def parse_ground_atom(text: str, default_namespace: str = "cad",
                      file: str = "<atom>") -> Atom:
    """Parse a single ground atom, e.g. for the CLI ``--fact`` option."""
    cur = Cursor(tokenize(text, file), file, KEYWORDS)
    atom = parse_atom(cur, default_namespace, set(), ground_only=True)
    if not cur.at_end():
        cur.error("end of input")
    return atom


class _SpecParser:
    def __init__(self, cur: Cursor, default_namespace: str, data_names: set[Name]):
        self.cur = cur
        self.ns = default_namespace
        self.data_names = data_names
        self.declares: list[Declaration] = []
        self._declared: set[tuple[str, Name]] = set()
        self.axioms: list = []
        self.rules: list[HornRule] = []
        self.assertions: list[Atom] = []
        self._rule_ids: set[Name] = set()

    def declare(self, kind: str, name: Name) -> None:
        key = (kind, name)
        if key not in self._declared:
            self._declared.add(key)
            self.declares.append(Declaration(kind, name))

    def qname(self, what: str = "a name") -> Name:
        return self.cur.parse_qname(self.ns, what)

    def parse(self) -> KnowledgeBase:
        cur = self.cur
        cur.expect_word("spec")
        name = self.qname("a spec name")
        imports: list[Name] = []
        if cur.accept_punct("="):
            imports.append(self.qname("an imported spec name"))
            while cur.accept_word("and"):
                imports.append(self.qname("an imported spec name"))
        cur.expect_punct("{")
        while not cur.at_punct("}"):
            self.item()
        cur.expect_punct("}")
        return KnowledgeBase(name=name, imports=tuple(imports),
                             declares=tuple(self.declares),
                             axioms=tuple(self.axioms), rules=tuple(self.rules),
                             assertions=tuple(self.assertions))

    def item(self) -> None:
        cur = self.cur
        if cur.accept_word("class"):
            self.class_item()
        elif cur.accept_word("prop"):
            self.prop_item()
        elif cur.accept_word("data"):
            self.data_item()
        elif cur.accept_word("rule"):
            self.rule_item()
        elif cur.accept_word("individual"):
            self.individual_item()
        else:
            cur.error("'class', 'prop', 'data', 'rule', 'individual' or '}'")

    def class_item(self) -> None:
        name = self.qname("a class name")
        self.declare("class", name)
        while self.cur.accept_word("sub"):
            self.axioms.append(SubClassOf(name, self.qname("a superclass name")))

    def prop_item(self) -> None:
        cur = self.cur
        name = self.qname("a property name")
        self.declare("prop", name)
        while True:
            if cur.accept_word("domain"):
                self.axioms.append(Domain(name, self.qname("a class name")))
            elif cur.accept_word("range"):
                self.axioms.append(Range(name, self.qname("a class name")))
            elif cur.accept_word("inverse"):
                self.axioms.append(InverseProperties(name, self.qname("a property name")))
            elif cur.accept_word("sub"):
                self.axioms.append(SubPropertyOf(name, self.qname("a property name")))
            elif cur.accept_word("symmetric"):
                self.axioms.append(Symmetric(name))
            elif cur.accept_word("transitive"):
                self.axioms.append(Transitive(name))
            elif cur.accept_word("chain"):
                links = [self.qname("a property name")]
                cur.expect_word("o")
                links.append(self.qname("a property name"))
                while cur.accept_word("o"):
                    links.append(self.qname("a property name"))
                self.axioms.append(SubPropertyChain(tuple(links), name))
            else:
                break

    def data_item(self) -> None:
        name = self.qname("a data property name")
        self.declare("data", name)
        self.data_names.add(name)
        if self.cur.accept_word("domain"):
            self.axioms.append(Domain(name, self.qname("a class name")))

    def rule_item(self) -> None:
        cur = self.cur
        id_tok = cur.expect_ident("a rule identifier")
        rule_id = Name(self.ns, id_tok.text)
        if rule_id in self._rule_ids:
            raise DuplicateRuleId(rule_id)
        self._rule_ids.add(rule_id)
        cur.expect_punct(":")
        body = [parse_atom(cur, self.ns, self.data_names)]
        while cur.accept_punct(","):
            body.append(parse_atom(cur, self.ns, self.data_names))
        cur.expect_punct("=>")
        head_tok = cur.peek()
        head = parse_atom(cur, self.ns, self.data_names)
        if isinstance(head, BuiltinAtom):
            cur.error("a non-builtin head atom", head_tok)
        self.rules.append(HornRule(rule_id, tuple(body), head))

    def individual_item(self) -> None:
        cur = self.cur
        subject = Individual(self.qname("an individual name"))
        if cur.accept_word("types"):
            self.assertions.append(ClassAtom(self.qname("a class name"), subject))
            while cur.accept_punct(","):
                self.assertions.append(ClassAtom(self.qname("a class name"), subject))
        if cur.accept_word("facts"):
            self.fact(subject)
            while cur.accept_punct(","):
                self.fact(subject)

    def fact(self, subject: Individual) -> None:
        cur = self.cur
        pred_tok = cur.peek()
        pred = self.qname("a property name")
        tok = cur.peek()
        if tok.kind == lexer.NUMBER or tok.kind == lexer.STRING:
            cur.advance()
            self.assertions.append(DataAtom(pred, subject, DataValue(tok.value)))
            return
        if pred in self.data_names:
            cur.error(f"a literal value for data property {pred}", pred_tok)
        obj = Individual(self.qname("an individual name"))
        self.assertions.append(RoleAtom(pred, subject, obj))


def parse_kb(text: str, default_namespace: str, file: str = "<string>") -> list[KnowledgeBase]:
    """Parse a ``.kb`` file into one knowledge base per ``spec`` block."""
    tokens = tokenize(text, file)
    data_names = _prescan_data_names(tokens, default_namespace)
    cur = Cursor(tokens, file, KEYWORDS)
    kbs: list[KnowledgeBase] = []
    seen: set[Name] = set()
    while not cur.at_end():
        kb = _SpecParser(cur, default_namespace, data_names).parse()
        if kb.name in seen:
            raise DuplicateSpec(kb.name)
        seen.add(kb.name)
        kbs.append(kb)
    return kbs


# --------------------------------------------------------------------------
# Canonical printing
# --------------------------------------------------------------------------

def render_atom(atom: Atom) -> str:
    return str(atom)


def _render_axiom(axiom, data_props: set[Name]) -> str:
    if isinstance(axiom, SubClassOf):
        return f"class {axiom.sub} sub {axiom.sup}"
    if isinstance(axiom, SubPropertyOf):
        return f"prop {axiom.sub} sub {axiom.sup}"
    if isinstance(axiom, SubPropertyChain):
        return f"prop {axiom.sup} chain " + " o ".join(str(n) for n in axiom.chain)
    if isinstance(axiom, InverseProperties):
        return f"prop {axiom.first} inverse {axiom.second}"
    if isinstance(axiom, Symmetric):
        return f"prop {axiom.prop} symmetric"
    if isinstance(axiom, Transitive):
        return f"prop {axiom.prop} transitive"
    if isinstance(axiom, Domain):
        keyword = "data" if axiom.prop in data_props else "prop"
        return f"{keyword} {axiom.prop} domain {axiom.cls}"
    if isinstance(axiom, Range):
        return f"prop {axiom.prop} range {axiom.cls}"
    raise TypeError(f"unknown axiom: {axiom!r}")


def _render_assertion(atom: Atom) -> str:
    if not is_ground(atom):
        raise ValueError(f"assertions must be ground: {atom}")
    if isinstance(atom, ClassAtom):
        return f"individual {atom.subject} types {atom.concept}"
    if isinstance(atom, RoleAtom):
        return f"individual {atom.subject} facts {atom.role} {atom.obj}"
    if isinstance(atom, DataAtom):
        return f"individual {atom.subject} facts {atom.property} {atom.value}"
    raise ValueError(f"builtin atoms cannot be asserted: {atom}")


def print_kb(kb: KnowledgeBase) -> str:
    """Canonical text for a well-formed module; reparsing reproduces it exactly.

    Well-formedness: every axiom's subject name is declared in the module and
    rule ids live in the module's own namespace (the grammar has no syntax
    for foreign rule ids).
    """
    declared = {(d.kind, d.name) for d in kb.declares}
    data_props = {d.name for d in kb.declares if d.kind == "data"}
    header = f"spec {kb.name}"
    if kb.imports:
        header += " = " + " and ".join(str(i) for i in kb.imports)
    lines = [header + " {"]
    for d in kb.declares:
        lines.append(f"  {d.kind} {d.name}")
    for axiom in kb.axioms:
        subject = axiom_subject(axiom)
        if not any((kind, subject) in declared for kind in ("class", "prop", "data")):
            raise ValueError(f"axiom subject {subject} is not declared in {kb.name}")
        lines.append("  " + _render_axiom(axiom, data_props))
    for rule in kb.rules:
        if rule.id.namespace != kb.name.namespace:
            raise ValueError(
                f"rule id {rule.id} is outside module namespace {kb.name.namespace}")
        body = ", ".join(render_atom(a) for a in rule.body)
        lines.append(f"  rule {rule.id.local}: {body} => {render_atom(rule.head)}")
    for atom in kb.assertions:
        lines.append("  " + _render_assertion(atom))
    lines.append("}")
    return "\n".join(lines) + "\n"
