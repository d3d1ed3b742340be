"""Annotated principle solutions (``.psa``): sketch regions, individuals and
requirement atoms.

Grammar (UTF-8, ``//`` comments)::

    file   := "sketch" STRING { region | indiv | req }
    region := "region" IDENT "at" "(" NUM "," NUM "," NUM "," NUM ")" "denotes" QNAME
    indiv  := "individual" QNAME [ "types" QNAME { "," QNAME } ]
    req    := "require" atom        // atom grammar as in .kb files, ground only

Unqualified names default to the ``cad`` namespace so that requirement atoms
name the same individuals the design ABox generates; vocabulary names must
be written qualified (e.g. ``geom:isParallelWith``).  Region rectangles are
pixel boxes tying individuals back to the sketch; they carry no logic.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, UndeclaredIndividual
from .kbtext import parse_atom
from .lexer import Cursor, tokenize
from .model import Atom, ClassAtom, Individual, Name, atom_terms

CAD_NAMESPACE = "cad"

KEYWORDS = frozenset({
    "sketch", "region", "at", "denotes", "individual", "types", "require",
})


@dataclass(frozen=True)
class RegionDecl:
    name: str
    x: float
    y: float
    width: float
    height: float
    individual: Name


@dataclass(frozen=True)
class IndividualDecl:
    name: Name
    types: tuple[Name, ...] = ()

    def typings(self) -> tuple[ClassAtom, ...]:
        subject = Individual(self.name)
        return tuple(ClassAtom(cls, subject) for cls in self.types)


@dataclass(frozen=True)
class PrincipleSolutionDoc:
    sketch: str
    regions: tuple[RegionDecl, ...]
    individuals: tuple[IndividualDecl, ...]
    requirements: tuple[Atom, ...]

    def declared_names(self) -> set[Name]:
        return {decl.name for decl in self.individuals}

    def typings(self) -> tuple[ClassAtom, ...]:
        out: list[ClassAtom] = []
        for decl in self.individuals:
            out.extend(decl.typings())
        return tuple(out)


def parse_annotations(text: str, default_namespace: str = CAD_NAMESPACE,
                      file: str = "<string>") -> PrincipleSolutionDoc:
    """Parse a ``.psa`` file; every region must denote a declared individual."""
    cur = Cursor(tokenize(text, file), file, KEYWORDS)
    cur.expect_word("sketch")
    sketch = cur.expect_string().value
    regions: list[RegionDecl] = []
    individuals: list[IndividualDecl] = []
    requirements: list[Atom] = []
    region_names: set[str] = set()
    while not cur.at_end():
        if cur.accept_word("region"):
            name_tok = cur.expect_ident("a region name")
            if name_tok.text in region_names:
                cur.error("a fresh region name", name_tok)
            region_names.add(name_tok.text)
            cur.expect_word("at")
            cur.expect_punct("(")
            x = cur.expect_number().value
            cur.expect_punct(",")
            y = cur.expect_number().value
            cur.expect_punct(",")
            w_tok = cur.expect_number()
            cur.expect_punct(",")
            h_tok = cur.expect_number()
            cur.expect_punct(")")
            if w_tok.value <= 0 or h_tok.value <= 0:
                raise ParseError(w_tok.span(cur.file),
                                 "a region with positive width and height",
                                 f"{w_tok.text} x {h_tok.text}")
            cur.expect_word("denotes")
            individual = cur.parse_qname(default_namespace, "an individual name")
            regions.append(RegionDecl(name_tok.text, x, y, w_tok.value,
                                      h_tok.value, individual))
        elif cur.accept_word("individual"):
            name = cur.parse_qname(default_namespace, "an individual name")
            types: list[Name] = []
            if cur.accept_word("types"):
                types.append(cur.parse_qname(default_namespace, "a class name"))
                while cur.accept_punct(","):
                    types.append(cur.parse_qname(default_namespace, "a class name"))
            individuals.append(IndividualDecl(name, tuple(types)))
        elif cur.accept_word("require"):
            requirements.append(parse_atom(cur, default_namespace, set(),
                                           ground_only=True))
        else:
            cur.error("'region', 'individual' or 'require'")

    declared = {decl.name for decl in individuals}
    for region in regions:
        if region.individual not in declared:
            raise UndeclaredIndividual(region.individual)
    return PrincipleSolutionDoc(sketch, tuple(regions), tuple(individuals),
                                tuple(requirements))


def requirements_of(doc: PrincipleSolutionDoc) -> tuple[Atom, ...]:
    """The document's requirement atoms, deduplicated, in source order.

    Each returned atom is one proof obligation for the verifier.
    """
    seen: set[Atom] = set()
    out: list[Atom] = []
    for atom in doc.requirements:
        if atom not in seen:
            seen.add(atom)
            out.append(atom)
    return tuple(out)


def lint_annotations(doc: PrincipleSolutionDoc) -> list[str]:
    """Warnings, not errors: individuals used in requirements should be
    declared or bound to a sketch region."""
    known = doc.declared_names() | {region.individual for region in doc.regions}
    warnings: list[str] = []
    flagged: set[Name] = set()
    for atom in doc.requirements:
        for term in atom_terms(atom):
            if isinstance(term, Individual) and term.name not in known \
                    and term.name not in flagged:
                flagged.add(term.name)
                warnings.append(
                    f"individual {term.name} is used in a requirement but never "
                    "declared or bound to a region")
    return warnings
