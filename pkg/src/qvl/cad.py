"""Assembly construction-history files (``.asm``) and their design ABox.

Grammar (UTF-8, ``//`` comments)::

    file       := "assembly" IDENT "{" { part | constraint | feature } "}"
    part       := "part" IDENT "{" { "axis" IDENT
                   | "position" IDENT "on" IDENT NUMBER
                   | "dim" IDENT NUMBER } "}"
    constraint := "constraint" ("angle"|"distance") IDENT "{"
                   "first" REF ";" "second" REF ";" ("degrees"|"mm") NUMBER ";" "}"
    feature    := ("weld"|"bolt") IDENT "{" "joins" IDENT "," IDENT ";"
                   [ "kind" ("through-hole"|"blind-hole") ";" ] "}"
    REF        := IDENT "." IDENT      // part.axis

Angle values are normalized into [0, 360).  Individuals generated from an
assembly live in the ``cad`` namespace; the vocabulary of the generated ABox
lives in the ``feat`` namespace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DuplicatePart, ParseError, UnknownPartRef
from .lexer import Cursor, tokenize
from .model import (
    Atom,
    ClassAtom,
    DataAtom,
    DataValue,
    Individual,
    Name,
    RoleAtom,
)

CAD_NAMESPACE = "cad"
FEAT_NAMESPACE = "feat"

KEYWORDS = frozenset({
    "assembly", "part", "axis", "position", "on", "dim",
    "constraint", "angle", "distance", "first", "second", "degrees", "mm",
    "weld", "bolt", "joins", "kind",
})

BOLT_KINDS = ("through-hole", "blind-hole")


@dataclass(frozen=True)
class AxisRef:
    part: Name
    axis: Name

    def __str__(self) -> str:
        return f"{self.part.local}.{self.axis.local}"


@dataclass(frozen=True)
class PositionDecl:
    axis: Name
    datum: str
    coordinate: float


@dataclass(frozen=True)
class PartDecl:
    name: Name
    axes: tuple[Name, ...]
    positions: tuple[PositionDecl, ...] = ()
    dimensions: tuple[tuple[str, float], ...] = ()


@dataclass(frozen=True)
class AngleConstraintDecl:
    name: Name
    first: AxisRef
    second: AxisRef
    degrees: float


@dataclass(frozen=True)
class DistanceConstraintDecl:
    name: Name
    first: AxisRef
    second: AxisRef
    millimeters: float


ConstraintDecl = Union[AngleConstraintDecl, DistanceConstraintDecl]


@dataclass(frozen=True)
class WeldDecl:
    name: Name
    first: Name
    second: Name


@dataclass(frozen=True)
class BoltDecl:
    name: Name
    first: Name
    second: Name
    kind: str


FeatureDecl = Union[WeldDecl, BoltDecl]


@dataclass(frozen=True)
class AssemblyModel:
    name: Name
    parts: tuple[PartDecl, ...]
    constraints: tuple[ConstraintDecl, ...]
    features: tuple[FeatureDecl, ...]

    def part(self, local: str) -> PartDecl:
        for part in self.parts:
            if part.name.local == local:
                return part
        raise UnknownPartRef(local)


def _cad(local: str) -> Name:
    return Name(CAD_NAMESPACE, local)


def _feat(local: str) -> Name:
    return Name(FEAT_NAMESPACE, local)


def _normalize_degrees(value: float) -> float:
    out = math.fmod(value, 360.0)
    if out < 0:
        out += 360.0
    return out


class _AsmParser:
    def __init__(self, cur: Cursor):
        self.cur = cur
        self.parts: list[PartDecl] = []
        self.part_names: set[str] = set()
        self.axes_by_part: dict[str, set[str]] = {}
        self.constraints: list[ConstraintDecl] = []
        self.features: list[FeatureDecl] = []
        self.taken_locals: set[str] = set()

    def parse(self) -> AssemblyModel:
        cur = self.cur
        cur.expect_word("assembly")
        name = _cad(cur.expect_ident("an assembly name").text)
        cur.expect_punct("{")
        while not cur.at_punct("}"):
            if cur.accept_word("part"):
                self.part_block()
            elif cur.accept_word("constraint"):
                self.constraint_block()
            elif cur.at_word("weld") or cur.at_word("bolt"):
                self.feature_block()
            else:
                cur.error("'part', 'constraint', 'weld', 'bolt' or '}'")
        cur.expect_punct("}")
        if not cur.at_end():
            cur.error("end of input")
        return AssemblyModel(name, tuple(self.parts), tuple(self.constraints),
                             tuple(self.features))

    def part_block(self) -> None:
        cur = self.cur
        name_tok = cur.expect_ident("a part name")
        if name_tok.text in self.part_names:
            raise DuplicatePart(_cad(name_tok.text))
        cur.expect_punct("{")
        axes: list[Name] = []
        axis_locals: set[str] = set()
        positions: list[PositionDecl] = []
        positioned: set[str] = set()
        dims: list[tuple[str, float]] = []
        dim_names: set[str] = set()
        while not cur.at_punct("}"):
            if cur.accept_word("axis"):
                axis_tok = cur.expect_ident("an axis name")
                if axis_tok.text in axis_locals:
                    cur.error("a fresh axis name", axis_tok)
                axis_locals.add(axis_tok.text)
                axes.append(_cad(axis_tok.text))
            elif cur.accept_word("position"):
                axis_tok = cur.expect_ident("an axis name")
                cur.expect_word("on")
                datum = cur.expect_ident("a datum name").text
                coord = cur.expect_number().value
                if axis_tok.text in positioned:
                    cur.error("a single position per axis", axis_tok)
                positioned.add(axis_tok.text)
                positions.append(PositionDecl(_cad(axis_tok.text), datum, coord))
            elif cur.accept_word("dim"):
                dim_tok = cur.expect_ident("a dimension name")
                value = cur.expect_number().value
                if dim_tok.text in dim_names:
                    cur.error("a fresh dimension name", dim_tok)
                dim_names.add(dim_tok.text)
                dims.append((dim_tok.text, value))
            else:
                cur.error("'axis', 'position', 'dim' or '}'")
        cur.expect_punct("}")
        if not axes:
            raise ParseError(name_tok.span(cur.file), "at least one axis",
                             f"part {name_tok.text} without axes")
        for pos in positions:
            if pos.axis.local not in axis_locals:
                raise UnknownPartRef(f"{name_tok.text}.{pos.axis.local}")
        self.part_names.add(name_tok.text)
        self.axes_by_part[name_tok.text] = axis_locals
        self.taken_locals.add(name_tok.text)
        self.taken_locals.update(axis_locals)
        self.parts.append(PartDecl(_cad(name_tok.text), tuple(axes),
                                   tuple(positions), tuple(dims)))

    def axis_ref(self) -> AxisRef:
        cur = self.cur
        part_tok = cur.expect_ident("a part name")
        cur.expect_punct(".")
        axis_tok = cur.expect_ident("an axis name")
        ref = f"{part_tok.text}.{axis_tok.text}"
        if part_tok.text not in self.part_names:
            raise UnknownPartRef(ref)
        if axis_tok.text not in self.axes_by_part[part_tok.text]:
            raise UnknownPartRef(ref)
        return AxisRef(_cad(part_tok.text), _cad(axis_tok.text))

    def _fresh_constraint_name(self, tok) -> Name:
        for local in (tok.text, tok.text + "_ang"):
            if local in self.taken_locals:
                self.cur.error("a fresh constraint name", tok)
        self.taken_locals.add(tok.text)
        self.taken_locals.add(tok.text + "_ang")
        return _cad(tok.text)

    def constraint_block(self) -> None:
        cur = self.cur
        if cur.accept_word("angle"):
            kind = "angle"
        elif cur.accept_word("distance"):
            kind = "distance"
        else:
            cur.error("'angle' or 'distance'")
        name = self._fresh_constraint_name(cur.expect_ident("a constraint name"))
        cur.expect_punct("{")
        cur.expect_word("first")
        first = self.axis_ref()
        cur.expect_punct(";")
        cur.expect_word("second")
        second = self.axis_ref()
        cur.expect_punct(";")
        if kind == "angle":
            cur.expect_word("degrees")
            value_tok = cur.expect_number()
            constraint: ConstraintDecl = AngleConstraintDecl(
                name, first, second, _normalize_degrees(value_tok.value))
        else:
            cur.expect_word("mm")
            value_tok = cur.expect_number()
            if value_tok.value < 0:
                raise ParseError(value_tok.span(cur.file),
                                 "a non-negative distance", value_tok.text)
            constraint = DistanceConstraintDecl(name, first, second, value_tok.value)
        cur.expect_punct(";")
        cur.expect_punct("}")
        self.constraints.append(constraint)

    def feature_block(self) -> None:
        cur = self.cur
        is_weld = cur.accept_word("weld")
        if not is_weld:
            cur.expect_word("bolt")
        name = _cad(cur.expect_ident("a feature name").text)
        cur.expect_punct("{")
        cur.expect_word("joins")
        first_tok = cur.expect_ident("a part name")
        cur.expect_punct(",")
        second_tok = cur.expect_ident("a part name")
        cur.expect_punct(";")
        for tok in (first_tok, second_tok):
            if tok.text not in self.part_names:
                raise UnknownPartRef(tok.text)
        kind = None
        if cur.at_word("kind"):
            kind_tok = cur.advance()
            if is_weld:
                cur.error("'}' (welds take no kind)", kind_tok)
            word = cur.expect_ident("a bolt kind").text
            if cur.accept_punct("-"):
                word += "-" + cur.expect_ident("a bolt kind").text
            if word not in BOLT_KINDS:
                cur.error("'through-hole' or 'blind-hole'", kind_tok)
            kind = word
            cur.expect_punct(";")
        if not is_weld and kind is None:
            cur.error("a 'kind' clause (bolts require one)")
        cur.expect_punct("}")
        if is_weld:
            self.features.append(WeldDecl(name, _cad(first_tok.text), _cad(second_tok.text)))
        else:
            self.features.append(BoltDecl(name, _cad(first_tok.text),
                                          _cad(second_tok.text), kind))


def parse_assembly(text: str, file: str = "<string>") -> AssemblyModel:
    """Parse a ``.asm`` construction history; invariant violations are rejected."""
    cur = Cursor(tokenize(text, file), file, KEYWORDS)
    return _AsmParser(cur).parse()


def assembly_to_abox(model: AssemblyModel) -> tuple[Atom, ...]:
    """Deterministic design ABox for an assembly.

    Parts become ``feat:Part`` members with ``feat:hasAxis`` links and one
    data atom per dimension; every distinct axis is typed ``feat:Line``; each
    angle constraint is reified as a constraint individual plus a fresh
    ``<name>_ang`` angle individual carrying ``feat:valueOf``; distance
    constraints carry ``feat:distanceValue`` directly; welds and bolts map to
    ``feat:weldedTo``/``feat:boltedTo`` (one direction, symmetry is axiomatic)
    and positions to ``feat:positionOnAxis`` on the owning part.
    """
    atoms: list[Atom] = []
    seen: set[Atom] = set()

    def emit(atom: Atom) -> None:
        if atom not in seen:
            seen.add(atom)
            atoms.append(atom)

    part_cls = _feat("Part")
    line_cls = _feat("Line")
    angle_cls = _feat("Angle")
    has_axis = _feat("hasAxis")

    for part in model.parts:
        subject = Individual(part.name)
        emit(ClassAtom(part_cls, subject))
        for axis in part.axes:
            emit(RoleAtom(has_axis, subject, Individual(axis)))
        for dim_name, dim_value in part.dimensions:
            emit(DataAtom(_feat(dim_name), subject, DataValue(dim_value)))
    for part in model.parts:
        for axis in part.axes:
            emit(ClassAtom(line_cls, Individual(axis)))
    for constraint in model.constraints:
        subject = Individual(constraint.name)
        if isinstance(constraint, AngleConstraintDecl):
            emit(ClassAtom(_feat("AngleConstraint"), subject))
            emit(RoleAtom(_feat("fstLine"), subject, Individual(constraint.first.axis)))
            emit(RoleAtom(_feat("sndLine"), subject, Individual(constraint.second.axis)))
            angle_ind = Individual(_cad(constraint.name.local + "_ang"))
            emit(ClassAtom(angle_cls, angle_ind))
            emit(RoleAtom(_feat("angle"), subject, angle_ind))
            emit(DataAtom(_feat("valueOf"), angle_ind, DataValue(constraint.degrees)))
        else:
            emit(ClassAtom(_feat("DistanceConstraint"), subject))
            emit(RoleAtom(_feat("fstLine"), subject, Individual(constraint.first.axis)))
            emit(RoleAtom(_feat("sndLine"), subject, Individual(constraint.second.axis)))
            emit(DataAtom(_feat("distanceValue"), subject, DataValue(constraint.millimeters)))
    for feature in model.features:
        if isinstance(feature, WeldDecl):
            emit(RoleAtom(_feat("weldedTo"), Individual(feature.first),
                          Individual(feature.second)))
        else:
            emit(RoleAtom(_feat("boltedTo"), Individual(feature.first),
                          Individual(feature.second)))
            emit(DataAtom(_feat("boltKind"), Individual(feature.first),
                          DataValue(feature.kind)))
    for part in model.parts:
        for position in part.positions:
            emit(DataAtom(_feat("positionOnAxis"), Individual(part.name),
                          DataValue(position.coordinate)))
    return tuple(atoms)
