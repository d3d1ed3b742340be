"""Exception types raised across the qvl package.

Every error that a caller may want to catch derives from :class:`QvlError`.
Parse-time errors carry a :class:`SourceSpan` pointing at the offending token.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """A 1-based line/column position inside a named source file."""

    file: str
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class QvlError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(QvlError):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        if not expected:
            raise ValueError("expected must be non-empty")
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(f"{span}: expected {expected}, found {found}")


class DuplicateSpec(QvlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"duplicate spec name: {name}")


class UnknownImport(QvlError):
    def __init__(self, name, required_by=None):
        self.name = name
        self.required_by = required_by
        where = f" (imported by {required_by})" if required_by is not None else ""
        super().__init__(f"unknown module: {name}{where}")


class ImportCycle(QvlError):
    def __init__(self, path):
        self.path = tuple(path)
        super().__init__("import cycle: " + " -> ".join(str(n) for n in self.path))


class DuplicateRuleId(QvlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"duplicate rule id: {name}")


class UndeclaredName(QvlError):
    def __init__(self, name, expected_kind: str, context: str):
        self.name = name
        self.expected_kind = expected_kind
        self.context = context
        super().__init__(f"{name} is not declared as a {expected_kind} (used in {context})")


class UnsafeVariable(QvlError):
    def __init__(self, rule_id, variable: str):
        self.rule_id = rule_id
        self.variable = variable
        super().__init__(f"rule {rule_id}: variable ?{variable} is not bound by any non-builtin body atom")


class BuiltinTypeError(QvlError):
    def __init__(self, atom, detail: str):
        self.atom = atom
        self.detail = detail
        super().__init__(f"cannot evaluate {atom}: {detail}")


class NotDerived(QvlError):
    def __init__(self, goal):
        self.goal = goal
        super().__init__(f"fact is not in the materialized store: {goal}")


class UnknownPartRef(QvlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"reference to undeclared part or axis: {name}")


class DuplicatePart(QvlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"duplicate part name: {name}")


class UndeclaredIndividual(QvlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"region bound to undeclared individual: {name}")


class UnknownFragment(QvlError):
    def __init__(self, fragment: str):
        self.fragment = fragment
        super().__init__(f"unknown fragment: {fragment}")


class RefinementCycle(QvlError):
    def __init__(self, path):
        self.path = tuple(path)
        super().__init__("refinement cycle: " + " -> ".join(self.path))
