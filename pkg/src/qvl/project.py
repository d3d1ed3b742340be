"""Design-process documents, fragments and refinement links (``.proj``).

Grammar (UTF-8, ``//`` comments)::

    file := "project" IDENT { line }
    line := "document" IDENT "stage" ("S1".."S6") "kind" IDENT "file" STRING
          | "fragment" FRAGID
          | "refines" FRAGID "of" FRAGID        // later-stage of earlier-stage
          | "illustrates" FRAGID "concept" QNAME
    FRAGID := IDENT "#" IDENT

Stages follow the systematic design process: S1 problem, S2 requirements
list, S3 functional structure, S4 principle solution, S5 embodiment design,
S6 documentation.  The refinement relation points from later-stage fragments
back to what they refine and must be acyclic.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ParseError, RefinementCycle, UnknownFragment
from .lexer import Cursor, tokenize
from .model import Name

STAGES = ("S1", "S2", "S3", "S4", "S5", "S6")

KEYWORDS = frozenset({
    "project", "document", "stage", "kind", "file",
    "fragment", "refines", "of", "illustrates", "concept",
})


@dataclass(frozen=True)
class DocumentDecl:
    id: str
    stage: str
    kind: str
    path: str


@dataclass(frozen=True)
class FragmentDecl:
    id: str
    document: str


@dataclass(frozen=True)
class ProjectGraph:
    name: str
    documents: tuple[DocumentDecl, ...]
    fragments: tuple[FragmentDecl, ...]
    refines: tuple[tuple[str, str], ...]
    illustrates: tuple[tuple[str, Name], ...]

    def fragment_ids(self) -> set[str]:
        return {f.id for f in self.fragments}


def _fragid(cur: Cursor) -> str:
    doc = cur.expect_ident("a document id")
    cur.expect_punct("#")
    local = cur.expect_any_ident("a fragment id")
    return f"{doc.text}#{local.text}"


def _check_acyclic(edges: tuple[tuple[str, str], ...]) -> None:
    adjacency: dict[str, list[str]] = {}
    for src, dst in edges:
        adjacency.setdefault(src, []).append(dst)
    done: set[str] = set()
    path: list[str] = []
    on_path: set[str] = set()

    def visit(node: str) -> None:
        if node in on_path:
            raise RefinementCycle(path[path.index(node):] + [node])
        if node in done:
            return
        on_path.add(node)
        path.append(node)
        for nxt in adjacency.get(node, ()):
            visit(nxt)
        path.pop()
        on_path.discard(node)
        done.add(node)

    for node in list(adjacency):
        visit(node)


def parse_project(text: str, default_namespace: str = "proj",
                  file: str = "<string>") -> ProjectGraph:
    """Parse a ``.proj`` file; edge endpoints must be declared and the
    refinement relation acyclic."""
    cur = Cursor(tokenize(text, file), file, KEYWORDS)
    cur.expect_word("project")
    name = cur.expect_ident("a project name").text
    documents: list[DocumentDecl] = []
    doc_ids: set[str] = set()
    fragments: list[FragmentDecl] = []
    fragment_ids: set[str] = set()
    refines: list[tuple[str, str]] = []
    illustrates: list[tuple[str, Name]] = []

    while not cur.at_end():
        if cur.accept_word("document"):
            id_tok = cur.expect_ident("a document id")
            if id_tok.text in doc_ids:
                cur.error("a fresh document id", id_tok)
            cur.expect_word("stage")
            stage_tok = cur.expect_any_ident("a stage S1..S6")
            if stage_tok.text not in STAGES:
                cur.error("a stage S1..S6", stage_tok)
            cur.expect_word("kind")
            kind = cur.expect_ident("a document kind").text
            cur.expect_word("file")
            path = cur.expect_string().value
            doc_ids.add(id_tok.text)
            documents.append(DocumentDecl(id_tok.text, stage_tok.text, kind, path))
        elif cur.accept_word("fragment"):
            tok = cur.peek()
            frag = _fragid(cur)
            doc = frag.split("#", 1)[0]
            if doc not in doc_ids:
                raise UnknownFragment(frag)
            if frag in fragment_ids:
                cur.error("a fresh fragment id", tok)
            fragment_ids.add(frag)
            fragments.append(FragmentDecl(frag, doc))
        elif cur.accept_word("refines"):
            tok = cur.peek()
            later = _fragid(cur)
            cur.expect_word("of")
            earlier = _fragid(cur)
            for frag in (later, earlier):
                if frag not in fragment_ids:
                    raise UnknownFragment(frag)
            if later.split("#", 1)[0] == earlier.split("#", 1)[0]:
                raise ParseError(tok.span(cur.file),
                                 "fragments of distinct documents",
                                 f"{later} of {earlier}")
            refines.append((later, earlier))
        elif cur.accept_word("illustrates"):
            frag = _fragid(cur)
            if frag not in fragment_ids:
                raise UnknownFragment(frag)
            cur.expect_word("concept")
            concept = cur.parse_qname(default_namespace, "a concept name")
            illustrates.append((frag, concept))
        else:
            cur.error("'document', 'fragment', 'refines' or 'illustrates'")

    edges = tuple(refines)
    _check_acyclic(edges)
    return ProjectGraph(name, tuple(documents), tuple(fragments), edges,
                        tuple(illustrates))


def trace(graph: ProjectGraph, fragment: str, direction: str) -> list[str]:
    """Transitive refinement closure of a fragment, breadth-first, deduplicated.

    ``up`` walks toward earlier stages (what this fragment refines), ``down``
    toward later ones (what refines it).
    """
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    if fragment not in graph.fragment_ids():
        raise UnknownFragment(fragment)
    adjacency: dict[str, list[str]] = {}
    for later, earlier in graph.refines:
        src, dst = (later, earlier) if direction == "up" else (earlier, later)
        adjacency.setdefault(src, []).append(dst)
    seen = {fragment}
    queue = deque([fragment])
    out: list[str] = []
    while queue:
        current = queue.popleft()
        for nxt in adjacency.get(current, ()):
            if nxt not in seen:
                seen.add(nxt)
                out.append(nxt)
                queue.append(nxt)
    return out


def fragments_of_concept(graph: ProjectGraph, concept: Name) -> list[str]:
    """All fragments illustrating ``concept``, in document order."""
    linked = {frag for frag, name in graph.illustrates if name == concept}
    doc_order = {doc.id: i for i, doc in enumerate(graph.documents)}
    found = [frag.id for frag in graph.fragments if frag.id in linked]
    found.sort(key=lambda fid: doc_order[fid.split("#", 1)[0]])  # stable: keeps decl order
    return found
