"""HTTP API wrapping the verification core.

All inputs travel as file contents in the request body, so many clients
(CAD plug-ins, CI jobs) can share one long-running instance:

    POST /verify       requirements + design + ontologies -> obligations
    POST /materialize  ontologies [+ design]              -> fact listing
    POST /explain      ontologies + design + fact         -> proof tree
    POST /trace        project + fragment + direction     -> fragment list
    POST /check        files                              -> per-file lint
    GET  /health

Run with ``uvicorn qvl.service:app``.  Parse and consistency errors map to
HTTP 422 with the error type and source position in the body.
"""
from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .cad import assembly_to_abox, parse_assembly
from .errors import ParseError, QvlError
from .kbtext import namespace_for_path, parse_ground_atom, parse_kb
from .model import KnowledgeBase, Name, check_rule_safety, merge_modules
from .project import parse_project, trace
from .psa import lint_annotations, parse_annotations, requirements_of
from .reasoner import ProofTree, entails, explain, materialize
from .verifier import (
    input_digest,
    prepare_rules,
    render_report,
    render_store,
    run_verification,
)

app = FastAPI(title="qvl", version=__version__,
              description="Qualitative verification of CAD designs against "
                          "annotated principle solutions.")


@app.exception_handler(QvlError)
async def _qvl_error(request, exc: QvlError):
    detail = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        detail["file"] = exc.span.file
        detail["line"] = exc.span.line
        detail["column"] = exc.span.column
    return JSONResponse(status_code=422, content=detail)


# --------------------------------------------------------------------------
# Schemas
# --------------------------------------------------------------------------

class OntologyFile(BaseModel):
    text: str
    filename: Optional[str] = None
    namespace: Optional[str] = None

    def resolved_namespace(self) -> str:
        if self.namespace:
            return self.namespace
        if self.filename:
            return namespace_for_path(self.filename)
        return "kb"

    def label(self) -> str:
        return self.filename or f"<{self.resolved_namespace()}.kb>"


class VerifyRequest(BaseModel):
    requirements: str = Field(description="contents of a .psa file")
    design: str = Field(description="contents of an .asm file")
    ontologies: list[OntologyFile]
    root: Optional[str] = None
    report_format: Literal["text", "machine"] = "text"
    include_proofs: bool = False


class ProofNode(BaseModel):
    fact: str
    rule: Optional[str] = None
    children: list["ProofNode"] = Field(default_factory=list)


class CandidateOut(BaseModel):
    rule: str
    substitution: dict[str, str]
    satisfied: list[str]
    missing: list[str]


class ObligationOut(BaseModel):
    goal: str
    verdict: Literal["satisfied", "violated"]
    proof: Optional[ProofNode] = None
    missing_candidates: list[CandidateOut] = Field(default_factory=list)


class VerifyResponse(BaseModel):
    all_satisfied: bool
    satisfied: int
    violated: int
    obligations: list[ObligationOut]
    report: str
    warnings: list[str] = Field(default_factory=list)


class MaterializeRequest(BaseModel):
    ontologies: list[OntologyFile]
    design: Optional[str] = Field(default=None, description="optional .asm contents")
    root: Optional[str] = None


class MaterializeResponse(BaseModel):
    count: int
    facts: list[str]


class ExplainRequest(BaseModel):
    ontologies: list[OntologyFile]
    design: str
    fact: str
    root: Optional[str] = None


class ExplainResponse(BaseModel):
    derived: bool
    proof: Optional[ProofNode] = None


class TraceRequest(BaseModel):
    project: str = Field(description="contents of a .proj file")
    fragment: str
    direction: Literal["up", "down"]


class TraceResponse(BaseModel):
    fragments: list[str]


class CheckFile(BaseModel):
    name: str = Field(description="filename; the extension selects the parser")
    text: str


class CheckRequest(BaseModel):
    files: list[CheckFile]


class CheckResult(BaseModel):
    name: str
    ok: bool
    error: Optional[str] = None
    warnings: list[str] = Field(default_factory=list)


class CheckResponse(BaseModel):
    ok: bool
    results: list[CheckResult]


# --------------------------------------------------------------------------
# Helpers
# --------------------------------------------------------------------------

def _merge(entries: list[OntologyFile], root: Optional[str]) -> KnowledgeBase:
    modules: list[KnowledgeBase] = []
    for entry in entries:
        modules.extend(parse_kb(entry.text, entry.resolved_namespace(),
                                file=entry.label()))
    root_name = None
    if root is not None:
        if ":" in root:
            ns, local = root.split(":", 1)
            root_name = Name(ns, local)
        else:
            matches = [kb.name for kb in modules if kb.name.local == root]
            if len(matches) != 1:
                raise QvlError(f"root {root!r} does not name exactly one spec")
            root_name = matches[0]
    return merge_modules(modules, root_name)


def _proof_node(tree: ProofTree) -> ProofNode:
    return ProofNode(fact=str(tree.fact),
                     rule=None if tree.rule_id is None else str(tree.rule_id),
                     children=[_proof_node(c) for c in tree.children])


# --------------------------------------------------------------------------
# Endpoints
# --------------------------------------------------------------------------

@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/verify", response_model=VerifyResponse)
def verify(request: VerifyRequest) -> VerifyResponse:
    background = _merge(request.ontologies, request.root)
    digests = [input_digest(o.label(), o.text) for o in request.ontologies]
    digests.append(input_digest("design.asm", request.design))
    digests.append(input_digest("requirements.psa", request.requirements))
    abox = assembly_to_abox(parse_assembly(request.design, file="design.asm"))
    doc = parse_annotations(request.requirements, file="requirements.psa")
    run = run_verification(requirements_of(doc), abox, background, inputs=digests)

    obligations: list[ObligationOut] = []
    for obligation in run.report.obligations:
        if obligation.satisfied:
            obligations.append(ObligationOut(
                goal=str(obligation.goal), verdict="satisfied",
                proof=_proof_node(obligation.proof)))
        else:
            candidates = [
                CandidateOut(
                    rule=str(c.rule_id),
                    substitution={f"?{v}": str(t) for v, t in c.substitution},
                    satisfied=[str(a) for a in c.satisfied],
                    missing=[str(a) for a in c.missing],
                )
                for c in obligation.diagnosis.candidates
            ]
            obligations.append(ObligationOut(
                goal=str(obligation.goal), verdict="violated",
                missing_candidates=candidates))
    return VerifyResponse(
        all_satisfied=run.report.all_satisfied,
        satisfied=run.report.satisfied_count,
        violated=run.report.violated_count,
        obligations=obligations,
        report=render_report(run.report, request.report_format,
                             include_proofs=request.include_proofs),
        warnings=lint_annotations(doc),
    )


@app.post("/materialize", response_model=MaterializeResponse)
def materialize_endpoint(request: MaterializeRequest) -> MaterializeResponse:
    background = _merge(request.ontologies, request.root)
    facts = list(background.assertions)
    if request.design is not None:
        facts = list(assembly_to_abox(parse_assembly(request.design,
                                                     file="design.asm"))) + facts
    store = materialize(prepare_rules(background), facts)
    listing = render_store(store)
    return MaterializeResponse(count=len(store),
                               facts=listing.splitlines())


@app.post("/explain", response_model=ExplainResponse)
def explain_endpoint(request: ExplainRequest) -> ExplainResponse:
    background = _merge(request.ontologies, request.root)
    abox = assembly_to_abox(parse_assembly(request.design, file="design.asm"))
    store = materialize(prepare_rules(background),
                        list(abox) + list(background.assertions))
    goal = parse_ground_atom(request.fact)
    if not entails(store, goal):
        return ExplainResponse(derived=False)
    return ExplainResponse(derived=True, proof=_proof_node(explain(store, goal)))


@app.post("/trace", response_model=TraceResponse)
def trace_endpoint(request: TraceRequest) -> TraceResponse:
    graph = parse_project(request.project, "proj", file="project.proj")
    return TraceResponse(fragments=trace(graph, request.fragment, request.direction))


@app.post("/check", response_model=CheckResponse)
def check_endpoint(request: CheckRequest) -> CheckResponse:
    results: list[CheckResult] = []
    for item in request.files:
        suffix = item.name.rsplit(".", 1)[-1] if "." in item.name else ""
        try:
            warnings: list[str] = []
            if suffix == "kb":
                for kb in parse_kb(item.text, namespace_for_path(item.name),
                                   file=item.name):
                    for rule in kb.rules:
                        check_rule_safety(rule)
            elif suffix == "asm":
                parse_assembly(item.text, file=item.name)
            elif suffix == "psa":
                warnings = lint_annotations(parse_annotations(item.text, file=item.name))
            elif suffix == "proj":
                parse_project(item.text, namespace_for_path(item.name), file=item.name)
            else:
                raise QvlError(f"unknown file type: {item.name}")
            results.append(CheckResult(name=item.name, ok=True, warnings=warnings))
        except QvlError as exc:
            results.append(CheckResult(name=item.name, ok=False, error=str(exc)))
    return CheckResponse(ok=all(r.ok for r in results), results=results)
