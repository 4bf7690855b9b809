"""HTTP/JSON surface over the hammer service.

Every response carries schema_version. Long-running work (solve, probe,
train) is asynchronous: the endpoint returns a job id and GET /jobs/{id}
reports state and result.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import tptp
from .corpus import By, CorpusError
from .selection import SineParams
from .service import SCHEMA_VERSION, HammerService


class ArticleBody(BaseModel):
    text: str


class SineBody(BaseModel):
    tolerance: float = 1.5
    depth: int | None = 3


class SolveBody(BaseModel):
    article: str
    label: str
    mode: str | None = None  # full | imports | current | by; None = default pool
    timeout_ms: int | None = Field(default=None, gt=0)
    sine: SineBody | None = None
    refs: list[str] | None = None  # explicit premise references (draft by-list)


class HintsBody(BaseModel):
    article: str
    label: str
    k: int = Field(default=10, ge=1)


def _versioned(payload: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, **payload}


def _sine_params(body: SineBody | None) -> SineParams | None:
    if body is None:
        return None
    return SineParams(tolerance=body.tolerance, depth=body.depth)


def create_app(service: HammerService) -> FastAPI:
    app = FastAPI(title="deskhammer", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/articles")
    def post_article(body: ArticleBody) -> dict:
        try:
            name, labels, diagnostics = service.add_article(body.text)
        except (CorpusError, tptp.ParseError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return _versioned(
            {"article": name, "labels": labels, "diagnostics": diagnostics}
        )

    @app.get("/articles")
    def list_articles() -> dict:
        return _versioned({"articles": list(service.snapshot.articles)})

    @app.get("/articles/{article}")
    def get_article(article: str) -> dict:
        art = service.snapshot.articles.get(article)
        if art is None:
            raise HTTPException(status_code=404, detail=f"unknown article {article!r}")
        facts = []
        for f in art.facts:
            j: dict | None = None
            if isinstance(f.justification, By):
                j = {
                    "kind": "by",
                    "refs": [
                        {"article": a or article, "label": l, "local": a is None}
                        for a, l in f.justification.refs
                    ],
                }
            elif f.status == "assumed":
                j = {"kind": "assumed"}
            facts.append(
                {
                    "label": f.label,
                    "role": f.role,
                    "formula": tptp.render_formula(f.formula),
                    "status": f.status,
                    "justification": j,
                }
            )
        return _versioned(
            {"article": article, "imports": list(art.imports), "facts": facts}
        )

    @app.post("/solve")
    def post_solve(body: SolveBody) -> dict:
        try:
            job_id = service.submit_solve(
                body.article, body.label, body.mode, body.timeout_ms,
                _sine_params(body.sine), refs=body.refs,
            )
        except (CorpusError, ValueError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return _versioned({"job_id": job_id})

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        job = service.job(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return _versioned(job.to_dict())

    @app.post("/jobs/{job_id}/cancel")
    def cancel_job(job_id: str) -> dict:
        return _versioned({"cancelled": service.cancel_job(job_id)})

    @app.get("/articles/{article}/explain/{label}")
    def explain(article: str, label: str, timeout_ms: int | None = None) -> dict:
        try:
            result = service.explain(article, label, timeout_ms)
        except CorpusError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return _versioned(result.to_dict())

    @app.post("/hints")
    def hints(body: HintsBody) -> dict:
        try:
            ranked = service.hints(body.article, body.label, body.k)
        except CorpusError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return _versioned({"hints": ranked})

    @app.post("/probe/{article}")
    def probe(article: str, timeout_ms: int | None = None) -> dict:
        try:
            job_id = service.submit_probe(article, timeout_ms)
        except CorpusError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return _versioned({"job_id": job_id})

    @app.post("/train")
    def train() -> dict:
        return _versioned({"job_id": service.submit_train()})

    @app.get("/problem/{article}/{label}", response_class=PlainTextResponse)
    def problem(article: str, label: str, mode: str = "by") -> str:
        try:
            return service.problem_text(article, label, mode)
        except (CorpusError, ValueError) as e:
            raise HTTPException(status_code=400, detail=str(e))

    return app
