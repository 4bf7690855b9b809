"""The user-facing layer: article verification, asynchronous solve jobs
over a parallel strategy pool with first-success semantics, hints,
explanations, and advisor training.

Shared state is limited to the job table, the proof store and the current
advisor model, each guarded by one lock and swapped whole; snapshots and
models are immutable values.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import advisor as adv
from . import analysis, corpus as cp, fol, selection, tptp
from .corpus import By, CorpusError, CorpusSnapshot, Fact, FactRef
from .prover import ExternalProver, ProofObject, ProverConfig, prove
from .selection import SineParams, SliceMode

SCHEMA_VERSION = "1"

DEFAULT_TIMEOUT_MS = 10_000
CANCELLED = "Cancelled"

# overall verdict when no strategy proves: prefer the least informative
_FAILURE_PRIORITY = (
    tptp.STATUS_TIMEOUT,
    tptp.STATUS_RESOURCEOUT,
    tptp.STATUS_GAVEUP,
    tptp.STATUS_ERROR,
)


@dataclass(frozen=True, slots=True)
class Strategy:
    name: str
    mode: SliceMode
    sine: SineParams | None = None
    config: ProverConfig = field(default_factory=ProverConfig)


@dataclass(frozen=True, slots=True)
class StrategyOutcome:
    strategy: str
    status: str  # SZS status, or Cancelled when the pool shut it down
    elapsed_ms: float
    used: tuple[str, ...] = ()
    premise_count: int = 0

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "status": self.status,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "used": list(self.used),
            "premise_count": self.premise_count,
        }


@dataclass(frozen=True, slots=True)
class SolveResult:
    status: str
    winner: str | None
    used: tuple[str, ...]
    by_clause: str | None
    outcomes: tuple[StrategyOutcome, ...]
    goal: str  # "article:label"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "winner": self.winner,
            "used": list(self.used),
            "by_clause": self.by_clause,
            "outcomes": [o.to_dict() for o in self.outcomes],
            "goal": self.goal,
        }


@dataclass(slots=True)
class Job:
    job_id: str
    kind: str  # solve | verify | probe | train
    state: str = "queued"  # queued -> running -> done | cancelled
    created: float = field(default_factory=time.time)
    finished: float | None = None
    result: dict | None = None
    error: str | None = None
    cancel_event: threading.Event = field(default_factory=threading.Event)

    def to_dict(self) -> dict:
        return {
            "id": self.job_id,
            "kind": self.kind,
            "state": self.state,
            "created": self.created,
            "finished": self.finished,
            "result": self.result,
            "error": self.error,
        }


@dataclass(frozen=True, slots=True)
class VerifyRow:
    label: str
    status: str
    elapsed_ms: float
    used: tuple[str, ...]
    by_clause: str


@dataclass(frozen=True, slots=True)
class VerifyReport:
    article: str
    rows: tuple[VerifyRow, ...]
    assumed: tuple[str, ...]
    unjustified: tuple[str, ...]
    elapsed_ms: float

    @property
    def ok(self) -> bool:
        return all(r.status == tptp.STATUS_THEOREM for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "article": self.article,
            "ok": self.ok,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "rows": [
                {
                    "label": r.label,
                    "status": r.status,
                    "elapsed_ms": round(r.elapsed_ms, 3),
                    "used": list(r.used),
                    "by_clause": r.by_clause,
                }
                for r in self.rows
            ],
            "assumed": list(self.assumed),
            "unjustified": list(self.unjustified),
        }


@dataclass(frozen=True, slots=True)
class Explanation:
    goal: str
    status: str
    raw_used: tuple[str, ...]  # typing/background facts visible
    by_clause: str | None
    links: tuple[tuple[str, str], ...]  # (article, label) per raw reference
    outcomes: tuple[StrategyOutcome, ...]

    def to_dict(self) -> dict:
        return {
            "goal": self.goal,
            "status": self.status,
            "raw_used": list(self.raw_used),
            "by_clause": self.by_clause,
            "links": [list(l) for l in self.links],
            "outcomes": [o.to_dict() for o in self.outcomes],
        }


def default_strategies(
    goal: Fact,
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    sine: SineParams | None = None,
    engine: object = "builtin",
) -> list[Strategy]:
    """The standard four-slice pool; the explicit-references strategy is
    only possible when the goal carries a by-justification."""
    params = sine if sine is not None else SineParams()
    config = ProverConfig(time_limit_ms=timeout_ms, engine=engine)
    pool = [
        Strategy("full", selection.full_library(), params, config),
        Strategy("imports", selection.imports_only(), params, config),
        Strategy("current", selection.current_article(), None, config),
    ]
    if isinstance(goal.justification, By):
        refs = tuple(FactRef(*r) for r in goal.justification.refs)
        pool.append(Strategy("by", selection.by_list(refs), None, config))
    return pool


def strategy_for_mode(goal: Fact, mode: str, timeout_ms: int,
                      sine: SineParams | None = None,
                      engine: object = "builtin") -> Strategy:
    """One-strategy pool for an explicit mode name (full|imports|current|by)."""
    config = ProverConfig(time_limit_ms=timeout_ms, engine=engine)
    if mode == "full":
        return Strategy("full", selection.full_library(), sine, config)
    if mode == "imports":
        return Strategy("imports", selection.imports_only(), sine, config)
    if mode == "current":
        return Strategy("current", selection.current_article(), None, config)
    if mode == "by":
        if not isinstance(goal.justification, By):
            raise CorpusError(f"fact {goal.label!r} has no by-justification")
        refs = tuple(FactRef(*r) for r in goal.justification.refs)
        return Strategy("by", selection.by_list(refs), None, config)
    raise ValueError(f"unknown mode {mode!r} (expected full|imports|current|by)")


def build_slice(snapshot: CorpusSnapshot, goal: Fact, strategy: Strategy) -> list[Fact]:
    """Mode slice, SInE-narrowed for the two wide modes, implicit facts
    always re-added."""
    base = selection.slice_facts(snapshot, goal, strategy.mode)
    if strategy.sine is not None and strategy.mode.kind in (
        selection.MODE_FULL,
        selection.MODE_IMPORTS,
    ):
        occ = selection.build_occurrences(snapshot, base, goal.formula)
        base = selection.sine_select(goal.formula, base, occ, strategy.sine)
        base |= selection.mandatory_facts(snapshot, goal)
        base.discard(goal)
    return analysis._ordered(base)


class HammerService:
    """Holds the corpus snapshot, advisor model, job table and proof store."""

    def __init__(
        self,
        snapshot: CorpusSnapshot,
        article_texts: dict[str, str] | None = None,
        model: adv.AdvisorModel | None = None,
        job_log: str | Path | None = None,
        default_timeout_ms: int = DEFAULT_TIMEOUT_MS,
        max_workers: int | None = None,
        external_provers: dict[str, ExternalProver] | None = None,
    ):
        self.external_provers = dict(external_provers or {})
        self.snapshot = snapshot
        self.model = model if model is not None else adv.empty_model()
        self.default_timeout_ms = default_timeout_ms
        if article_texts is None:
            article_texts = {
                art.name: tptp.render_article(
                    tptp.ArticleText(
                        art.name,
                        art.imports,
                        tuple(
                            tptp.AnnotatedFormula(f.label, f.role, f.formula, f.justification)
                            for f in art.facts
                        ),
                    )
                )
                for art in snapshot.articles.values()
            }
        self._article_texts = dict(article_texts)
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}
        self._proof_store: list[dict] = []  # {"goal", "goal_symbols", "used"}
        budget = max_workers or os.cpu_count() or 2
        self._budget = threading.BoundedSemaphore(budget)
        self._job_log = Path(job_log) if job_log is not None else None
        if self._job_log is not None and self._job_log.exists():
            self._replay_log()

    # ------------------------------------------------------------------
    # corpus access

    def resolve_goal(self, article: str, label: str) -> Fact:
        fact = self.snapshot.fact(article, label)
        if fact is None:
            raise CorpusError(f"unknown fact {article}:{label}")
        return fact

    def add_article(self, text: str) -> tuple[str, list[str], list[str]]:
        """Parse and load a new article on top of the current snapshot.

        Returns (article name, fact labels, diagnostics); on diagnostics or
        load errors nothing is swapped.
        """
        parsed = tptp.parse_article(text)
        if parsed.diagnostics:
            return parsed.name, [], [str(d) for d in parsed.diagnostics]
        texts = dict(self._article_texts)
        texts[parsed.name] = text
        snapshot = cp.load_corpus_texts(texts)
        with self._lock:
            self.snapshot = snapshot
            self._article_texts = texts
        return parsed.name, [f.label for f in parsed.facts], []

    def problem_text(self, article: str, label: str, mode: str,
                     sine: SineParams | None = None) -> str:
        goal = self.resolve_goal(article, label)
        strategy = strategy_for_mode(goal, mode, self.default_timeout_ms, sine)
        premises = build_slice(self.snapshot, goal, strategy)
        return tptp.render_problem(goal, premises)

    # ------------------------------------------------------------------
    # solving

    def run_pool(self, goal: Fact, strategies: Sequence[Strategy],
                 cancel_event: threading.Event | None = None) -> SolveResult:
        """Run all strategies concurrently; first Theorem wins and cancels
        the rest. All per-strategy verdicts are retained."""
        if not strategies:
            raise ValueError("empty strategy list")
        if len({s.name for s in strategies}) != len(strategies):
            raise ValueError("strategy names must be unique")

        snapshot = self.snapshot
        win = threading.Event()
        state_lock = threading.Lock()
        winner: list[tuple[Strategy, ProofObject]] = []
        outcomes: dict[str, StrategyOutcome] = {}

        def cancelled() -> bool:
            return win.is_set() or (cancel_event is not None and cancel_event.is_set())

        def run_one(strategy: Strategy) -> None:
            start = time.monotonic()
            with self._budget:
                if cancelled():
                    outcomes[strategy.name] = StrategyOutcome(
                        strategy.name, CANCELLED, (time.monotonic() - start) * 1000
                    )
                    return
                try:
                    premises = build_slice(snapshot, goal, strategy)
                    proof = prove(premises, goal, strategy.config, cancel=cancelled)
                except (CorpusError, ValueError) as e:
                    outcomes[strategy.name] = StrategyOutcome(
                        strategy.name, tptp.STATUS_ERROR, (time.monotonic() - start) * 1000
                    )
                    return
                elapsed = (time.monotonic() - start) * 1000
                status = CANCELLED if proof.cancelled else proof.verdict.status
                outcomes[strategy.name] = StrategyOutcome(
                    strategy.name,
                    status,
                    elapsed,
                    tuple(sorted(proof.used_fact_ids)),
                    len(premises),
                )
                if proof.verdict.status == tptp.STATUS_THEOREM:
                    with state_lock:
                        if not winner:
                            winner.append((strategy, proof))
                            win.set()

        threads = [
            threading.Thread(target=run_one, args=(s,), daemon=True) for s in strategies
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        ordered = tuple(outcomes[s.name] for s in strategies)
        if winner:
            strategy, proof = winner[0]
            used = tuple(sorted(proof.used_fact_ids))
            refs = [FactRef.parse(u) for u in used]
            by_clause = analysis.render_by_clause(snapshot, refs, goal.article)
            result = SolveResult(
                tptp.STATUS_THEOREM, strategy.name, used, by_clause, ordered, str(goal.ref)
            )
            self._record_proof(goal, proof)
            return result
        return SolveResult(
            self._overall_failure(strategies, ordered), None, (), None, ordered, str(goal.ref)
        )

    @staticmethod
    def _overall_failure(strategies: Sequence[Strategy],
                         outcomes: tuple[StrategyOutcome, ...]) -> str:
        by_name = {o.strategy: o for o in outcomes}
        for s in strategies:
            if s.mode.kind == selection.MODE_FULL:
                if by_name[s.name].status == tptp.STATUS_COUNTERSAT:
                    return tptp.STATUS_COUNTERSAT
        statuses = {o.status for o in outcomes}
        for status in _FAILURE_PRIORITY:
            if status in statuses:
                return status
        if tptp.STATUS_COUNTERSAT in statuses:
            # countersatisfiable w.r.t. a narrow slice proves nothing overall
            return tptp.STATUS_GAVEUP
        return tptp.STATUS_ERROR

    def engine_for(self, name: str | None) -> object:
        if name is None or name == "builtin":
            return "builtin"
        spec = self.external_provers.get(name)
        if spec is None:
            raise CorpusError(f"unknown prover {name!r} (not in the config file)")
        return spec

    def solve(self, article: str, label: str, mode: str | None = None,
              timeout_ms: int | None = None, sine: SineParams | None = None,
              engine: str | None = None,
              refs: Sequence[str] | None = None) -> SolveResult:
        goal = self.resolve_goal(article, label)
        limit = timeout_ms or self.default_timeout_ms
        eng = self.engine_for(engine)
        if refs is not None:
            # a caller-supplied reference list (draft by-clauses from the UI)
            mode_obj = selection.by_list([FactRef.parse(r) for r in refs])
            strategies = [Strategy("by", mode_obj, None,
                                   ProverConfig(time_limit_ms=limit, engine=eng))]
        elif mode is None:
            strategies = default_strategies(goal, limit, sine, eng)
        else:
            strategies = [strategy_for_mode(goal, mode, limit, sine, eng)]
        return self.run_pool(goal, strategies)

    # ------------------------------------------------------------------
    # jobs

    def submit_solve(self, article: str, label: str, mode: str | None = None,
                     timeout_ms: int | None = None,
                     sine: SineParams | None = None,
                     engine: str | None = None,
                     refs: Sequence[str] | None = None) -> str:
        goal = self.resolve_goal(article, label)  # fail fast, no job on error
        limit = timeout_ms or self.default_timeout_ms
        eng = self.engine_for(engine)
        if refs is not None:
            mode_obj = selection.by_list([FactRef.parse(r) for r in refs])
            strategies = [Strategy("by", mode_obj, None,
                                   ProverConfig(time_limit_ms=limit, engine=eng))]
        elif mode is None:
            strategies = default_strategies(goal, limit, sine, eng)
        else:
            strategies = [strategy_for_mode(goal, mode, limit, sine, eng)]
        job = self._new_job("solve")

        def work() -> dict:
            return self.run_pool(goal, strategies, cancel_event=job.cancel_event).to_dict()

        self._start_job(job, work)
        return job.job_id

    def submit_probe(self, article: str, timeout_ms: int | None = None) -> str:
        if article not in self.snapshot.articles:
            raise CorpusError(f"unknown article {article!r}")
        config = ProverConfig(time_limit_ms=timeout_ms or 2000)
        job = self._new_job("probe")

        def work() -> dict:
            warnings = analysis.consistency_probe(self.snapshot, article, config)
            return {
                "article": article,
                "warnings": [
                    {
                        "article": w.article,
                        "before_label": w.before_label,
                        "used": list(w.used),
                        "assumed_used": list(w.assumed_used),
                    }
                    for w in warnings
                ],
                "report": analysis.render_probe_report(warnings),
            }

        self._start_job(job, work)
        return job.job_id

    def submit_verify(self, article: str, timeout_ms: int | None = None) -> str:
        if article not in self.snapshot.articles:
            raise CorpusError(f"unknown article {article!r}")
        job = self._new_job("verify")

        def work() -> dict:
            return self.verify_article(article, timeout_ms=timeout_ms).to_dict()

        self._start_job(job, work)
        return job.job_id

    def submit_train(self) -> str:
        job = self._new_job("train")

        def work() -> dict:
            model = self.train()
            return {"proofs": model.n_proofs, "facts": len(model.uses)}

        self._start_job(job, work)
        return job.job_id

    def job(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def cancel_job(self, job_id: str) -> bool:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None or job.state in ("done", "cancelled"):
                return False
            job.cancel_event.set()
            return True

    def _new_job(self, kind: str) -> Job:
        job = Job(job_id=secrets.token_hex(8), kind=kind)
        with self._lock:
            self._jobs[job.job_id] = job
        self._log_event("submitted", job)
        return job

    def _start_job(self, job: Job, work) -> None:
        def runner() -> None:
            with self._lock:
                if job.cancel_event.is_set():
                    job.state = "cancelled"
                    job.finished = time.time()
                    self._log_event("cancelled", job)
                    return
                job.state = "running"
            try:
                result = work()
                with self._lock:
                    job.state = "cancelled" if job.cancel_event.is_set() else "done"
                    job.result = result
                    job.finished = time.time()
            except Exception as e:  # failures become job errors, not crashes
                with self._lock:
                    job.state = "done"
                    job.error = f"{type(e).__name__}: {e}"
                    job.finished = time.time()
            self._log_event(job.state, job)

        threading.Thread(target=runner, daemon=True).start()

    # ------------------------------------------------------------------
    # verification, probe, explain, hints, train

    def verify_article(self, article: str, timeout_ms: int | None = None,
                       max_workers: int | None = None) -> VerifyReport:
        art = self.snapshot.articles.get(article)
        if art is None:
            raise CorpusError(f"unknown article {article!r}")
        limit = timeout_ms or self.default_timeout_ms
        to_check = [f for f in art.facts if isinstance(f.justification, By)]
        assumed = tuple(f.label for f in art.facts if f.status == cp.STATUS_ASSUMED)
        unjustified = tuple(
            f.label for f in art.facts if f.status == cp.STATUS_UNJUSTIFIED
        )

        snapshot = self.snapshot
        start = time.monotonic()

        def check(fact: Fact) -> VerifyRow:
            strategy = strategy_for_mode(fact, "by", limit)
            premises = build_slice(snapshot, fact, strategy)
            proof = prove(premises, fact, strategy.config)
            used = tuple(sorted(proof.used_fact_ids))
            if proof.verdict.status == tptp.STATUS_THEOREM:
                refs = [FactRef.parse(u) for u in used]
                clause = analysis.render_by_clause(snapshot, refs, article)
                self._record_proof(fact, proof)
            else:
                clause = ""
            return VerifyRow(fact.label, proof.verdict.status, proof.elapsed_ms, used, clause)

        workers = max_workers or min(4, os.cpu_count() or 1)
        if workers > 1 and len(to_check) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = tuple(pool.map(check, to_check))
        else:
            rows = tuple(check(f) for f in to_check)
        elapsed = (time.monotonic() - start) * 1000
        return VerifyReport(article, rows, assumed, unjustified, elapsed)

    def probe(self, article: str, timeout_ms: int = 2000) -> list[analysis.ProbeWarning]:
        return analysis.consistency_probe(
            self.snapshot, article, ProverConfig(time_limit_ms=timeout_ms)
        )

    def explain(self, article: str, label: str,
                timeout_ms: int | None = None) -> Explanation:
        goal = self.resolve_goal(article, label)
        if not isinstance(goal.justification, By):
            raise CorpusError(f"fact {article}:{label} has no by-justification")
        result = self.solve(article, label, mode="by", timeout_ms=timeout_ms)
        links = tuple(
            (ref.article or article, ref.label)
            for ref in (FactRef.parse(u) for u in result.used)
        )
        return Explanation(
            goal=str(goal.ref),
            status=result.status if result.status == tptp.STATUS_THEOREM else "Unsolved",
            raw_used=result.used,
            by_clause=result.by_clause,
            links=links,
            outcomes=result.outcomes,
        )

    def hints(self, article: str, label: str, k: int = 10) -> list[dict]:
        start = time.monotonic()
        goal = self.resolve_goal(article, label)
        candidates = selection.slice_facts(self.snapshot, goal, selection.imports_only())
        ids = [str(f.ref) for f in candidates]
        ranked = adv.advise(self.model, fol.symbols(goal.formula), ids, k)
        elapsed = (time.monotonic() - start) * 1000
        return [
            {
                "fact": fid,
                "score": score,
                "article": FactRef.parse(fid).article,
                "label": FactRef.parse(fid).label,
                "elapsed_ms": round(elapsed, 3),
            }
            for fid, score in ranked
        ]

    def train(self, mu: float = 1.0) -> adv.AdvisorModel:
        """Rebuild the advisor from all stored Theorem outcomes and swap it
        in atomically; readers keep the old model until the swap."""
        with self._lock:
            examples = [
                (entry["goal_symbols"], entry["used"]) for entry in self._proof_store
            ]
        model = adv.train_advisor(examples, mu)
        with self._lock:
            self.model = model
        return model

    def stored_proof_count(self) -> int:
        with self._lock:
            return len(self._proof_store)

    def _record_proof(self, goal: Fact, proof: ProofObject) -> None:
        if proof.verdict.status != tptp.STATUS_THEOREM:
            return
        entry = {
            "goal": str(goal.ref),
            "goal_symbols": sorted(fol.symbols(goal.formula)),
            "used": sorted(proof.used_fact_ids),
        }
        with self._lock:
            self._proof_store.append(entry)

    # ------------------------------------------------------------------
    # append-only job log

    def _log_event(self, event: str, job: Job) -> None:
        if self._job_log is None:
            return
        line = json.dumps({"event": event, "job": job.to_dict()}, sort_keys=True)
        with self._lock:
            with open(self._job_log, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def _replay_log(self) -> None:

        for line in self._job_log.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                continue
            payload = entry.get("job", {})
            if "id" not in payload:
                continue
            job = Job(
                job_id=payload["id"],
                kind=payload.get("kind", "solve"),
                state=payload.get("state", "queued"),
                created=payload.get("created", 0.0),
                finished=payload.get("finished"),
                result=payload.get("result"),
                error=payload.get("error"),
            )
            self._jobs[job.job_id] = job
