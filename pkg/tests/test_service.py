import threading
import time

import pytest

from deskhammer import tptp
from deskhammer.corpus import CorpusError, load_snapshot
from deskhammer.prover import ProofObject, ProverConfig
from deskhammer.selection import by_list, current_article
from deskhammer.service import (
    CANCELLED,
    HammerService,
    SolveResult,
    Strategy,
    default_strategies,
    strategy_for_mode,
)
from deskhammer.tptp import SzsVerdict


@pytest.fixture
def service(demo_snapshot):
    return HammerService(demo_snapshot)


class InstantWinEngine:
    """Returns Theorem after a short delay (long enough for strategy
    threads launched alongside to be running); records when it won."""

    def __init__(self, delay_s: float = 0.05):
        self.delay_s = delay_s
        self.won_at: float | None = None

    def __call__(self, premises, goal, config, cancel=None):
        time.sleep(self.delay_s)
        self.won_at = time.monotonic()
        return ProofObject(
            verdict=SzsVerdict(tptp.STATUS_THEOREM, None),
            used_fact_ids=frozenset(str(p.ref) for p in premises),
            derivation=None,
            elapsed_ms=self.delay_s * 1000,
        )


class SleeperEngine:
    """Instrumented engine: sleeps until cancelled, recording when it saw
    the cancellation."""

    def __init__(self, duration_s: float = 30.0):
        self.duration_s = duration_s
        self.cancelled_at: float | None = None
        self.started_at: float | None = None

    def __call__(self, premises, goal, config, cancel=None):
        self.started_at = time.monotonic()
        deadline = self.started_at + self.duration_s
        while time.monotonic() < deadline:
            if cancel is not None and cancel():
                self.cancelled_at = time.monotonic()
                return ProofObject(
                    verdict=SzsVerdict(tptp.STATUS_GAVEUP, None),
                    used_fact_ids=frozenset(),
                    derivation=None,
                    elapsed_ms=(time.monotonic() - self.started_at) * 1000,
                    cancelled=True,
                )
            time.sleep(0.002)
        return ProofObject(
            verdict=SzsVerdict(tptp.STATUS_TIMEOUT, None),
            used_fact_ids=frozenset(),
            derivation=None,
            elapsed_ms=self.duration_s * 1000,
        )


def fixed_verdict_engine(status):
    def engine(premises, goal, config, cancel=None):
        return ProofObject(SzsVerdict(status, None), frozenset(), None, 1.0)

    return engine


def test_default_pool_has_four_modes(service, demo_snapshot):
    goal = demo_snapshot.fact("graphs", "g_sub3")
    names = [s.name for s in default_strategies(goal)]
    assert names == ["full", "imports", "current", "by"]


def test_default_pool_without_justification(service, demo_snapshot):
    goal = demo_snapshot.fact("sets", "subset_def")
    names = [s.name for s in default_strategies(goal)]
    assert names == ["full", "imports", "current"]


def test_submit_unknown_goal_creates_no_job(service):
    with pytest.raises(CorpusError):
        service.submit_solve("graphs", "nothing_here")
    assert service.job("anything") is None


def test_empty_strategy_list_rejected(service, demo_snapshot):
    goal = demo_snapshot.fact("graphs", "g_sub3")
    with pytest.raises(ValueError):
        service.run_pool(goal, [])


def test_duplicate_strategy_names_rejected(service, demo_snapshot):
    goal = demo_snapshot.fact("graphs", "g_sub3")
    s = strategy_for_mode(goal, "by", 1000)
    with pytest.raises(ValueError):
        service.run_pool(goal, [s, s])


def test_first_success_cancels_sleeper(service, demo_snapshot):
    goal = demo_snapshot.fact("graphs", "g_sub3")
    sleeper = SleeperEngine()
    win = InstantWinEngine()
    strategies = [
        Strategy("win", current_article(), None, ProverConfig(engine=win)),
        Strategy("sleep", current_article(), None, ProverConfig(engine=sleeper)),
    ]
    start = time.monotonic()
    result = service.run_pool(goal, strategies)
    total = time.monotonic() - start
    assert result.status == tptp.STATUS_THEOREM
    assert result.winner == "win"
    assert total < 5.0  # far below the 30s sleeper
    assert sleeper.cancelled_at is not None
    assert sleeper.cancelled_at - win.won_at < 0.1  # cancellation within 100 ms
    statuses = {o.strategy: o.status for o in result.outcomes}
    assert statuses["sleep"] == CANCELLED


def test_used_premises_come_from_winner(service, demo_snapshot):
    goal = demo_snapshot.fact("graphs", "g_sub3_d")
    strategies = [
        strategy_for_mode(goal, "by", 10_000),
        Strategy("sleep", current_article(), None, ProverConfig(engine=SleeperEngine())),
    ]
    result = service.run_pool(goal, strategies)
    assert result.winner == "by"
    assert "sets:t_singleton_subset" in result.used


def test_all_fail_least_informative_overall(service, demo_snapshot):
    goal = demo_snapshot.fact("graphs", "g_sub3")
    strategies = [
        Strategy("e", current_article(), None,
                 ProverConfig(engine=fixed_verdict_engine(tptp.STATUS_ERROR))),
        Strategy("t", current_article(), None,
                 ProverConfig(engine=fixed_verdict_engine(tptp.STATUS_TIMEOUT))),
        Strategy("g", current_article(), None,
                 ProverConfig(engine=fixed_verdict_engine(tptp.STATUS_GAVEUP))),
    ]
    result = service.run_pool(goal, strategies)
    assert result.status == tptp.STATUS_TIMEOUT
    assert len(result.outcomes) == 3


def test_countersat_only_from_full_library(service, demo_snapshot):
    goal = demo_snapshot.fact("graphs", "g_sub3")
    narrow = Strategy("current", current_article(), None,
                      ProverConfig(engine=fixed_verdict_engine(tptp.STATUS_COUNTERSAT)))
    result = service.run_pool(goal, [narrow])
    assert result.status == tptp.STATUS_GAVEUP  # narrow saturation proves nothing

    from deskhammer.selection import full_library

    wide = Strategy("full", full_library(), None,
                    ProverConfig(engine=fixed_verdict_engine(tptp.STATUS_COUNTERSAT)))
    result = service.run_pool(goal, [wide])
    assert result.status == tptp.STATUS_COUNTERSAT


def test_solve_job_lifecycle(service):
    job_id = service.submit_solve("graphs", "g_sub3_d", mode="by")
    assert isinstance(job_id, str) and len(job_id) == 16
    for _ in range(200):
        job = service.job(job_id)
        if job.state == "done":
            break
        time.sleep(0.01)
    assert job.state == "done"
    assert job.result["status"] == tptp.STATUS_THEOREM
    assert job.result["by_clause"] == "by sets:t_singleton_subset;"


def test_job_log_survives_restart(demo_snapshot, tmp_path):
    log = tmp_path / "jobs.log"
    service = HammerService(demo_snapshot, job_log=log)
    job_id = service.submit_solve("graphs", "g_sub3_d", mode="by")
    for _ in range(200):
        if service.job(job_id).state == "done":
            break
        time.sleep(0.01)
    reborn = HammerService(demo_snapshot, job_log=log)
    job = reborn.job(job_id)
    assert job is not None
    assert job.state == "done"
    assert job.result["status"] == tptp.STATUS_THEOREM


def test_cancel_queued_job(service):
    job_id = service.submit_solve("graphs", "g_sub3", mode="full", timeout_ms=30_000)
    assert service.cancel_job(job_id)
    for _ in range(300):
        job = service.job(job_id)
        if job.state in ("done", "cancelled"):
            break
        time.sleep(0.01)
    assert job.state == "cancelled"


def test_concurrent_solves_match_serial(service, demo_snapshot):
    labels = ["g_sub3_c", "g_sub3_d", "g_sub3_e", "g_vertex_elim"]
    serial = {
        label: service.solve("graphs", label, mode="by") for label in labels
    }
    results: dict[str, SolveResult] = {}

    def work(label):
        results[label] = service.solve("graphs", label, mode="by")

    threads = [threading.Thread(target=work, args=(l,)) for l in labels]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for label in labels:
        assert results[label].status == serial[label].status
        assert results[label].used == serial[label].used
        assert results[label].by_clause == serial[label].by_clause


def test_verify_article_demo_pass(service):
    report = service.verify_article("graphs")
    assert report.ok
    assert len(report.rows) == 21
    assert set(report.assumed) == {"sg_faces", "sg1"}
    assert all(r.status == tptp.STATUS_THEOREM for r in report.rows)


def test_verify_article_mutation_fails_only_that_label(demo_snapshot):
    from deskhammer import demo as demo_mod

    texts = demo_mod.demo_article_texts("fixed")
    broken = texts["graphs"].replace(
        "by([g_vertex_elim])", "by([induced_def])", 1
    )  # wrong reference for g_sub3_c
    texts["graphs"] = broken
    from deskhammer.corpus import load_corpus_texts

    snapshot = load_corpus_texts(texts)
    service = HammerService(snapshot)
    report = service.verify_article("graphs", timeout_ms=1500)
    failed = [r.label for r in report.rows if r.status != tptp.STATUS_THEOREM]
    assert failed == ["g_sub3_c"]
    assert not report.ok


def test_verify_axioms_only_article(service):
    report = service.verify_article("background")
    assert report.ok
    assert report.rows == ()


def test_hints_fast_and_ranked(service):
    service.verify_article("sets")
    service.verify_article("graphs")
    service.train()
    start = time.monotonic()
    out = service.hints("graphs", "g_sub3", k=10)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    assert len(out) == 10
    scores = [h["score"] for h in out]
    assert scores == sorted(scores, reverse=True)


def test_hints_k_larger_than_candidates(service):
    out = service.hints("sets", "t_subset_in", k=10_000)
    assert 0 < len(out) < 10_000


def test_hints_cold_model_lexicographic(demo_snapshot):
    service = HammerService(demo_snapshot)
    out = service.hints("sets", "t_subset_refl", k=5)
    ids = [h["fact"] for h in out]
    assert ids == sorted(ids)


def test_explain_includes_type_facts_raw_but_not_edited(service):
    # g_empty_in_induced needs the induced-graph typing fact implicitly
    explanation = service.explain("graphs", "g_empty_in_induced")
    assert explanation.status == tptp.STATUS_THEOREM
    assert "graphs:ty_induced_sg" in explanation.raw_used
    assert "ty_induced_sg" not in explanation.by_clause
    assert explanation.by_clause == "by sg1;"
    assert ("graphs", "ty_induced_sg") in explanation.links


def test_explain_requires_justification(service):
    with pytest.raises(CorpusError):
        service.explain("sets", "subset_def")


def test_explain_unsolved_reports_outcomes(demo_snapshot):
    texts = {
        "base": "article(base, []).\nfof(ax, axiom, p(a)).\n"
                "fof(hard, theorem, q(z), by([ax])).\n"
    }
    from deskhammer.corpus import load_corpus_texts

    service = HammerService(load_corpus_texts(texts))
    explanation = service.explain("base", "hard", timeout_ms=500)
    assert explanation.status == "Unsolved"
    assert len(explanation.outcomes) == 1


def test_train_idempotent_and_empty(service):
    empty = service.train()
    assert empty.n_proofs == 0
    service.verify_article("sets")
    m1 = service.train()
    m2 = service.train()
    assert m1 == m2
    assert m1.n_proofs > 0


def test_add_article_swaps_snapshot(service):
    text = ("article(extra, [imports(sets)]).\n"
            "fof(x1, theorem, ![A]: subset(A,A), by([sets:t_subset_refl])).\n")
    name, labels, diagnostics = service.add_article(text)
    assert name == "extra" and labels == ["x1"] and diagnostics == []
    assert service.snapshot.fact("extra", "x1") is not None
    report = service.verify_article("extra")
    assert report.ok


def test_add_article_bad_text_no_swap(service):
    before = service.snapshot
    name, labels, diagnostics = service.add_article(
        "article(broken, []).\nfof(x, axiom, p(X)).\n"
    )
    assert diagnostics
    assert service.snapshot is before


def test_problem_text_modes(service):
    by_text = service.problem_text("graphs", "g_sub3_d", "by")
    assert "conjecture" in by_text
    assert "sets__t_singleton_subset" in by_text
    full_text = service.problem_text("graphs", "g_sub3_d", "full")
    assert len(full_text.splitlines()) >= len(by_text.splitlines())


def test_submit_verify_job(service):
    job_id = service.submit_verify("background")
    for _ in range(200):
        job = service.job(job_id)
        if job.state == "done":
            break
        time.sleep(0.01)
    assert job.kind == "verify"
    assert job.result["ok"] is True


def test_engine_selection_requires_config(service):
    with pytest.raises(CorpusError, match="unknown prover"):
        service.solve("graphs", "g_sub3_d", mode="by", engine="vampire")


def test_budget_queues_excess_strategies(demo_snapshot):
    # with one permit, the sleeper holds the budget until cancelled by the
    # winner's success, so the queued winner still gets to run
    service = HammerService(demo_snapshot, max_workers=1)
    goal = demo_snapshot.fact("graphs", "g_sub3")
    sleeper = SleeperEngine(duration_s=2.0)
    win = InstantWinEngine(delay_s=0.01)
    strategies = [
        Strategy("sleep", current_article(), None, ProverConfig(engine=sleeper)),
        Strategy("win", current_article(), None, ProverConfig(engine=win)),
    ]
    start = time.monotonic()
    result = service.run_pool(goal, strategies)
    total = time.monotonic() - start
    assert result.status == tptp.STATUS_THEOREM
    assert result.winner == "win"
    # the sleeper ran its full course before the winner could start
    assert total >= 2.0
    assert win.won_at > sleeper.started_at


def test_verify_article_deterministic(service):
    first = service.verify_article("sets")
    second = service.verify_article("sets")
    assert [(r.label, r.status) for r in first.rows] == [
        (r.label, r.status) for r in second.rows
    ]
    assert [r.used for r in first.rows] == [r.used for r in second.rows]
