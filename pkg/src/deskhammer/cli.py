"""Command-line front end.

The corpus comes from --corpus: a directory of .art files, a snapshot
file, or the bundled names "demo" / "demo-buggy". Machine-readable output
via --json; exit status is nonzero on verification failures, probe
warnings, and errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import advisor as adv
from . import analysis, demo, tptp
from .corpus import By, CorpusError, CorpusSnapshot, FactRef, load_corpus_texts, load_snapshot_file
from .prover import ProverConfig
from .selection import SineParams
from .service import DEFAULT_TIMEOUT_MS, HammerService


def load_corpus(spec: str) -> tuple[CorpusSnapshot, dict[str, str]]:
    """Resolve a --corpus value to (snapshot, article texts)."""
    if spec == "demo":
        texts = demo.demo_article_texts("fixed")
        return load_corpus_texts(texts), texts
    if spec == "demo-buggy":
        texts = demo.demo_article_texts("buggy")
        return load_corpus_texts(texts), texts
    path = Path(spec)
    if path.is_dir():
        texts = {
            p.stem: p.read_text(encoding="utf-8") for p in sorted(path.glob("*.art"))
        }
        if not texts:
            raise CorpusError(f"no .art files in {path}")
        return load_corpus_texts(texts), texts
    if path.is_file():
        snapshot = load_snapshot_file(path.read_text(encoding="utf-8"))
        return snapshot, {}
    raise CorpusError(f"corpus {spec!r} is neither a directory, a file, nor a bundled name")


def _goal_ref(text: str) -> tuple[str, str]:
    if ":" not in text:
        raise click.UsageError(f"expected ARTICLE:LABEL, got {text!r}")
    article, label = text.split(":", 1)
    return article, label


def _parse_sine(text: str | None) -> SineParams | None:
    if text is None:
        return None
    try:
        t_str, d_str = text.split(",", 1)
        depth = None if d_str.strip() in ("inf", "none", "unbounded") else int(d_str)
        return SineParams(tolerance=float(t_str), depth=depth)
    except ValueError as e:
        raise click.UsageError(f"--sine expects 't,d' (e.g. 1.5,3): {e}")


def _emit(ctx: click.Context, payload: dict, human: str) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(human)


@click.group()
@click.option("--corpus", default=None,
              help="Corpus: directory of .art files, snapshot file, 'demo' or "
                   "'demo-buggy'. [default: demo, or the config file's corpus]")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Service config file (JSON).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx: click.Context, corpus: str | None, config_path: str | None,
         as_json: bool) -> None:
    """Prove, verify, explain and minimize inferences over an article corpus."""
    ctx.ensure_object(dict)
    if config_path is not None:
        from .config import load_config

        ctx.obj["config"] = load_config(config_path)
    else:
        from .config import ServiceConfig

        ctx.obj["config"] = ServiceConfig()
    ctx.obj["corpus_spec"] = corpus or ctx.obj["config"].corpus
    ctx.obj["json"] = as_json
    ctx.obj["_service"] = None


def _service(ctx: click.Context) -> HammerService:
    if ctx.obj["_service"] is None:
        snapshot, texts = load_corpus(ctx.obj["corpus_spec"])
        cfg = ctx.obj["config"]
        ctx.obj["_service"] = HammerService(
            snapshot, texts,
            default_timeout_ms=cfg.default_timeout_ms,
            external_provers=cfg.provers,
        )
    return ctx.obj["_service"]


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def parse(ctx: click.Context, path: str) -> None:
    """Parse an article file and report diagnostics."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        article = tptp.parse_article(text)
    except tptp.ParseError as e:
        _emit(ctx, {"error": str(e)}, f"error: {e}")
        sys.exit(1)
    payload = {
        "article": article.name,
        "imports": list(article.imports),
        "facts": [f.label for f in article.facts],
        "diagnostics": [str(d) for d in article.diagnostics],
    }
    lines = [f"article {article.name}: {len(article.facts)} facts"]
    lines += [f"  {d}" for d in article.diagnostics]
    _emit(ctx, payload, "\n".join(lines))
    if article.diagnostics:
        sys.exit(1)


@main.command()
@click.argument("article")
@click.option("--timeout", type=int, default=DEFAULT_TIMEOUT_MS, show_default=True,
              help="Per-inference time limit (ms).")
@click.option("--workers", type=int, default=None, help="Concurrent checks.")
@click.option("--report", "report_dir", type=click.Path(file_okay=False), default=None,
              help="Write TSV + figure report into this directory.")
@click.pass_context
def verify(ctx: click.Context, article: str, timeout: int, workers: int | None,
           report_dir: str | None) -> None:
    """Check every by-justified inference of ARTICLE."""
    service = _service(ctx)
    result = service.verify_article(article, timeout_ms=timeout, max_workers=workers)
    lines = []
    for row in result.rows:
        lines.append(f"{row.label:28s} {row.status:18s} {row.elapsed_ms:8.1f}ms")
    if result.assumed:
        lines.append(f"assumed (unproven): {', '.join(result.assumed)}")
    if result.unjustified:
        lines.append(f"unjustified: {', '.join(result.unjustified)}")
    lines.append(
        f"{'PASS' if result.ok else 'FAIL'}: "
        f"{sum(1 for r in result.rows if r.status == 'Theorem')}/{len(result.rows)} "
        f"inferences closed in {result.elapsed_ms / 1000:.1f}s"
    )
    if report_dir is not None:
        from . import report as report_mod

        paths = report_mod.write_verify_report(result, report_dir)
        lines.append(f"report: {paths['tsv']} {paths['figure']}")
    _emit(ctx, result.to_dict(), "\n".join(lines))
    if not result.ok:
        sys.exit(1)


@main.command()
@click.argument("goal")
@click.option("--mode", type=click.Choice(["full", "imports", "current", "by"]),
              default=None, help="Single slice mode; default runs the whole pool.")
@click.option("--timeout", type=int, default=DEFAULT_TIMEOUT_MS, show_default=True)
@click.option("--sine", default=None, help="SInE parameters 't,d' for wide modes.")
@click.option("--engine", default=None,
              help="External prover name from the config file (default: builtin).")
@click.pass_context
def solve(ctx: click.Context, goal: str, mode: str | None, timeout: int,
          sine: str | None, engine: str | None) -> None:
    """Prove ARTICLE:LABEL with the strategy pool (or one --mode)."""
    article, label = _goal_ref(goal)
    service = _service(ctx)
    try:
        result = service.solve(article, label, mode, timeout, _parse_sine(sine),
                               engine=engine)
    except CorpusError as e:
        _emit(ctx, {"error": str(e)}, f"error: {e}")
        sys.exit(2)
    lines = [f"% SZS status {result.status}"]
    if result.winner is not None:
        lines.append(f"winner: {result.winner}")
        lines.append(f"used: {', '.join(result.used)}")
        lines.append(f"edited: {result.by_clause}")
    for o in result.outcomes:
        lines.append(f"  [{o.strategy}] {o.status} ({o.elapsed_ms:.1f}ms, "
                     f"{o.premise_count} premises)")
    _emit(ctx, result.to_dict(), "\n".join(lines))
    if result.status != tptp.STATUS_THEOREM:
        sys.exit(1)


@main.command()
@click.argument("goal")
@click.option("--timeout", type=int, default=DEFAULT_TIMEOUT_MS, show_default=True)
@click.pass_context
def minimize(ctx: click.Context, goal: str, timeout: int) -> None:
    """Drop unnecessary references from ARTICLE:LABEL's justification."""
    article, label = _goal_ref(goal)
    service = _service(ctx)
    fact = service.resolve_goal(article, label)
    if not isinstance(fact.justification, By):
        _emit(ctx, {"error": "no by-justification"}, "error: no by-justification")
        sys.exit(2)
    refs = [FactRef(*r) for r in fact.justification.refs]
    config = ProverConfig(time_limit_ms=timeout)
    try:
        kept = analysis.minimize(service.snapshot, fact, refs, config)
    except (CorpusError, ValueError) as e:
        _emit(ctx, {"error": str(e)}, f"error: {e}")
        sys.exit(1)
    clause = analysis.render_by_clause(service.snapshot, kept, article)
    dropped = [str(r) for r in refs if r not in kept]
    payload = {
        "goal": f"{article}:{label}",
        "kept": [str(r) for r in kept],
        "dropped": dropped,
        "by_clause": clause,
    }
    human = (f"kept: {', '.join(payload['kept']) or '(none)'}\n"
             f"dropped: {', '.join(dropped) or '(none)'}\n"
             f"edited: {clause}")
    _emit(ctx, payload, human)


@main.command()
@click.argument("goal")
@click.option("-k", type=int, default=10, show_default=True)
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Advisor model file (untrained model if omitted).")
@click.pass_context
def hints(ctx: click.Context, goal: str, k: int, model_path: str | None) -> None:
    """Suggest premises for ARTICLE:LABEL."""
    article, label = _goal_ref(goal)
    service = _service(ctx)
    if model_path is not None:
        service.model = adv.load_model(Path(model_path).read_text(encoding="utf-8"))
    try:
        ranked = service.hints(article, label, k)
    except CorpusError as e:
        _emit(ctx, {"error": str(e)}, f"error: {e}")
        sys.exit(2)
    lines = [f"{h['fact']:40s} {h['score']:10.4f}" for h in ranked]
    _emit(ctx, {"hints": ranked}, "\n".join(lines) or "(no candidates)")


@main.command()
@click.argument("article")
@click.option("--timeout", type=int, default=2000, show_default=True,
              help="Per-context refutation limit (ms).")
@click.option("--report", "report_dir", type=click.Path(file_okay=False), default=None)
@click.pass_context
def probe(ctx: click.Context, article: str, timeout: int, report_dir: str | None) -> None:
    """Hunt for contradictions in ARTICLE's trusted facts."""
    service = _service(ctx)
    try:
        warnings = service.probe(article, timeout_ms=timeout)
    except CorpusError as e:
        _emit(ctx, {"error": str(e)}, f"error: {e}")
        sys.exit(2)
    text = analysis.render_probe_report(warnings) or f"{article}: no contradiction found\n"
    if report_dir is not None:
        from . import report as report_mod

        paths = report_mod.write_probe_report(article, warnings, report_dir)
        text += f"report: {paths['tsv']} {paths['figure']}\n"
    payload = {
        "article": article,
        "warnings": [
            {"before_label": w.before_label, "used": list(w.used),
             "assumed_used": list(w.assumed_used)}
            for w in warnings
        ],
    }
    _emit(ctx, payload, text.rstrip("\n"))
    if warnings:
        sys.exit(1)


@main.command("export-problem")
@click.argument("goal")
@click.option("--mode", type=click.Choice(["full", "imports", "current", "by"]),
              default="by", show_default=True)
@click.option("--sine", default=None, help="SInE parameters 't,d' for wide modes.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Output file (default: ARTICLE__LABEL.p).")
@click.pass_context
def export_problem(ctx: click.Context, goal: str, mode: str, sine: str | None,
                   output: str | None) -> None:
    """Write the generated TPTP problem for ARTICLE:LABEL."""
    article, label = _goal_ref(goal)
    service = _service(ctx)
    try:
        text = service.problem_text(article, label, mode, _parse_sine(sine))
    except (CorpusError, ValueError) as e:
        _emit(ctx, {"error": str(e)}, f"error: {e}")
        sys.exit(2)
    path = Path(output) if output else Path(f"{article}__{label}.p")
    path.write_text(text, encoding="utf-8")
    _emit(ctx, {"path": str(path), "mode": mode}, f"wrote {path}")


@main.command()
@click.option("--output", type=click.Path(dir_okay=False), default="advisor_model.txt",
              show_default=True)
@click.option("--timeout", type=int, default=DEFAULT_TIMEOUT_MS, show_default=True)
@click.pass_context
def train(ctx: click.Context, output: str, timeout: int) -> None:
    """Verify the corpus, train the advisor on the proofs, write the model."""
    service = _service(ctx)
    reports = {}
    for article in service.snapshot.articles:
        reports[article] = service.verify_article(article, timeout_ms=timeout)
    model = service.train()
    Path(output).write_text(adv.save_model(model), encoding="utf-8")
    payload = {
        "proofs": model.n_proofs,
        "facts": len(model.uses),
        "model": output,
        "verified": {a: r.ok for a, r in reports.items()},
    }
    _emit(ctx, payload,
          f"trained on {model.n_proofs} proofs ({len(model.uses)} facts) -> {output}")


@main.command()
@click.option("--port", type=int, default=8870, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--corpus", "corpus_override", default=None,
              help="Corpus override for this server.")
@click.option("--job-log", type=click.Path(dir_okay=False), default=None,
              help="Append-only job log; results survive restarts.")
@click.pass_context
def serve(ctx: click.Context, port: int, host: str, corpus_override: str | None,
          job_log: str | None) -> None:
    """Run the HTTP/JSON service."""
    import uvicorn

    from .api import create_app

    if corpus_override is not None:
        ctx.obj["corpus_spec"] = corpus_override
        ctx.obj["_service"] = None
    service = _service(ctx)
    if job_log is not None:
        cfg = ctx.obj["config"]
        service = HammerService(
            service.snapshot, service._article_texts, job_log=job_log,
            default_timeout_ms=cfg.default_timeout_ms, external_provers=cfg.provers,
        )
    app = create_app(service)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
