"""Discharging generated problems: the built-in saturation engine plus an
adapter for external SZS-speaking provers.

An engine is either the string "builtin", an ExternalProver command spec,
or (for tests and instrumentation) any callable with the prove signature.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from . import clausify as cl
from . import saturation, tptp
from .clausify import Clause
from .tptp import SzsVerdict


@dataclass(frozen=True, slots=True)
class ExternalProver:
    """Command template with {problem} and {timeout_s} placeholders."""

    name: str
    command: str


@dataclass(frozen=True, slots=True)
class ProverConfig:
    time_limit_ms: int = 10_000
    clause_limit: int = saturation.DEFAULT_CLAUSE_LIMIT
    engine: object = "builtin"  # "builtin" | ExternalProver | callable

    def __post_init__(self) -> None:
        if self.time_limit_ms <= 0:
            raise ValueError("time limit must be positive")
        if self.clause_limit <= 0:
            raise ValueError("clause limit must be positive")


@dataclass(frozen=True, slots=True)
class ProofObject:
    verdict: SzsVerdict
    used_fact_ids: frozenset[str]
    derivation: tuple[Clause, ...] | None  # clause DAG ending in falsum
    elapsed_ms: float
    used_nonminimal: bool = False  # external Theorem without a derivation
    cancelled: bool = False
    generated: int = 0
    kept: int = 0

    @property
    def status(self) -> str:
        return self.verdict.status


def prove(premises: Sequence, goal, config: ProverConfig,
          cancel: Callable[[], bool] | None = None) -> ProofObject:
    """Clausify and dispatch to the configured engine.

    used_fact_ids maps refutation leaves through the clause origins; the
    goal's own id and equality axioms are never reported as used premises.
    """
    engine = config.engine
    if engine == "builtin":
        return _prove_builtin(premises, goal, config, cancel)
    if isinstance(engine, ExternalProver):
        return _prove_external(premises, goal, config, cancel)
    if callable(engine):
        return engine(premises, goal, config, cancel)
    raise ValueError(f"unknown engine {engine!r}")


def prove_falsum(premises: Sequence, config: ProverConfig,
                 cancel: Callable[[], bool] | None = None) -> ProofObject:
    """Refute the premise set alone (no goal); used by the consistency probe."""
    base = config if config.engine == "builtin" else replace(config, engine="builtin")
    return _prove_builtin(premises, None, base, cancel)


def _prove_builtin(premises: Sequence, goal, config: ProverConfig,
                   cancel: Callable[[], bool] | None) -> ProofObject:
    clauses = cl.clausify(premises, goal)
    result = saturation.saturate(
        clauses,
        time_limit_ms=config.time_limit_ms,
        clause_limit=config.clause_limit,
        cancel=cancel,
    )
    goal_id = str(goal.ref) if goal is not None else None
    used = frozenset(i for i in result.used_input_ids if i != goal_id)
    derivation = (
        saturation.refutation_to_derivation(result.refutation)
        if result.refutation is not None
        else None
    )
    verdict = SzsVerdict(result.status, derivation)
    return ProofObject(
        verdict=verdict,
        used_fact_ids=used,
        derivation=result.refutation,
        elapsed_ms=result.elapsed_ms,
        cancelled=result.cancelled,
        generated=result.generated,
        kept=result.kept,
    )


# ---------------------------------------------------------------------------
# External provers


def run_external(spec: ExternalProver, problem_text: str, config: ProverConfig,
                 cancel: Callable[[], bool] | None = None) -> SzsVerdict:
    """Run an external prover on a problem file and parse its output.

    The wall-clock limit is enforced with a hard kill; a run that dies
    without an SZS line is an Error, a run that outlives the limit is a
    Timeout.
    """
    timeout_s = config.time_limit_ms / 1000.0
    with tempfile.NamedTemporaryFile(
        "w", suffix=".p", prefix="problem_", delete=False
    ) as handle:
        handle.write(problem_text)
        path = handle.name
    command = spec.command.format(problem=path, timeout_s=f"{timeout_s:g}")
    try:
        try:
            proc = subprocess.Popen(
                command,
                shell=True,
                stdout=subprocess.PIPE,
                stderr=subprocess.STDOUT,
                text=True,
            )
        except OSError as e:
            return SzsVerdict(tptp.STATUS_ERROR, None, (f"spawn failure: {e}",))
        deadline = time.monotonic() + timeout_s + 0.5  # grace for startup and printing
        while True:
            try:
                output, _ = proc.communicate(timeout=0.05)
                break
            except subprocess.TimeoutExpired:
                if cancel is not None and cancel():
                    _kill(proc)
                    return SzsVerdict(tptp.STATUS_GAVEUP, None, ("cancelled",))
                if time.monotonic() > deadline:
                    _kill(proc)
                    return SzsVerdict(tptp.STATUS_TIMEOUT, None, ("wall-clock limit",))
        return tptp.parse_prover_output(output or "", dialect="tstp")
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass


def _kill(proc: subprocess.Popen) -> None:
    proc.kill()
    try:
        proc.wait(timeout=5)
    except subprocess.TimeoutExpired:  # pragma: no cover - kernel-level stall
        pass


def _prove_external(premises: Sequence, goal, config: ProverConfig,
                    cancel: Callable[[], bool] | None) -> ProofObject:
    start = time.monotonic()
    problem = tptp.render_problem(goal, premises)
    verdict = run_external(config.engine, problem, config, cancel)
    elapsed = (time.monotonic() - start) * 1000.0

    used: frozenset[str] = frozenset()
    nonminimal = False
    if verdict.status == tptp.STATUS_THEOREM:
        goal_q = tptp.qualified_label(goal.article, goal.label)
        leaves = [l for l in tptp.leaf_labels(verdict) if l != goal_q]
        if verdict.derivation is None or not leaves:
            # no usable derivation: fall back to everything we provided
            used = frozenset(str(p.ref) for p in premises)
            nonminimal = True
        else:
            ids = []
            for leaf in leaves:
                split = tptp.split_qualified(leaf)
                if split is not None:
                    ids.append(f"{split[0]}:{split[1]}")
            used = frozenset(ids)
    cancelled = verdict.status == tptp.STATUS_GAVEUP and "cancelled" in verdict.warnings
    return ProofObject(
        verdict=verdict,
        used_fact_ids=used,
        derivation=None,
        elapsed_ms=elapsed,
        used_nonminimal=nonminimal,
        cancelled=cancelled,
    )


# ---------------------------------------------------------------------------
# SZS text output for the builtin engine


def render_szs(proof: ProofObject) -> str:
    """Builtin-dialect prover output: status line plus TSTP refutation."""
    lines = [f"% SZS status {proof.verdict.status}"]
    if proof.verdict.derivation:
        lines.append("% SZS output start Proof")
        for node in proof.verdict.derivation:
            if node.source[0] == "leaf":
                source = f"file('problem', {node.source[1].replace(':', tptp.QUALIFIER)})"
            elif node.source[1] == "eq_axiom":
                source = "introduced(eq_axiom)"
            else:
                parents = ",".join(node.source[2])
                source = f"inference({node.source[1]}, [], [{parents}])"
            lines.append(f"cnf({node.node_id}, plain, ({node.formula}), {source}).")
        lines.append("% SZS output end Proof")
    return "\n".join(lines) + "\n"
