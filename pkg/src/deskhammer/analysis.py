"""Post-processing of proofs: used-premise extraction, cross-verification,
premise minimization, editable by-clause rendering, and the consistency
probe that hunts for contradictions introduced by trusted facts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import corpus as cp
from . import selection, tptp
from .corpus import CorpusSnapshot, CorpusError, Fact, FactRef
from .prover import ProofObject, ProverConfig, prove, prove_falsum

# roles whose facts are injected implicitly and cannot be cited in a by-clause
IMPLICIT_ROLES = cp.MANDATORY_ROLES

# facts taken on trust: anything not established by a checked justification
TRUST_ROLES = ("axiom", "definition", "type", "background")


def used_premises(proof: ProofObject) -> set[FactRef]:
    """Premise references a Theorem actually used (refutation leaves).

    Raises on non-Theorem proofs. External proofs without a derivation
    already carry the all-premises fallback in used_fact_ids.
    """
    if proof.verdict.status != tptp.STATUS_THEOREM:
        raise ValueError("used_premises requires a Theorem proof")
    return {FactRef.parse(i) for i in proof.used_fact_ids}


def cross_verify(
    snapshot: CorpusSnapshot,
    goal: Fact,
    used: Iterable[FactRef],
    config: ProverConfig,
) -> bool:
    """Re-prove the goal from exactly the claimed premises (plus the
    implicit type/background facts)."""
    premises = {
        cp.resolve_reference(snapshot, goal.article, ref) for ref in used
    }
    premises |= selection.mandatory_facts(snapshot, goal)
    premises.discard(goal)
    result = prove(_ordered(premises), goal, config)
    return result.verdict.status == tptp.STATUS_THEOREM


def minimize(
    snapshot: CorpusSnapshot,
    goal: Fact,
    premises: Sequence[FactRef],
    config: ProverConfig,
) -> list[FactRef]:
    """Greedy left-to-right premise minimization.

    Drops each premise in turn and keeps the drop iff the goal still
    proves; the result is 1-minimal for this prover and config. The
    implicit type/background facts ride along and are never dropped.
    """
    resolved = [cp.resolve_reference(snapshot, goal.article, r) for r in premises]
    mandatory = selection.mandatory_facts(snapshot, goal) - {goal}

    def proves(subset: Sequence[Fact]) -> bool:
        prem = _ordered(set(subset) | mandatory)
        return prove(prem, goal, config).verdict.status == tptp.STATUS_THEOREM

    if not proves(resolved):
        raise ValueError("cannot minimize an unproven inference")
    keep: list[tuple[FactRef, Fact]] = list(zip(premises, resolved))
    i = 0
    while i < len(keep):
        trial = [f for j, (_, f) in enumerate(keep) if j != i]
        if proves(trial):
            keep.pop(i)
        else:
            i += 1
    return [ref for ref, _ in keep]


def render_by_clause(snapshot: CorpusSnapshot, used: Iterable[FactRef],
                     current_article: str) -> str:
    """The post-edited justification text for a used-premise set.

    Implicitly available facts (type/background roles) are filtered out,
    current-article references lose their qualifier, local references come
    first in declaration order, and the rest follow sorted by qualified
    name. An empty filtered set renders as ';'.
    """
    local: list[Fact] = []
    foreign: list[Fact] = []
    for ref in used:
        fact = cp.resolve_reference(snapshot, current_article, ref)
        if fact.role in IMPLICIT_ROLES:
            continue
        if fact.article == current_article:
            local.append(fact)
        else:
            foreign.append(fact)
    local.sort(key=lambda f: f.position)
    foreign.sort(key=lambda f: (f.article, f.label))
    parts = [f.label for f in local] + [f"{f.article}:{f.label}" for f in foreign]
    if not parts:
        return ";"
    return f"by {', '.join(parts)};"


@dataclass(frozen=True, slots=True)
class ProbeWarning:
    article: str
    before_label: str  # label whose preceding context is inconsistent
    used: tuple[str, ...]  # fact ids in the refutation
    assumed_used: tuple[str, ...]  # the assumed/unjustified ones among them

    def render(self) -> str:
        used = ", ".join(self.used)
        return f"inconsistent({self.article}, {self.before_label}, used=[{used}])."


END_OF_ARTICLE = "$end"


def _is_trust_fact(fact: Fact) -> bool:
    return fact.role in TRUST_ROLES or fact.status in (
        cp.STATUS_ASSUMED,
        cp.STATUS_UNJUSTIFIED,
    )


def consistency_probe(
    snapshot: CorpusSnapshot, article: str, config: ProverConfig
) -> list[ProbeWarning]:
    """Try to refute each current-article context, assumed facts included.

    Contexts are probed where a run of trusted content ends (axioms,
    definitions, typing or background facts, assumed or unjustified
    statements); by-checked theorems in between add no trust content of
    their own. The first inconsistent context is reported and the scan
    stops there: every later context contains this one, and the used facts
    in the warning already name the culprits.
    """
    art = snapshot.articles.get(article)
    if art is None:
        raise CorpusError(f"unknown article {article!r}")

    probe_points: list[tuple[str, list[Fact]]] = []
    dirty = False
    for f in art.facts:
        if _is_trust_fact(f):
            dirty = True
            continue
        if dirty:
            probe_points.append((f.label, cp.context_before(snapshot, f.id)))
            dirty = False
    if dirty:
        probe_points.append((END_OF_ARTICLE, list(art.facts)))

    warnings: list[ProbeWarning] = []
    mandatory = _article_mandatory(snapshot, article)
    for label, context in probe_points:
        premises = _ordered(set(context) | mandatory)
        result = prove_falsum(premises, config)
        if result.verdict.status == tptp.STATUS_THEOREM:
            used = sorted(result.used_fact_ids)
            assumed = tuple(
                i
                for i in used
                if (fact := _fact_by_id(snapshot, i)) is not None
                and fact.status in (cp.STATUS_ASSUMED, cp.STATUS_UNJUSTIFIED)
            )
            warnings.append(ProbeWarning(article, label, tuple(used), assumed))
            break
    return warnings


def render_probe_report(warnings: Sequence[ProbeWarning]) -> str:
    if not warnings:
        return ""
    return "\n".join(w.render() for w in warnings) + "\n"


def _article_mandatory(snapshot: CorpusSnapshot, article: str) -> set[Fact]:
    out: set[Fact] = set()
    for name in cp.import_closure(snapshot, article):
        if name == article:
            continue
        for f in snapshot.articles[name].facts:
            if f.role in cp.MANDATORY_ROLES:
                out.add(f)
    return out


def _fact_by_id(snapshot: CorpusSnapshot, fact_id: str) -> Fact | None:
    ref = FactRef.parse(fact_id)
    if ref.article is None:
        return None
    return snapshot.fact(ref.article, ref.label)


def _ordered(facts: Iterable[Fact]) -> list[Fact]:
    """Deterministic premise order: by (article, position)."""
    return sorted(facts, key=lambda f: (f.article, f.position))
