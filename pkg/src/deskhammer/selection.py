"""Premise slices: the four context modes, SInE trigger-based narrowing,
and helpers for the facts every slice must carry.

Every slice is augmented with the type and background facts in scope and
never contains the goal or anything after it in its own article.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import corpus as cp
from . import fol
from .corpus import CorpusSnapshot, CorpusError, Fact, FactRef

MODE_FULL = "full_library"
MODE_IMPORTS = "imports_only"
MODE_CURRENT = "current_article"
MODE_BY = "by_list"

MODES = (MODE_FULL, MODE_IMPORTS, MODE_CURRENT, MODE_BY)


@dataclass(frozen=True, slots=True)
class SliceMode:
    kind: str
    refs: tuple[FactRef, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in MODES:
            raise ValueError(f"unknown slice mode {self.kind!r}")
        if self.refs and self.kind != MODE_BY:
            raise ValueError("explicit references only make sense for by_list")


def full_library() -> SliceMode:
    return SliceMode(MODE_FULL)


def imports_only() -> SliceMode:
    return SliceMode(MODE_IMPORTS)


def current_article() -> SliceMode:
    return SliceMode(MODE_CURRENT)


def by_list(refs: Iterable[FactRef]) -> SliceMode:
    return SliceMode(MODE_BY, tuple(refs))


@dataclass(frozen=True, slots=True)
class SineParams:
    tolerance: float = 1.5
    depth: int | None = 3  # None = unbounded

    def __post_init__(self) -> None:
        if self.tolerance < 1:
            raise ValueError("tolerance must be >= 1")
        if self.depth is not None and self.depth < 1:
            raise ValueError("depth must be >= 1 (or None for unbounded)")


def mandatory_facts(snapshot: CorpusSnapshot, goal: Fact) -> set[Fact]:
    """Type and background facts in scope of the goal: its import closure
    plus the part of its own article before it."""
    out: set[Fact] = set()
    for name in cp.import_closure(snapshot, goal.article):
        for f in snapshot.articles[name].facts:
            if f.role not in cp.MANDATORY_ROLES:
                continue
            if name == goal.article and f.position >= goal.position:
                continue
            out.add(f)
    return out


def slice_facts(snapshot: CorpusSnapshot, goal: Fact, mode: SliceMode) -> set[Fact]:
    """Candidate premises for the goal under the given mode."""
    prefix = set(cp.context_before(snapshot, goal.id))
    base: set[Fact]
    if mode.kind == MODE_FULL:
        base = {f for f in snapshot.all_facts() if f.article != goal.article} | prefix
    elif mode.kind == MODE_IMPORTS:
        closure = cp.import_closure(snapshot, goal.article) - {goal.article}
        base = {f for name in closure for f in snapshot.articles[name].facts} | prefix
    elif mode.kind == MODE_CURRENT:
        base = prefix
    else:
        base = set()
        for ref in mode.refs:
            fact = cp.resolve_reference(snapshot, goal.article, ref)
            if fact.article == goal.article and fact.position >= goal.position:
                raise CorpusError(
                    f"by-reference {ref} does not precede goal {goal.label!r}"
                )
            base.add(fact)
    return (base | mandatory_facts(snapshot, goal)) - {goal}


def sine_select(
    goal_formula: fol.Formula,
    candidates: Iterable[Fact],
    occ: Mapping[str, int],
    params: SineParams,
) -> set[Fact]:
    """Trigger-based narrowing.

    A symbol s triggers a fact F iff s occurs in F and
    occ(s) <= tolerance * min over F's symbols of occ. Starting from the
    goal's symbols, triggered facts are added level by level (their symbols
    joining the trigger set) up to the given depth. Symbols missing from
    occ count as 1, the rarest possible.
    """
    candidates = list(candidates)
    fact_syms = {f: fol.symbols(f.formula) for f in candidates}

    def occ_of(s: str) -> int:
        return occ.get(s, 1)

    triggers: dict[str, list[Fact]] = {}
    for f in candidates:
        syms = fact_syms[f]
        if not syms:
            continue
        threshold = params.tolerance * min(occ_of(s) for s in syms)
        for s in syms:
            if occ_of(s) <= threshold:
                triggers.setdefault(s, []).append(f)

    known: set[str] = set(fol.symbols(goal_formula))
    frontier = set(known)
    selected: set[Fact] = set()
    level = 0
    while frontier and (params.depth is None or level < params.depth):
        level += 1
        new_facts = {
            f
            for s in frontier
            for f in triggers.get(s, ())
            if f not in selected
        }
        if not new_facts:
            break
        selected |= new_facts
        new_syms = set()
        for f in new_facts:
            new_syms |= fact_syms[f]
        frontier = new_syms - known
        known |= new_syms
    return selected


def build_occurrences(snapshot: CorpusSnapshot, extra: Iterable[Fact] = (),
                      goal_formula: fol.Formula | None = None) -> dict[str, int]:
    """Occurrence map covering the snapshot index plus any symbols that only
    appear in the given facts or goal (counted 1, the rarest)."""
    occ = dict(snapshot.symbol_index)
    for f in extra:
        for s in fol.symbols(f.formula):
            occ.setdefault(s, 1)
    if goal_formula is not None:
        for s in fol.symbols(goal_formula):
            occ.setdefault(s, 1)
    return occ
