"""Learned hints: a naive-Bayes ranker over (fact, goal-symbol)
co-occurrence counts harvested from stored proofs.

Models are immutable; retraining builds a fresh model that the service
swaps in atomically. Fact ids are the qualified "article:label" strings.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable

MODEL_VERSION = 1


@dataclass(frozen=True, slots=True)
class AdvisorModel:
    n_proofs: int
    uses: dict[str, int]  # fact id -> proofs using it
    cooc: dict[tuple[str, str], int]  # (fact id, goal symbol) -> joint count
    mu: float = 1.0

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ValueError("smoothing must be positive")


def empty_model(mu: float = 1.0) -> AdvisorModel:
    return AdvisorModel(0, {}, {}, mu)


def train_advisor(
    examples: Iterable[tuple[Iterable[str], Iterable[str]]], mu: float = 1.0
) -> AdvisorModel:
    """Count-based training over (goal symbols, used fact ids) pairs.

    Order-independent: the model is a pure function of the example multiset.
    """
    n = 0
    uses: dict[str, int] = {}
    cooc: dict[tuple[str, str], int] = {}
    for goal_symbols, used_ids in examples:
        n += 1
        symbols = set(goal_symbols)
        for fid in set(used_ids):
            uses[fid] = uses.get(fid, 0) + 1
            for s in symbols:
                key = (fid, s)
                cooc[key] = cooc.get(key, 0) + 1
    return AdvisorModel(n, uses, cooc, mu)


def score(model: AdvisorModel, fact_id: str, goal_symbols: Iterable[str]) -> float:
    """Log naive-Bayes relevance of one fact for a goal's symbols."""
    mu = model.mu
    u = model.uses.get(fact_id, 0)
    s = math.log((u + mu) / (model.n_proofs + 2 * mu))
    for sym in goal_symbols:
        c = model.cooc.get((fact_id, sym), 0)
        s += math.log((c + mu) / (u + 2 * mu))
    return s


def advise(
    model: AdvisorModel,
    goal_symbols: Iterable[str],
    candidates: Iterable[str],
    k: int,
) -> list[tuple[str, float]]:
    """Top-k candidates by score, ties broken by fact id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    symbols = sorted(set(goal_symbols))
    ranked = sorted(
        ((fid, score(model, fid, symbols)) for fid in set(candidates)),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return ranked[:k]


# ---------------------------------------------------------------------------
# Persistence: versioned text file of count triples


def save_model(model: AdvisorModel) -> str:
    lines = [f"advisor_model({MODEL_VERSION}, {model.n_proofs}, {model.mu!r})."]
    for fid in sorted(model.uses):
        lines.append(f"uses('{fid}', {model.uses[fid]}).")
    for fid, sym in sorted(model.cooc):
        lines.append(f"cooc('{fid}', {sym}, {model.cooc[(fid, sym)]}).")
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"advisor_model\((\d+),\s*(\d+),\s*([0-9.eE+-]+)\)\.\s*\Z")
_USES_RE = re.compile(r"uses\('([^']+)',\s*(\d+)\)\.\s*\Z")
_COOC_RE = re.compile(r"cooc\('([^']+)',\s*([A-Za-z0-9_=]+),\s*(\d+)\)\.\s*\Z")


def load_model(text: str) -> AdvisorModel:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines:
        raise ValueError("empty advisor model file")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise ValueError("missing advisor_model header")
    version = int(m.group(1))
    if version != MODEL_VERSION:
        raise ValueError(f"unsupported advisor model version {version}")
    n, mu = int(m.group(2)), float(m.group(3))
    uses: dict[str, int] = {}
    cooc: dict[tuple[str, str], int] = {}
    for line in lines[1:]:
        if (m := _USES_RE.match(line)) is not None:
            uses[m.group(1)] = int(m.group(2))
        elif (m := _COOC_RE.match(line)) is not None:
            cooc[(m.group(1), m.group(2))] = int(m.group(3))
        else:
            raise ValueError(f"unparseable advisor line: {line!r}")
    return AdvisorModel(n, uses, cooc, mu)
