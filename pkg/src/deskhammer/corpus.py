"""The multi-article library: ordered facts, imports, reference resolution,
symbol occurrence index, and snapshot persistence.

Snapshots are immutable after load; every query below is a pure read and is
safe to share across concurrent jobs. Loading never mutates an existing
snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import fol, tptp
from .fol import Formula
from .tptp import Assumed, By, Justification

BACKGROUND_ARTICLE = "background"  # auto-imported everywhere when present

SELECTABLE_INDEX_ROLES = ("axiom", "definition", "type", "background")
MANDATORY_ROLES = ("type", "background")

STATUS_ACCEPTED = "accepted"
STATUS_ASSUMED = "assumed"
STATUS_UNJUSTIFIED = "unjustified"

SNAPSHOT_VERSION = 1


class CorpusError(Exception):
    """Corpus-level failure: bad article, broken import, reference or arity."""

    def __init__(self, message: str, details: Iterable[str] = ()):
        self.details = tuple(details)
        super().__init__(message if not self.details else message + "\n  " + "\n  ".join(self.details))


@dataclass(frozen=True, slots=True, order=True)
class FactRef:
    """Reference to a fact; article None means the current article."""

    article: str | None
    label: str

    def __str__(self) -> str:
        return self.label if self.article is None else f"{self.article}:{self.label}"

    @classmethod
    def parse(cls, text: str) -> "FactRef":
        if ":" in text:
            article, label = text.split(":", 1)
            return cls(article, label)
        return cls(None, text)


@dataclass(frozen=True, slots=True)
class Fact:
    article: str
    label: str
    role: str
    formula: Formula
    justification: Justification
    status: str
    position: int  # index within the owning article

    @property
    def id(self) -> tuple[str, str]:
        return (self.article, self.label)

    @property
    def ref(self) -> FactRef:
        return FactRef(self.article, self.label)


@dataclass(frozen=True, slots=True)
class Article:
    name: str
    imports: tuple[str, ...]
    facts: tuple[Fact, ...]
    index: dict[str, int] = field(hash=False, default_factory=dict)

    def fact(self, label: str) -> Fact | None:
        i = self.index.get(label)
        return None if i is None else self.facts[i]


@dataclass(frozen=True, slots=True)
class CorpusSnapshot:
    articles: dict[str, Article]  # insertion order = load order
    symbol_index: dict[str, int]
    arities: dict[tuple[str, str], int]

    def fact(self, ref_article: str, label: str) -> Fact | None:
        art = self.articles.get(ref_article)
        return None if art is None else art.fact(label)

    def all_facts(self) -> Iterable[Fact]:
        for art in self.articles.values():
            yield from art.facts


def _fact_status(role: str, justification: Justification) -> str:
    if isinstance(justification, Assumed):
        return STATUS_ASSUMED
    if role in ("lemma", "theorem") and justification is None:
        return STATUS_UNJUSTIFIED
    return STATUS_ACCEPTED


def load_snapshot(article_texts: Iterable[str]) -> CorpusSnapshot:
    """Parse and index an ordered list of article texts.

    Fails on parse diagnostics, duplicate articles, unknown or cyclic
    imports, unresolvable references, and corpus-wide arity clashes.
    """
    articles: dict[str, Article] = {}
    arities: dict[tuple[str, str], tuple[int, str]] = {}
    problems: list[str] = []

    for text in article_texts:
        parsed = tptp.parse_article(text)
        if parsed.diagnostics:
            raise CorpusError(
                f"article {parsed.name!r} has syntax problems",
                (str(d) for d in parsed.diagnostics),
            )
        if parsed.name in articles:
            raise CorpusError(f"article {parsed.name!r} loaded twice")
        for imp in parsed.imports:
            if imp == parsed.name:
                raise CorpusError(f"import cycle: article {parsed.name!r} imports itself")
            if imp not in articles:
                raise CorpusError(
                    f"article {parsed.name!r} imports {imp!r}, which is not loaded earlier"
                )
        facts = tuple(
            Fact(parsed.name, af.label, af.role, af.formula, af.justification,
                 _fact_status(af.role, af.justification), i)
            for i, af in enumerate(parsed.facts)
        )
        index = {f.label: f.position for f in facts}
        articles[parsed.name] = Article(parsed.name, parsed.imports, facts, index)

        for f in facts:
            for (kind, name), arity in fol.symbol_arities(f.formula).items():
                site = f"{kind} {name}/{arity} in {parsed.name}:{f.label}"
                prev = arities.get((kind, name))
                if prev is None:
                    arities[(kind, name)] = (arity, site)
                elif prev[0] != arity:
                    problems.append(f"arity clash: {prev[1]} vs {site}")
    if problems:
        raise CorpusError("corpus is inconsistent", problems)

    snapshot = CorpusSnapshot(
        articles=articles,
        symbol_index=_build_symbol_index(articles),
        arities={k: v[0] for k, v in arities.items()},
    )
    _validate_references(snapshot)
    return snapshot


def _build_symbol_index(articles: dict[str, Article]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for art in articles.values():
        for f in art.facts:
            if f.role not in SELECTABLE_INDEX_ROLES:
                continue
            for s in fol.symbols(f.formula):
                counts[s] = counts.get(s, 0) + 1
    return counts


def _validate_references(snapshot: CorpusSnapshot) -> None:
    problems = []
    for art in snapshot.articles.values():
        for f in art.facts:
            if not isinstance(f.justification, By):
                continue
            for raw in f.justification.refs:
                ref = FactRef(*raw)
                try:
                    target = resolve_reference(snapshot, art.name, ref)
                except CorpusError as e:
                    problems.append(f"{art.name}:{f.label}: {e}")
                    continue
                if target.article == art.name and target.position >= f.position:
                    problems.append(
                        f"{art.name}:{f.label}: reference {ref} does not precede the fact"
                    )
    if problems:
        raise CorpusError("unresolved references", problems)


def resolve_reference(snapshot: CorpusSnapshot, current_article: str, ref: FactRef) -> Fact:
    """Resolve a local or qualified reference from the given article."""
    if current_article not in snapshot.articles:
        raise CorpusError(f"unknown article {current_article!r}")
    target_article = ref.article if ref.article is not None else current_article
    if ref.article is not None:
        closure = import_closure(snapshot, current_article)
        if target_article not in closure:
            raise CorpusError(
                f"article {target_article!r} is not imported by {current_article!r}"
            )
    fact = snapshot.fact(target_article, ref.label)
    if fact is None:
        raise CorpusError(f"unknown label {ref.label!r} in article {target_article!r}")
    return fact


def context_before(snapshot: CorpusSnapshot, fact_id: tuple[str, str]) -> list[Fact]:
    """Facts of the same article strictly preceding fact_id, in order."""
    article, label = fact_id
    art = snapshot.articles.get(article)
    if art is None:
        raise CorpusError(f"unknown article {article!r}")
    f = art.fact(label)
    if f is None:
        raise CorpusError(f"unknown label {label!r} in article {article!r}")
    return list(art.facts[: f.position])


def import_closure(snapshot: CorpusSnapshot, article: str) -> set[str]:
    """Reflexive-transitive closure over imports, plus the global background
    article when the corpus has one."""
    if article not in snapshot.articles:
        raise CorpusError(f"unknown article {article!r}")
    out: set[str] = set()
    stack = [article]
    if BACKGROUND_ARTICLE in snapshot.articles:
        stack.append(BACKGROUND_ARTICLE)
    while stack:
        name = stack.pop()
        if name in out:
            continue
        out.add(name)
        stack.extend(snapshot.articles[name].imports)
    return out


def symbol_occurrences(snapshot: CorpusSnapshot) -> dict[str, int]:
    """Per-fact occurrence counts over axiom/definition/type/background facts."""
    return dict(snapshot.symbol_index)


# ---------------------------------------------------------------------------
# Snapshot persistence: one versioned text file


def save_snapshot(snapshot: CorpusSnapshot) -> str:
    names = ", ".join(snapshot.articles)
    parts = [f"snapshot({SNAPSHOT_VERSION}, [{names}])."]
    for art in snapshot.articles.values():
        text_facts = tuple(
            tptp.AnnotatedFormula(f.label, f.role, f.formula, f.justification)
            for f in art.facts
        )
        parts.append(tptp.render_article(tptp.ArticleText(art.name, art.imports, text_facts)))
    return "\n".join(parts)


def load_snapshot_file(text: str) -> CorpusSnapshot:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("snapshot("):
        raise CorpusError("not a snapshot file: missing manifest line")
    import re as _re

    m = _re.match(r"snapshot\((\d+),\s*\[(.*)\]\)\.\s*\Z", lines[0])
    if m is None:
        raise CorpusError("malformed snapshot manifest")
    version = int(m.group(1))
    if version != SNAPSHOT_VERSION:
        raise CorpusError(f"unsupported snapshot version {version}")
    names = [n.strip() for n in m.group(2).split(",") if n.strip()]

    body = "\n".join(lines[1:])
    chunks: list[str] = []
    current: list[str] = []
    for line in body.splitlines():
        if line.startswith("article(") and current:
            chunks.append("\n".join(current))
            current = []
        if line.strip():
            current.append(line)
    if current:
        chunks.append("\n".join(current))
    if len(chunks) != len(names):
        raise CorpusError(
            f"snapshot manifest lists {len(names)} articles but file holds {len(chunks)}"
        )
    return load_snapshot(chunks)


def load_corpus_texts(named_texts: dict[str, str]) -> CorpusSnapshot:
    """Load articles in dependency order (background first, then topological,
    alphabetical among peers). Input keys are article names."""
    order = _load_order(named_texts)
    return load_snapshot([named_texts[name] for name in order])


def _load_order(named_texts: dict[str, str]) -> list[str]:
    imports: dict[str, tuple[str, ...]] = {}
    for name, text in named_texts.items():
        parsed = tptp.parse_article(text)
        if parsed.name != name:
            raise CorpusError(f"article file {name!r} declares name {parsed.name!r}")
        imports[name] = parsed.imports

    order: list[str] = []
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(name: str, chain: tuple[str, ...]) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise CorpusError(f"import cycle: {' -> '.join(chain + (name,))}")
        if name not in imports:
            raise CorpusError(f"import of unknown article {name!r}")
        state[name] = 1
        for imp in sorted(imports[name]):
            visit(imp, chain + (name,))
        state[name] = 2
        order.append(name)

    names = sorted(imports)
    if BACKGROUND_ARTICLE in imports:
        visit(BACKGROUND_ARTICLE, ())
    for name in names:
        visit(name, ())
    return order
