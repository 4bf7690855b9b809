"""Reading and writing the article language and prover output.

Covers four surfaces:
  * FOF formula text  <->  fol.Formula
  * article files (.art): an article(Name, [imports(...)]). header followed
    by annotated formulas with an optional by([...])/assumed slot
  * standalone problems handed to provers (premise axioms + one conjecture)
  * prover output: the '% SZS status' line plus an optional TSTP derivation

Parse errors carry line/column and never abort batch parsing: an article
parse returns every fact it could read plus diagnostics for the rest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import fol
from .fol import App, Atom, Binary, Eq, Formula, Not, Quant, Term, Var

ROLES = (
    "axiom",
    "definition",
    "type",
    "background",
    "lemma",
    "theorem",
    "conjecture",
    "negated_conjecture",
)
ARTICLE_ROLES = tuple(r for r in ROLES if r not in ("conjecture", "negated_conjecture"))

# SZS statuses the artifact distinguishes; foreign status words are folded in.
STATUS_THEOREM = "Theorem"
STATUS_COUNTERSAT = "CounterSatisfiable"
STATUS_TIMEOUT = "Timeout"
STATUS_GAVEUP = "GaveUp"
STATUS_RESOURCEOUT = "ResourceOut"
STATUS_ERROR = "Error"

_SZS_WORD_MAP = {
    "Theorem": STATUS_THEOREM,
    "Unsatisfiable": STATUS_THEOREM,
    "ContradictoryAxioms": STATUS_THEOREM,
    "CounterSatisfiable": STATUS_COUNTERSAT,
    "Satisfiable": STATUS_COUNTERSAT,
    "Timeout": STATUS_TIMEOUT,
    "ResourceOut": STATUS_RESOURCEOUT,
    "MemoryOut": STATUS_RESOURCEOUT,
    "GaveUp": STATUS_GAVEUP,
    "Unknown": STATUS_GAVEUP,
    "Error": STATUS_ERROR,
    "InputError": STATUS_ERROR,
    "UsageError": STATUS_ERROR,
}

QUALIFIER = "__"  # separator for corpus-qualified labels in generated problems


class ParseError(Exception):
    """Syntax error with position information."""

    def __init__(self, message: str, line: int, col: int, expected: Sequence[str] = ()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        loc = f"{line}:{col}"
        if expected:
            super().__init__(f"{loc}: {message} (expected {', '.join(expected)})")
        else:
            super().__init__(f"{loc}: {message}")


@dataclass(frozen=True, slots=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


@dataclass(frozen=True, slots=True)
class By:
    """Explicit justification: prove from exactly these references."""

    refs: tuple[tuple[str | None, str], ...]  # (article or None, label)


@dataclass(frozen=True, slots=True)
class Assumed:
    """Unproven statement accepted on faith (only on lemma/theorem)."""


Justification = By | Assumed | None


@dataclass(frozen=True, slots=True)
class AnnotatedFormula:
    label: str
    role: str
    formula: Formula
    justification: Justification = None


@dataclass(frozen=True, slots=True)
class ArticleText:
    """Parse result for one article file."""

    name: str
    imports: tuple[str, ...]
    facts: tuple[AnnotatedFormula, ...]
    diagnostics: tuple[Diagnostic, ...] = ()


@dataclass(frozen=True, slots=True)
class DerivationNode:
    node_id: str
    formula: str  # raw formula text, kept verbatim
    source: tuple  # ('leaf', label) | ('inference', rule, parent_ids)


@dataclass(frozen=True, slots=True)
class SzsVerdict:
    status: str
    derivation: tuple[DerivationNode, ...] | None = None
    warnings: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Tokenizer


_TOKEN_RE = re.compile(
    r"""
    (?P<comment>%[^\n]*|\#[^\n]*)
  | (?P<ws>\s+)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<lower>[a-z][A-Za-z0-9_]*)
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<dollar>\$[a-z]+)
  | (?P<op><=>|<~>|=>|<=|!=|[()\[\],.:~&|?!=])
""",
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # 'lower' | 'upper' | 'quoted' | 'dollar' | 'op' | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.text != text:
            raise ParseError(f"found {t.text!r}" if t.kind != "eof" else "unexpected end of input",
                             t.line, t.col, expected=[repr(text)])
        return self.advance()

    def at(self, text: str) -> bool:
        return self.tok.text == text

    def error(self, message: str, expected: Sequence[str] = ()) -> ParseError:
        return ParseError(message, self.tok.line, self.tok.col, expected)


def _unquote(text: str) -> str:
    return text[1:-1].replace("\\'", "'").replace("\\\\", "\\")


def _name_token(cur: _Cursor, what: str) -> str:
    t = cur.tok
    if t.kind == "lower":
        cur.advance()
        return t.text
    if t.kind == "quoted":
        cur.advance()
        return _unquote(t.text)
    raise cur.error(f"found {t.text!r} where a {what} was needed", expected=["lower-case name"])


# ---------------------------------------------------------------------------
# Formula parsing


def _parse_term(cur: _Cursor) -> Term:
    t = cur.tok
    if t.kind == "upper":
        cur.advance()
        return Var(t.text)
    if t.kind in ("lower", "quoted"):
        name = _name_token(cur, "functor")
        if cur.at("("):
            cur.advance()
            args = [_parse_term(cur)]
            while cur.at(","):
                cur.advance()
                args.append(_parse_term(cur))
            cur.expect(")")
            return App(name, tuple(args))
        return App(name)
    raise cur.error(f"found {t.text!r} where a term was needed", expected=["variable", "functor"])


def _parse_unitary(cur: _Cursor) -> Formula:
    t = cur.tok
    if t.text in (fol.FORALL, fol.EXISTS):
        kind = t.text
        cur.advance()
        cur.expect("[")
        names = []
        while True:
            v = cur.tok
            if v.kind != "upper":
                raise cur.error(f"found {v.text!r} where a bound variable was needed",
                                expected=["upper-case variable"])
            cur.advance()
            names.append(v.text)
            if cur.at(","):
                cur.advance()
                continue
            break
        cur.expect("]")
        cur.expect(":")
        body = _parse_unitary(cur)
        return Quant(kind, tuple(names), body)
    if t.text == "~":
        cur.advance()
        return Not(_parse_unitary(cur))
    if t.text == "(":
        cur.advance()
        f = _parse_formula(cur)
        cur.expect(")")
        return f
    # an atom: predicate application or an equation between terms
    term = _parse_term(cur)
    if cur.at("=") or cur.at("!="):
        op = cur.advance().text
        rhs = _parse_term(cur)
        eq = Eq(term, rhs)
        return Not(eq) if op == "!=" else eq
    if isinstance(term, Var):
        raise cur.error("a variable is not a formula")
    return Atom(term.functor, term.args)


_ASSOC_OPS = ("&", "|")
_ARROW_OPS = ("=>", "<=", "<=>")


def _parse_formula(cur: _Cursor) -> Formula:
    first = _parse_unitary(cur)
    t = cur.tok
    if t.text in _ASSOC_OPS:
        op = t.text
        out = first
        while cur.at(op):
            cur.advance()
            out = Binary(op, out, _parse_unitary(cur))
        if cur.tok.text in _ASSOC_OPS + _ARROW_OPS:
            raise cur.error(f"mixed {op!r} and {cur.tok.text!r} need parentheses")
        return out
    if t.text in _ARROW_OPS:
        op = t.text
        cur.advance()
        rhs = _parse_unitary(cur)
        if cur.tok.text in _ASSOC_OPS + _ARROW_OPS:
            raise cur.error(f"{op!r} does not chain; add parentheses")
        if op == "<=":
            return Binary("=>", rhs, first)
        return Binary(op, first, rhs)
    if t.text == "<~>":
        raise cur.error("'<~>' is not supported; write the negated equivalence")
    return first


def parse_formula(text: str) -> Formula:
    """Parse one FOF formula body. Raises ParseError with position info."""
    cur = _Cursor(tokenize(text))
    f = _parse_formula(cur)
    if cur.tok.kind != "eof":
        raise cur.error(f"trailing input starting at {cur.tok.text!r}")
    return f


# ---------------------------------------------------------------------------
# Formula rendering


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    name = t.functor if fol.FUNCTOR_RE.match(t.functor) else f"'{t.functor}'"
    if not t.args:
        return name
    return f"{name}({','.join(render_term(a) for a in t.args)})"


def _needs_parens(f: Formula) -> bool:
    return isinstance(f, (Binary, Quant))


def _render(f: Formula) -> str:
    if isinstance(f, Atom):
        return render_term(App(f.pred, f.args))
    if isinstance(f, Eq):
        return f"{render_term(f.lhs)} = {render_term(f.rhs)}"
    if isinstance(f, Not):
        if isinstance(f.sub, Eq):
            return f"{render_term(f.sub.lhs)} != {render_term(f.sub.rhs)}"
        inner = _render(f.sub)
        return f"~({inner})" if _needs_parens(f.sub) else f"~{inner}"
    if isinstance(f, Binary):
        parts = []
        for side in (f.left, f.right):
            s = _render(side)
            parts.append(f"({s})" if _needs_parens(side) else s)
        return f"{parts[0]} {f.op} {parts[1]}"
    if isinstance(f, Quant):
        body = _render(f.body)
        if _needs_parens(f.body):
            body = f"({body})"
        return f"{f.kind}[{','.join(f.vars)}]: {body}"
    raise TypeError(f"not a formula: {f!r}")


def render_formula(f: Formula) -> str:
    """Deterministic text form; shadowed binders are freshened first so the
    output reparses to an alpha-equivalent formula."""
    return _render(fol.normalize_binders(f))


# ---------------------------------------------------------------------------
# Article parsing


def _parse_ref(cur: _Cursor) -> tuple[str | None, str]:
    first = _name_token(cur, "reference")
    if cur.at(":"):
        cur.advance()
        label = _name_token(cur, "reference label")
        return (first, label)
    return (None, first)


def _parse_justification(cur: _Cursor) -> Justification:
    if cur.at("assumed"):
        cur.advance()
        return Assumed()
    if cur.at("by"):
        cur.advance()
        cur.expect("(")
        cur.expect("[")
        refs: list[tuple[str | None, str]] = []
        if not cur.at("]"):
            refs.append(_parse_ref(cur))
            while cur.at(","):
                cur.advance()
                refs.append(_parse_ref(cur))
        cur.expect("]")
        cur.expect(")")
        return By(tuple(refs))
    raise cur.error(f"found {cur.tok.text!r} where a justification was needed",
                    expected=["by([...])", "assumed"])


def _parse_fof_statement(cur: _Cursor) -> AnnotatedFormula:
    cur.expect("fof")
    cur.expect("(")
    start = cur.tok
    label = _name_token(cur, "label")
    cur.expect(",")
    role = _name_token(cur, "role")
    if role not in ROLES:
        raise ParseError(f"unknown role {role!r}", start.line, start.col, expected=list(ROLES))
    cur.expect(",")
    formula = _parse_formula(cur)
    justification: Justification = None
    if cur.at(","):
        cur.advance()
        justification = _parse_justification(cur)
    cur.expect(")")
    cur.expect(".")
    return AnnotatedFormula(label, role, formula, justification)


def _skip_statement(cur: _Cursor) -> None:
    # resynchronize after an error: skip to just past the next '.'
    while cur.tok.kind != "eof":
        if cur.advance().text == ".":
            return


def _parse_header(cur: _Cursor) -> tuple[str, tuple[str, ...]]:
    cur.expect("article")
    cur.expect("(")
    name = _name_token(cur, "article name")
    cur.expect(",")
    cur.expect("[")
    imports: list[str] = []
    if cur.at("imports"):
        cur.advance()
        cur.expect("(")
        if not cur.at(")"):
            imports.append(_name_token(cur, "import"))
            while cur.at(","):
                cur.advance()
                imports.append(_name_token(cur, "import"))
        cur.expect(")")
    cur.expect("]")
    cur.expect(")")
    cur.expect(".")
    return name, tuple(imports)


def parse_article(text: str) -> ArticleText:
    """Parse an article file.

    Statement-level errors become diagnostics and parsing continues with the
    next statement; only a broken header is fatal.
    """
    cur = _Cursor(tokenize(text))
    name, imports = _parse_header(cur)
    facts: list[AnnotatedFormula] = []
    seen: set[str] = set()
    diagnostics: list[Diagnostic] = []

    while cur.tok.kind != "eof":
        pos = cur.tok
        try:
            fact = _parse_fof_statement(cur)
        except ParseError as e:
            diagnostics.append(Diagnostic(e.line, e.col, e.message))
            _skip_statement(cur)
            continue
        problems = _check_fact(fact, seen)
        if problems:
            diagnostics.extend(Diagnostic(pos.line, pos.col, p) for p in problems)
            continue
        seen.add(fact.label)
        facts.append(AnnotatedFormula(fact.label, fact.role,
                                      fol.normalize_binders(fact.formula),
                                      fact.justification))
    return ArticleText(name, imports, tuple(facts), tuple(diagnostics))


def _check_fact(fact: AnnotatedFormula, seen: set[str]) -> list[str]:
    problems = []
    if fact.label in seen:
        problems.append(f"duplicate label {fact.label!r}")
    if fact.role in ("conjecture", "negated_conjecture"):
        problems.append(f"role {fact.role!r} is reserved for generated problems")
    free = fol.free_vars(fact.formula)
    if free:
        problems.append(f"free variable(s) {', '.join(sorted(free))} in fact {fact.label!r}")
    if isinstance(fact.justification, Assumed) and fact.role not in ("lemma", "theorem"):
        problems.append(f"'assumed' is only allowed on lemma/theorem, not {fact.role!r}")
    if fact.justification is not None and fact.role in ("type", "background"):
        problems.append(f"role {fact.role!r} carries no justification")
    return problems


# ---------------------------------------------------------------------------
# Article / problem rendering


def render_justification(j: Justification) -> str:
    if j is None:
        return ""
    if isinstance(j, Assumed):
        return ", assumed"
    refs = ", ".join(label if art is None else f"{art}:{label}" for art, label in j.refs)
    return f", by([{refs}])"


def render_article(article: ArticleText) -> str:
    lines = []
    imports = f"imports({', '.join(article.imports)})" if article.imports else ""
    lines.append(f"article({article.name}, [{imports}]).")
    for f in article.facts:
        lines.append(f"fof({f.label}, {f.role}, {render_formula(f.formula)}"
                     f"{render_justification(f.justification)}).")
    return "\n".join(lines) + "\n"


def qualified_label(article: str, label: str) -> str:
    return f"{article}{QUALIFIER}{label}"


def split_qualified(qlabel: str) -> tuple[str, str] | None:
    """Invert qualified_label; None when the separator is absent."""
    if QUALIFIER not in qlabel:
        return None
    article, label = qlabel.split(QUALIFIER, 1)
    return article, label


def render_problem(conjecture, premises: Iterable) -> str:
    """Emit a standalone TPTP problem: premises as axioms, then the goal.

    Both arguments carry .article/.label/.formula (corpus Fact does).
    """
    lines = []
    taken: dict[str, tuple[str, str]] = {}
    for p in premises:
        q = qualified_label(p.article, p.label)
        if q in taken:
            raise ValueError(f"label collision after qualification: {q!r}")
        taken[q] = (p.article, p.label)
        lines.append(f"fof({q}, axiom, {render_formula(p.formula)}).")
    goal_q = qualified_label(conjecture.article, conjecture.label)
    if goal_q in taken:
        raise ValueError(f"label collision after qualification: {goal_q!r}")
    lines.append(f"fof({goal_q}, conjecture, {render_formula(conjecture.formula)}).")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Prover output (SZS status line + optional TSTP derivation block)


_SZS_STATUS_RE = re.compile(r"^\s*%?\s*SZS\s+status\s+(\w+)", re.MULTILINE)
_SZS_BLOCK_RE = re.compile(
    r"^\s*%?\s*SZS\s+output\s+start\b[^\n]*\n(.*?)^\s*%?\s*SZS\s+output\s+end\b",
    re.MULTILINE | re.DOTALL,
)


def _split_top_level(text: str) -> list[str]:
    """Split on top-level commas, respecting (), [] and single quotes."""
    parts, depth, start = [], 0, 0
    in_quote = False
    i = 0
    while i < len(text):
        c = text[i]
        if in_quote:
            if c == "\\":
                i += 2
                continue
            if c == "'":
                in_quote = False
        elif c == "'":
            in_quote = True
        elif c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif c == "," and depth == 0:
            parts.append(text[start:i].strip())
            start = i + 1
        i += 1
    parts.append(text[start:].strip())
    return parts


_ANNOTATED_RE = re.compile(r"^\s*(fof|cnf)\(", re.MULTILINE)


def _statements(block: str) -> Iterable[str]:
    """Yield the argument text of each fof(...)/cnf(...). statement."""
    for m in _ANNOTATED_RE.finditer(block):
        depth = 0
        i = m.end() - 1  # at the opening paren
        start = i + 1
        in_quote = False
        while i < len(block):
            c = block[i]
            if in_quote:
                if c == "\\":
                    i += 2
                    continue
                if c == "'":
                    in_quote = False
            elif c == "'":
                in_quote = True
            elif c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
                if depth == 0:
                    yield block[start:i]
                    break
            i += 1


def _leaf_labels_of_source(src: str) -> tuple:
    """Classify a TSTP source term."""
    src = src.strip()
    m = re.match(r"file\(\s*[^,]*,\s*([A-Za-z0-9_]+)\s*\)\Z", src)
    if m:
        return ("leaf", m.group(1))
    m = re.match(r"inference\(\s*([A-Za-z0-9_]+)\s*,", src)
    if m:
        rule = m.group(1)
        args = _split_top_level(src[src.index("(") + 1 : src.rindex(")")])
        parents: list[str] = []
        if len(args) >= 3:
            plist = args[2].strip()
            if plist.startswith("[") and plist.endswith("]"):
                for p in _split_top_level(plist[1:-1]):
                    p = p.strip()
                    if not p:
                        continue
                    nested = _leaf_labels_of_source(p)
                    if nested[0] == "inference":
                        parents.extend(nested[2])
                    elif nested[0] == "leaf":
                        parents.append(nested[1])
                    else:
                        parents.append(p)
        return ("inference", rule, tuple(parents))
    if re.match(r"introduced\(", src):
        return ("inference", "introduced", ())
    if re.match(r"[A-Za-z0-9_]+\Z", src):
        return ("inference", "copy", (src,))
    return ("inference", "unknown", ())


def _falsum_text(formula_text: str) -> bool:
    t = formula_text.strip()
    while t.startswith("(") and t.endswith(")"):
        t = t[1:-1].strip()
    return t == "$false"


def parse_prover_output(text: str, dialect: str = "tstp") -> SzsVerdict:
    """Extract the SZS verdict and, when present, the TSTP derivation.

    A missing status line yields Error; a malformed derivation keeps the
    status and records a warning instead of failing.
    """
    if dialect not in ("builtin", "tstp"):
        raise ValueError(f"unknown dialect {dialect!r}")
    warnings: list[str] = []
    m = _SZS_STATUS_RE.search(text)
    if m is None:
        excerpt = text.strip()[:200] or "<empty output>"
        return SzsVerdict(STATUS_ERROR, None, (f"no SZS status line; output was: {excerpt}",))
    word = m.group(1)
    status = _SZS_WORD_MAP.get(word)
    if status is None:
        return SzsVerdict(STATUS_ERROR, None, (f"unrecognized SZS status {word!r}",))

    block = _SZS_BLOCK_RE.search(text)
    if block is None:
        return SzsVerdict(status, None, tuple(warnings))

    nodes: list[DerivationNode] = []
    try:
        for stmt in _statements(block.group(1)):
            args = _split_top_level(stmt)
            if len(args) < 3:
                raise ValueError(f"annotated formula with {len(args)} arguments")
            node_id = args[0].strip()
            formula_text = args[2].strip()
            source = ("leaf", node_id) if len(args) < 4 else _leaf_labels_of_source(args[3])
            nodes.append(DerivationNode(node_id, formula_text, source))
        _validate_derivation(status, nodes)
    except ValueError as e:
        warnings.append(f"malformed derivation dropped: {e}")
        return SzsVerdict(status, None, tuple(warnings))
    return SzsVerdict(status, tuple(nodes), tuple(warnings))


def _validate_derivation(status: str, nodes: list[DerivationNode]) -> None:
    seen: set[str] = set()
    for n in nodes:
        if n.source[0] == "inference":
            for p in n.source[2]:
                if p not in seen:
                    raise ValueError(f"node {n.node_id!r} cites unknown parent {p!r}")
        seen.add(n.node_id)
    if status == STATUS_THEOREM and nodes:
        falsa = [n for n in nodes if _falsum_text(n.formula)]
        if len(falsa) != 1:
            raise ValueError(f"refutation must derive falsum exactly once, found {len(falsa)}")


def leaf_labels(verdict: SzsVerdict) -> tuple[str, ...]:
    """Problem labels of the derivation's leaves, in first-use order."""
    if not verdict.derivation:
        return ()
    out: list[str] = []
    for n in verdict.derivation:
        if n.source[0] == "leaf" and n.source[1] not in out:
            out.append(n.source[1])
    return tuple(out)
