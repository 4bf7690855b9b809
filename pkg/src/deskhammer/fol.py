"""First-order abstract syntax (FOF fragment with equality).

Terms and formulas are immutable values shared freely across threads.
Structural equality is exact; use alpha_equal for equality up to bound
variable renaming.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

VAR_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
FUNCTOR_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")

FORALL = "!"
EXISTS = "?"


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name})"


@dataclass(frozen=True, slots=True)
class App:
    """Function application; arity 0 is a constant."""

    functor: str
    args: tuple[Term, ...] = ()

    def __repr__(self) -> str:
        if not self.args:
            return f"App({self.functor})"
        return f"App({self.functor}, {list(self.args)})"


Term = Union[Var, App]


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True, slots=True)
class Not:
    sub: Formula


@dataclass(frozen=True, slots=True)
class Binary:
    """Binary connective: one of '&', '|', '=>', '<=>'."""

    op: str
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Quant:
    """Quantified formula; kind is '!' (forall) or '?' (exists)."""

    kind: str
    vars: tuple[str, ...]
    body: Formula

    def __post_init__(self) -> None:
        if not self.vars:
            raise ValueError("quantifier needs at least one variable")


Formula = Union[Atom, Eq, Not, Binary, Quant]

BINARY_OPS = ("&", "|", "=>", "<=>")


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.sub)
    elif isinstance(f, Binary):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Quant):
        yield from subformulas(f.body)


def atoms_of(f: Formula) -> Iterator[Formula]:
    for sub in subformulas(f):
        if isinstance(sub, (Atom, Eq)):
            yield sub


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Eq):
        return term_vars(f.lhs) | term_vars(f.rhs)
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, Binary):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quant):
        return free_vars(f.body) - set(f.vars)
    raise TypeError(f"not a formula: {f!r}")


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def term_functors(t: Term) -> set[str]:
    """All functor names in a term, constants included."""
    out: set[str] = set()
    for s in subterms(t):
        if isinstance(s, App):
            out.add(s.functor)
    return out


def symbols(f: Formula) -> set[str]:
    """Predicate and functor symbols of a formula.

    Built-in equality is not a symbol: it belongs to no article and would
    drown out every occurrence statistic.
    """
    out: set[str] = set()
    for sub in subformulas(f):
        if isinstance(sub, Atom):
            out.add(sub.pred)
            for a in sub.args:
                out |= term_functors(a)
        elif isinstance(sub, Eq):
            out |= term_functors(sub.lhs) | term_functors(sub.rhs)
    return out


def symbol_arities(f: Formula) -> dict[tuple[str, str], int]:
    """Map (kind, name) -> arity for every predicate and functor occurrence.

    kind is 'pred' or 'func'; the two namespaces are independent.
    """
    out: dict[tuple[str, str], int] = {}

    def visit_term(t: Term) -> None:
        if isinstance(t, App):
            out[("func", t.functor)] = len(t.args)
            for a in t.args:
                visit_term(a)

    for sub in subformulas(f):
        if isinstance(sub, Atom):
            out[("pred", sub.pred)] = len(sub.args)
            for a in sub.args:
                visit_term(a)
        elif isinstance(sub, Eq):
            visit_term(sub.lhs)
            visit_term(sub.rhs)
    return out


def substitute_term(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if not t.args:
        return t
    return App(t.functor, tuple(substitute_term(a, mapping) for a in t.args))


def substitute(f: Formula, mapping: dict[str, Term]) -> Formula:
    """Substitute free variables; assumes no capture (callers rename first)."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(substitute_term(a, mapping) for a in f.args))
    if isinstance(f, Eq):
        return Eq(substitute_term(f.lhs, mapping), substitute_term(f.rhs, mapping))
    if isinstance(f, Not):
        return Not(substitute(f.sub, mapping))
    if isinstance(f, Binary):
        return Binary(f.op, substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Quant):
        inner = {k: v for k, v in mapping.items() if k not in f.vars}
        return Quant(f.kind, f.vars, substitute(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def alpha_equal(f: Formula, g: Formula) -> bool:
    """Structural equality up to renaming of bound variables."""

    def terms_eq(s: Term, t: Term, env_s: dict[str, int], env_t: dict[str, int]) -> bool:
        if isinstance(s, Var) and isinstance(t, Var):
            if s.name in env_s or t.name in env_t:
                return env_s.get(s.name) == env_t.get(t.name)
            return s.name == t.name
        if isinstance(s, App) and isinstance(t, App):
            if s.functor != t.functor or len(s.args) != len(t.args):
                return False
            return all(terms_eq(a, b, env_s, env_t) for a, b in zip(s.args, t.args))
        return False

    def go(a: Formula, b: Formula, env_a: dict[str, int], env_b: dict[str, int], depth: int) -> bool:
        if isinstance(a, Atom) and isinstance(b, Atom):
            return (
                a.pred == b.pred
                and len(a.args) == len(b.args)
                and all(terms_eq(s, t, env_a, env_b) for s, t in zip(a.args, b.args))
            )
        if isinstance(a, Eq) and isinstance(b, Eq):
            return terms_eq(a.lhs, b.lhs, env_a, env_b) and terms_eq(a.rhs, b.rhs, env_a, env_b)
        if isinstance(a, Not) and isinstance(b, Not):
            return go(a.sub, b.sub, env_a, env_b, depth)
        if isinstance(a, Binary) and isinstance(b, Binary):
            return (
                a.op == b.op
                and go(a.left, b.left, env_a, env_b, depth)
                and go(a.right, b.right, env_a, env_b, depth)
            )
        if isinstance(a, Quant) and isinstance(b, Quant):
            if a.kind != b.kind or len(a.vars) != len(b.vars):
                return False
            ea, eb = dict(env_a), dict(env_b)
            for i, (va, vb) in enumerate(zip(a.vars, b.vars)):
                ea[va] = depth + i
                eb[vb] = depth + i
            return go(a.body, b.body, ea, eb, depth + len(a.vars))
        return False

    return go(f, g, {}, {}, 0)


def fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def normalize_binders(f: Formula) -> Formula:
    """Rename binders so names are unique along any root-to-leaf path.

    Free variables are never renamed; shadowing quantifiers get fresh
    uppercase names.
    """
    used = set(free_vars(f))

    def go(g: Formula, in_scope: dict[str, str]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(substitute_term(a, _var_map(in_scope)) for a in g.args))
        if isinstance(g, Eq):
            m = _var_map(in_scope)
            return Eq(substitute_term(g.lhs, m), substitute_term(g.rhs, m))
        if isinstance(g, Not):
            return Not(go(g.sub, in_scope))
        if isinstance(g, Binary):
            return Binary(g.op, go(g.left, in_scope), go(g.right, in_scope))
        if isinstance(g, Quant):
            scope = dict(in_scope)
            new_vars = []
            for v in g.vars:
                nv = fresh_name(v, used)
                used.add(nv)
                scope[v] = nv
                new_vars.append(nv)
            return Quant(g.kind, tuple(new_vars), go(g.body, scope))
        raise TypeError(f"not a formula: {g!r}")

    def _var_map(scope: dict[str, str]) -> dict[str, Term]:
        return {k: Var(v) for k, v in scope.items() if k != v}

    return go(f, {})


def forall(names: str | tuple[str, ...], body: Formula) -> Quant:
    """Convenience constructor used heavily in tests and fixtures."""
    if isinstance(names, str):
        names = (names,)
    return Quant(FORALL, tuple(names), body)


def exists(names: str | tuple[str, ...], body: Formula) -> Quant:
    if isinstance(names, str):
        names = (names,)
    return Quant(EXISTS, tuple(names), body)
