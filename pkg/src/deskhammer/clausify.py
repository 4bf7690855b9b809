"""Clause form: implication elimination, NNF, Skolemization, distribution,
and equality axiomatization.

Clause-level terms use a compact encoding tuned for the saturation loop:
a variable is an int, an application is (functor, arg, ...), and a literal
is (sign, predicate, args). Equality is the predicate "=".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import fol
from .fol import Atom, Binary, Eq, Formula, Not, Quant, Var

EQ = "="

ClauseTerm = "int | tuple"
Literal = tuple  # (sign: bool, pred: str, args: tuple[ClauseTerm, ...])

ORIGIN_INPUT = "input"
ORIGIN_EQ = "eq_axiom"
ORIGIN_DERIVED = "derived"


@dataclass(frozen=True, slots=True)
class Clause:
    cid: int
    literals: tuple  # canonical: deduped, sorted, variables renumbered
    origin: tuple  # ('input', fact_id) | ('eq_axiom', tag) | ('derived', rule, parent_cids)

    @property
    def weight(self) -> int:
        return sum(_term_size(a) + 1 for _, _, args in self.literals for a in args) + len(self.literals)

    def is_empty(self) -> bool:
        return not self.literals


def _term_size(t) -> int:
    size = 0
    stack = [t]
    while stack:
        u = stack.pop()
        size += 1
        if not isinstance(u, int):
            stack.extend(u[1:])
    return size


def term_key(t):
    if isinstance(t, int):
        return (0, t)
    return (1, t[0], len(t) - 1, tuple(term_key(a) for a in t[1:]))


def literal_key(lit: Literal):
    sign, pred, args = lit
    return (pred, sign, tuple(term_key(a) for a in args))


def _renumber_term(t, mapping: dict[int, int]):
    if isinstance(t, int):
        if t not in mapping:
            mapping[t] = len(mapping)
        return mapping[t]
    return (t[0],) + tuple(_renumber_term(a, mapping) for a in t[1:])


def canonical_literals(literals: Iterable[Literal]) -> tuple:
    """Dedupe, sort, and renumber variables in first-occurrence order."""
    lits = sorted(set(literals), key=literal_key)
    mapping: dict[int, int] = {}
    return tuple(
        (sign, pred, tuple(_renumber_term(a, mapping) for a in args))
        for sign, pred, args in lits
    )


def is_tautology(literals: Sequence[Literal]) -> bool:
    # only complementary pairs: equality here is an axiomatized predicate,
    # so t=t clauses are handled by subsumption from reflexivity instead
    atoms = {(pred, args) for sign, pred, args in literals if sign}
    return any(not sign and (pred, args) in atoms for sign, pred, args in literals)


def clause_vars(literals: Iterable[Literal]) -> set[int]:
    out: set[int] = set()

    def walk(t):
        if isinstance(t, int):
            out.add(t)
        else:
            for a in t[1:]:
                walk(a)

    for _, _, args in literals:
        for a in args:
            walk(a)
    return out


# ---------------------------------------------------------------------------
# Formula -> clauses


class _Alloc:
    """Fresh-variable and fresh-Skolem-functor supply for one clausify run."""

    def __init__(self, forbidden_functors: set[str]):
        self.next_var = 0
        taken = [
            int(m.group(1))
            for f in forbidden_functors
            if (m := re.match(r"sk(\d+)\Z", f))
        ]
        self.next_sk = max(taken, default=0) + 1

    def var(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def skolem(self, args: tuple) -> tuple:
        name = f"sk{self.next_sk}"
        self.next_sk += 1
        return (name,) + args


def _nnf(f: Formula, positive: bool) -> Formula:
    """Negation normal form with implications and equivalences eliminated."""
    if isinstance(f, (Atom, Eq)):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.sub, not positive)
    if isinstance(f, Binary):
        a, b = f.left, f.right
        if f.op == "&":
            op = "&" if positive else "|"
            return Binary(op, _nnf(a, positive), _nnf(b, positive))
        if f.op == "|":
            op = "|" if positive else "&"
            return Binary(op, _nnf(a, positive), _nnf(b, positive))
        if f.op == "=>":
            if positive:
                return Binary("|", _nnf(a, False), _nnf(b, True))
            return Binary("&", _nnf(a, True), _nnf(b, False))
        if f.op == "<=>":
            if positive:
                return Binary(
                    "&",
                    Binary("|", _nnf(a, False), _nnf(b, True)),
                    Binary("|", _nnf(b, False), _nnf(a, True)),
                )
            return Binary(
                "&",
                Binary("|", _nnf(a, True), _nnf(b, True)),
                Binary("|", _nnf(a, False), _nnf(b, False)),
            )
        raise ValueError(f"unknown connective {f.op!r}")
    if isinstance(f, Quant):
        kind = f.kind if positive else (fol.EXISTS if f.kind == fol.FORALL else fol.FORALL)
        return Quant(kind, f.vars, _nnf(f.body, positive))
    raise TypeError(f"not a formula: {f!r}")


def _convert_term(t: fol.Term, env: dict[str, object]):
    if isinstance(t, Var):
        if t.name not in env:
            raise ValueError(f"free variable {t.name!r} reached clausification")
        return env[t.name]
    return (t.functor,) + tuple(_convert_term(a, env) for a in t.args)


def _cnf(f: Formula, env: dict, universals: tuple, alloc: _Alloc) -> list[list[Literal]]:
    if isinstance(f, Atom):
        return [[(True, f.pred, tuple(_convert_term(a, env) for a in f.args))]]
    if isinstance(f, Eq):
        return [[(True, EQ, (_convert_term(f.lhs, env), _convert_term(f.rhs, env)))]]
    if isinstance(f, Not):
        sub = f.sub
        if isinstance(sub, Atom):
            return [[(False, sub.pred, tuple(_convert_term(a, env) for a in sub.args))]]
        if isinstance(sub, Eq):
            return [[(False, EQ, (_convert_term(sub.lhs, env), _convert_term(sub.rhs, env)))]]
        raise ValueError("negation not in NNF")
    if isinstance(f, Binary):
        if f.op == "&":
            return _cnf(f.left, env, universals, alloc) + _cnf(f.right, env, universals, alloc)
        if f.op == "|":
            left = _cnf(f.left, env, universals, alloc)
            right = _cnf(f.right, env, universals, alloc)
            return [cl + cr for cl in left for cr in right]
        raise ValueError(f"connective {f.op!r} not in NNF")
    if isinstance(f, Quant):
        scope = dict(env)
        if f.kind == fol.FORALL:
            fresh = tuple(alloc.var() for _ in f.vars)
            scope.update(zip(f.vars, fresh))
            return _cnf(f.body, scope, universals + fresh, alloc)
        for v in f.vars:
            scope[v] = alloc.skolem(universals)
        return _cnf(f.body, scope, universals, alloc)
    raise TypeError(f"not a formula: {f!r}")


def formula_clauses(f: Formula, alloc: _Alloc, negate: bool = False) -> list[tuple]:
    """Clausify one closed formula; returns canonical literal tuples."""
    nnf = _nnf(f, not negate)
    return [canonical_literals(c) for c in _cnf(nnf, {}, (), alloc)]


def _problem_signature(clause_lits: Iterable[tuple]) -> tuple[dict[str, int], dict[str, int]]:
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}

    def walk(t):
        if isinstance(t, int):
            return
        funcs[t[0]] = len(t) - 1
        for a in t[1:]:
            walk(a)

    for lits in clause_lits:
        for sign, pred, args in lits:
            if pred != EQ:
                preds[pred] = len(args)
            for a in args:
                walk(a)
    return preds, funcs


def equality_axioms(clause_lits: Iterable[tuple]) -> list[tuple[tuple, str]]:
    """Reflexivity, symmetry, transitivity, and congruence for the symbols
    that occur in the problem. Empty when equality is absent."""
    clause_lits = list(clause_lits)
    if not any(pred == EQ for lits in clause_lits for _, pred, _ in lits):
        return []
    preds, funcs = _problem_signature(clause_lits)
    axioms: list[tuple[tuple, str]] = [
        (canonical_literals([(True, EQ, (0, 0))]), "reflexivity"),
        (canonical_literals([(False, EQ, (0, 1)), (True, EQ, (1, 0))]), "symmetry"),
        (
            canonical_literals(
                [(False, EQ, (0, 1)), (False, EQ, (1, 2)), (True, EQ, (0, 2))]
            ),
            "transitivity",
        ),
    ]
    for name in sorted(funcs):
        n = funcs[name]
        if n == 0:
            continue
        xs = tuple(range(n))
        ys = tuple(range(n, 2 * n))
        lits = [(False, EQ, (x, y)) for x, y in zip(xs, ys)]
        lits.append((True, EQ, ((name,) + xs, (name,) + ys)))
        axioms.append((canonical_literals(lits), f"congruence_{name}"))
    for name in sorted(preds):
        n = preds[name]
        if n == 0:
            continue
        xs = tuple(range(n))
        ys = tuple(range(n, 2 * n))
        lits = [(False, EQ, (x, y)) for x, y in zip(xs, ys)]
        lits.append((False, name, xs))
        lits.append((True, name, ys))
        axioms.append((canonical_literals(lits), f"congruence_{name}"))
    return axioms


def clausify(premises: Iterable, goal=None) -> list[Clause]:
    """Clausify premises plus the negated goal.

    Premises and goal carry .formula and .ref (corpus Fact does); the goal,
    when given, is negated. Equality axioms are appended when any clause
    mentions equality, tagged with origin eq_axiom.
    """
    premises = list(premises)
    forbidden: set[str] = set()
    for p in premises:
        forbidden |= {name for kind, name in fol.symbol_arities(p.formula) if kind == "func"}
    if goal is not None:
        forbidden |= {name for kind, name in fol.symbol_arities(goal.formula) if kind == "func"}
    alloc = _Alloc(forbidden)

    clauses: list[Clause] = []

    def add(lits: tuple, origin: tuple) -> None:
        clauses.append(Clause(len(clauses), lits, origin))

    for p in premises:
        for lits in formula_clauses(p.formula, alloc):
            add(lits, (ORIGIN_INPUT, str(p.ref)))
    if goal is not None:
        for lits in formula_clauses(goal.formula, alloc, negate=True):
            add(lits, (ORIGIN_INPUT, str(goal.ref)))
    for lits, tag in equality_axioms([c.literals for c in clauses]):
        add(lits, (ORIGIN_EQ, tag))
    return clauses


# ---------------------------------------------------------------------------
# Rendering clause terms back to text (derivation output, debugging)


def render_clause_term(t) -> str:
    if isinstance(t, int):
        return f"X{t}"
    if len(t) == 1:
        return t[0]
    return f"{t[0]}({','.join(render_clause_term(a) for a in t[1:])})"


def render_literal(lit: Literal) -> str:
    sign, pred, args = lit
    if pred == EQ:
        op = "=" if sign else "!="
        return f"{render_clause_term(args[0])} {op} {render_clause_term(args[1])}"
    text = render_clause_term((pred,) + args)
    return text if sign else f"~{text}"


def render_clause(literals: Sequence[Literal]) -> str:
    if not literals:
        return "$false"
    return " | ".join(render_literal(l) for l in literals)
