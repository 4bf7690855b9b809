"""Given-clause saturation: binary resolution with factoring, tautology
deletion, forward subsumption, and fair age/weight clause selection.

Resolution is the ordered calculus with selection: literals are compared
by a Knuth-Bendix-style ordering; a clause either selects one negative
literal (and resolves only there, against a clause acting as the positive
premise) or, when a positive literal outweighs every negative one, exposes
only its maximal literals. This refinement is refutationally complete and
keeps definition-unfolding and equality-axiom clauses from flooding the
search with forward-chained junk.

CounterSatisfiable is claimed only on true saturation (empty passive set),
never on hitting a limit. The derivation of every kept clause is recorded
so refutations can be replayed and their input leaves extracted.
"""

from __future__ import annotations

import heapq
import sys
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from . import clausify as cl
from . import tptp
from .clausify import Clause

# rebuilding substituted terms recurses to term depth; equality chains can
# nest a few hundred levels before the weight cap stops them
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

# given-clause selection: this many weight picks for every age pick
WEIGHT_TO_AGE_RATIO = 5

DEFAULT_CLAUSE_LIMIT = 100_000

# derived clauses heavier than this are discarded; the run is then marked
# incomplete and saturation downgrades CounterSatisfiable to GaveUp
DEFAULT_WEIGHT_LIMIT = 600


@dataclass(frozen=True, slots=True)
class SaturationResult:
    status: str  # SZS status string
    refutation: tuple[Clause, ...] | None  # DAG cone ending in falsum, cid order
    used_input_ids: frozenset[str]  # fact ids of input leaves (eq axioms dropped)
    elapsed_ms: float
    generated: int
    kept: int
    cancelled: bool = False


# ---------------------------------------------------------------------------
# Unification and matching over clause terms (int = variable)


def _walk(t, subst: dict):
    while isinstance(t, int) and t in subst:
        t = subst[t]
    return t


def _occurs(v: int, t, subst: dict) -> bool:
    stack = [t]
    while stack:
        u = _walk(stack.pop(), subst)
        if isinstance(u, int):
            if u == v:
                return True
        else:
            stack.extend(u[1:])
    return False


def unify(t1, t2, subst: dict | None = None) -> dict | None:
    """Most general unifier extending subst; None if none exists."""
    if subst is None:
        subst = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, subst), _walk(b, subst)
        if a is b or a == b:
            continue
        if isinstance(a, int):
            if _occurs(a, b, subst):
                return None
            subst[a] = b
        elif isinstance(b, int):
            if _occurs(b, a, subst):
                return None
            subst[b] = a
        else:
            if a[0] != b[0] or len(a) != len(b):
                return None
            stack.extend(zip(a[1:], b[1:]))
    return subst


def unify_args(args1: tuple, args2: tuple, subst: dict | None = None) -> dict | None:
    if len(args1) != len(args2):
        return None
    subst = {} if subst is None else subst
    for a, b in zip(args1, args2):
        if unify(a, b, subst) is None:
            return None
    return subst


def apply_subst(t, subst: dict):
    t = _walk(t, subst)
    if isinstance(t, int):
        return t
    return (t[0],) + tuple(apply_subst(a, subst) for a in t[1:])


def apply_to_literals(literals: Iterable, subst: dict) -> list:
    return [
        (sign, pred, tuple(apply_subst(a, subst) for a in args))
        for sign, pred, args in literals
    ]


def offset_literals(literals: Iterable, offset: int) -> list:
    def shift(t):
        if isinstance(t, int):
            return t + offset
        return (t[0],) + tuple(shift(a) for a in t[1:])

    return [(sign, pred, tuple(shift(a) for a in args)) for sign, pred, args in literals]


# ---------------------------------------------------------------------------
# Subsumption


def _match(pattern, target, subst: dict) -> dict | None:
    """One-way match: binds pattern variables only.

    Pattern variables are negative ints (see _negate_vars), target terms
    never contain negative variables, so a binding is checked by plain
    structural equality.
    """
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, int):
            if p >= 0:  # target-space variable leaked into the pattern
                if p != t:
                    return None
            elif p in subst:
                if subst[p] != t:
                    return None
            else:
                subst[p] = t
        else:
            if isinstance(t, int) or p[0] != t[0] or len(p) != len(t):
                return None
            stack.extend(zip(p[1:], t[1:]))
    return subst


def _negate_vars(literals: Sequence) -> list:
    def neg(t):
        if isinstance(t, int):
            return -t - 1
        return (t[0],) + tuple(neg(a) for a in t[1:])

    return [(sign, pred, tuple(neg(a) for a in args)) for sign, pred, args in literals]


def literal_features(literals: Sequence) -> frozenset:
    return frozenset((sign, pred) for sign, pred, _ in literals)


def _subsumes_pattern(c_neg_lits: Sequence, d_literals: Sequence) -> bool:
    """Subsumption core; the pattern side is pre-negated via _negate_vars."""

    def backtrack(i: int, subst: dict) -> bool:
        if i == len(c_neg_lits):
            return True
        sign, pred, args = c_neg_lits[i]
        for dsign, dpred, dargs in d_literals:
            if dsign != sign or dpred != pred or len(dargs) != len(args):
                continue
            attempt = dict(subst)
            ok = True
            for pa, ta in zip(args, dargs):
                if _match(pa, ta, attempt) is None:
                    ok = False
                    break
            if ok and backtrack(i + 1, attempt):
                return True
        return False

    return backtrack(0, {})


def subsumes(c_literals: Sequence, d_literals: Sequence) -> bool:
    """True iff some substitution maps c_literals into a subset of d_literals."""
    if len(c_literals) > len(d_literals):
        return False
    return _subsumes_pattern(_negate_vars(c_literals), d_literals)


# ---------------------------------------------------------------------------
# Term and literal ordering (Knuth-Bendix style, all symbols weight 1)


def _tsize(t) -> int:
    size = 0
    stack = [t]
    while stack:
        u = stack.pop()
        size += 1
        if not isinstance(u, int):
            stack.extend(u[1:])
    return size


def _var_counts(t, counts: dict[int, int]) -> None:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, int):
            counts[u] = counts.get(u, 0) + 1
        else:
            stack.extend(u[1:])


def _covers_vars(big: dict[int, int], small: dict[int, int]) -> bool:
    return all(big.get(v, 0) >= n for v, n in small.items())


def kbo_greater(s, t) -> bool:
    """s strictly greater than t: weight first, then symbol precedence, then
    leftmost argument; variable occurrences must be covered."""
    if s == t:
        return False
    vs: dict[int, int] = {}
    vt: dict[int, int] = {}
    _var_counts(s, vs)
    _var_counts(t, vt)
    if not _covers_vars(vs, vt):
        return False
    ws, wt = _tsize(s), _tsize(t)
    if ws != wt:
        return ws > wt
    if isinstance(s, int) or isinstance(t, int):
        return False
    if s[0] != t[0]:
        return s[0] > t[0]
    for a, b in zip(s[1:], t[1:]):
        if a != b:
            return kbo_greater(a, b)
    return False


def _atom_term(lit) -> tuple:
    _, pred, args = lit
    return (pred,) + args


def literal_greater(l1, l2) -> bool:
    """l1 strictly greater than l2; a negative literal beats its own atom."""
    a1, a2 = _atom_term(l1), _atom_term(l2)
    if a1 == a2:
        return (not l1[0]) and l2[0]
    return kbo_greater(a1, a2)


def _literal_size(lit) -> int:
    return sum(_tsize(a) for a in lit[2])


def eligibility(literals: Sequence) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Indexes of literals this clause may resolve on.

    Returns (positive-premise indexes, negative-premise indexes). When a
    negative literal is selected, only it is eligible and the clause can
    act as the negative premise alone; otherwise the maximal literals are
    eligible in their respective roles.
    """
    sel = select_index(literals)
    if sel is not None:
        return ((), (sel,))
    maximal = []
    for i, lit in enumerate(literals):
        if not any(j != i and literal_greater(literals[j], lit) for j in range(len(literals))):
            maximal.append(i)
    pos = tuple(i for i in maximal if literals[i][0])
    neg = tuple(i for i in maximal if not literals[i][0])
    return (pos, neg)


def select_index(literals: Sequence) -> int | None:
    """Negative literal to select, or None.

    Nothing is selected when every negative literal is dominated by some
    positive literal: the clause then works backward through its big
    positive side instead of forward-chaining on small negative ones.
    Otherwise the largest negative literal is selected.
    """
    negs = [i for i, lit in enumerate(literals) if not lit[0]]
    if not negs:
        return None
    pos = [lit for lit in literals if lit[0]]
    if pos and all(
        any(literal_greater(p, literals[i]) for p in pos) for i in negs
    ):
        return None
    return max(negs, key=lambda i: (_literal_size(literals[i]), cl.literal_key(literals[i])))


# ---------------------------------------------------------------------------
# Inference rules


def _resolve_at(pos_clause: Clause, pos_index: int, neg_clause: Clause,
                neg_index: int) -> tuple | None:
    """Resolvent on the given literal pair, neg_clause renamed apart."""
    offset = max(cl.clause_vars(pos_clause.literals), default=-1) + 1
    neg_lits = offset_literals(neg_clause.literals, offset)
    _, pred_p, args_p = pos_clause.literals[pos_index]
    _, pred_n, args_n = neg_lits[neg_index]
    if pred_p != pred_n or len(args_p) != len(args_n):
        return None
    subst = unify_args(args_p, args_n)
    if subst is None:
        return None
    rest = [l for k, l in enumerate(pos_clause.literals) if k != pos_index]
    rest += [l for k, l in enumerate(neg_lits) if k != neg_index]
    return cl.canonical_literals(apply_to_literals(rest, subst))


def resolvents(given: Clause, other: Clause) -> Iterable[tuple[tuple, tuple]]:
    """Eligibility-restricted binary resolvents of the two clauses."""
    elig_g = eligibility(given.literals)
    elig_o = eligibility(other.literals)
    pairs = [(given, elig_g, other, elig_o)]
    if other.cid != given.cid:
        pairs.append((other, elig_o, given, elig_g))
    for pos_c, pos_e, neg_c, neg_e in pairs:
        for i in pos_e[0]:
            pred = pos_c.literals[i][1]
            for j in neg_e[1]:
                if neg_c.literals[j][1] != pred:
                    continue
                lits = _resolve_at(pos_c, i, neg_c, j)
                if lits is not None:
                    yield lits, (pos_c.cid, neg_c.cid)


def factors(given: Clause) -> Iterable[tuple]:
    """Ordered factors: unify an eligible positive literal with another
    positive literal of the same clause."""
    lits = given.literals
    pos_eligible, _ = eligibility(lits)
    for i in pos_eligible:
        _, pred_i, args_i = lits[i]
        for j in range(len(lits)):
            if j == i or not lits[j][0]:
                continue
            _, pred_j, args_j = lits[j]
            if pred_i != pred_j or len(args_i) != len(args_j):
                continue
            subst = unify_args(args_i, args_j)
            if subst is None:
                continue
            yield cl.canonical_literals(apply_to_literals(lits, subst))


# ---------------------------------------------------------------------------
# The saturation loop


class _PassiveQueue:
    """Fair selection: WEIGHT_TO_AGE_RATIO weight picks, then one age pick."""

    def __init__(self) -> None:
        self.by_weight: list[tuple[int, int]] = []
        self.by_age: deque[int] = deque()
        self.ticker = 0
        self.members: set[int] = set()

    def push(self, clause: Clause) -> None:
        heapq.heappush(self.by_weight, (clause.weight, clause.cid))
        self.by_age.append(clause.cid)
        self.members.add(clause.cid)

    def _pop_weight(self) -> int | None:
        while self.by_weight:
            cid = heapq.heappop(self.by_weight)[1]
            if cid in self.members:
                return cid
        return None

    def _pop_age(self) -> int | None:
        while self.by_age:
            cid = self.by_age.popleft()
            if cid in self.members:
                return cid
        return None

    def pop(self) -> int | None:
        if not self.members:
            return None
        self.ticker += 1
        if self.ticker % (WEIGHT_TO_AGE_RATIO + 1) == 0:
            cid = self._pop_age()
            if cid is None:
                cid = self._pop_weight()
        else:
            cid = self._pop_weight()
            if cid is None:
                cid = self._pop_age()
        if cid is not None:
            self.members.discard(cid)
        return cid

    def __len__(self) -> int:
        return len(self.members)


def saturate(
    clauses: Sequence[Clause],
    time_limit_ms: float = 10_000,
    clause_limit: int = DEFAULT_CLAUSE_LIMIT,
    weight_limit: int = DEFAULT_WEIGHT_LIMIT,
    cancel: Callable[[], bool] | None = None,
) -> SaturationResult:
    start = time.monotonic()
    deadline = start + time_limit_ms / 1000.0

    record: dict[int, Clause] = {}
    elig: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    next_cid = 0
    kept: list[tuple[tuple, frozenset, int]] = []  # (negated-var literals, features, size)
    seen_exact: set[tuple] = set()
    passive = _PassiveQueue()
    # partner indexes over activated clauses, by predicate of eligible literals
    active_pos: dict[str, list[tuple[int, int]]] = {}
    active_neg: dict[str, list[tuple[int, int]]] = {}
    generated = 0
    dropped_by_weight = False

    def elapsed_ms() -> float:
        return (time.monotonic() - start) * 1000.0

    def finish(status: str, refutation=None, used=frozenset(), cancelled=False) -> SaturationResult:
        return SaturationResult(
            status, refutation, used, elapsed_ms(), generated, len(record), cancelled
        )

    def keep(literals: tuple, origin: tuple) -> Clause | None:
        """Apply retention tests; returns the kept clause (None if discarded)."""
        nonlocal next_cid, dropped_by_weight
        if literals in seen_exact:
            return None
        if cl.is_tautology(literals):
            return None
        if origin[0] == cl.ORIGIN_DERIVED and sum(
            _tsize(a) + 1 for _, _, args in literals for a in args
        ) > weight_limit:
            dropped_by_weight = True
            return None
        features = literal_features(literals)
        size = len(literals)
        for old_neg, old_features, old_size in kept:
            if old_size <= size and old_features <= features and _subsumes_pattern(old_neg, literals):
                return None
        clause = Clause(next_cid, literals, origin)
        next_cid += 1
        record[clause.cid] = clause
        elig[clause.cid] = eligibility(literals)
        kept.append((tuple(_negate_vars(literals)), features, size))
        seen_exact.add(literals)
        passive.push(clause)
        return clause

    for c in clauses:
        fresh = keep(c.literals, c.origin)
        generated += 1
        if fresh is not None and fresh.is_empty():
            cone = _refutation_cone(fresh.cid, record)
            return finish(tptp.STATUS_THEOREM, cone, _used_inputs(cone))

    while True:
        if cancel is not None and cancel():
            return finish(tptp.STATUS_GAVEUP, cancelled=True)
        if time.monotonic() > deadline:
            return finish(tptp.STATUS_TIMEOUT)
        if len(record) > clause_limit:
            return finish(tptp.STATUS_RESOURCEOUT)

        cid = passive.pop()
        if cid is None:
            # true saturation only: discarding overweight clauses forfeits
            # the right to call the set countersatisfiable
            if dropped_by_weight:
                return finish(tptp.STATUS_GAVEUP)
            return finish(tptp.STATUS_COUNTERSAT)
        given = record[cid]
        pos_idx, neg_idx = elig[cid]

        new: list[tuple[tuple, tuple]] = []
        overdue = 0
        for lits in factors(given):
            new.append((lits, (cl.ORIGIN_DERIVED, "factor", (given.cid,))))
        for i in pos_idx:
            pred = given.literals[i][1]
            for other_cid, j in active_neg.get(pred, ()):
                overdue += 1
                if overdue % 512 == 0 and time.monotonic() > deadline:
                    return finish(tptp.STATUS_TIMEOUT)
                lits = _resolve_at(given, i, record[other_cid], j)
                if lits is not None:
                    new.append((lits, (cl.ORIGIN_DERIVED, "resolution", (given.cid, other_cid))))
        for j in neg_idx:
            pred = given.literals[j][1]
            for other_cid, i in active_pos.get(pred, ()):
                overdue += 1
                if overdue % 512 == 0 and time.monotonic() > deadline:
                    return finish(tptp.STATUS_TIMEOUT)
                lits = _resolve_at(record[other_cid], i, given, j)
                if lits is not None:
                    new.append((lits, (cl.ORIGIN_DERIVED, "resolution", (other_cid, given.cid))))

        # activate after generating so the given never pairs with itself twice
        for i in pos_idx:
            active_pos.setdefault(given.literals[i][1], []).append((given.cid, i))
        for j in neg_idx:
            active_neg.setdefault(given.literals[j][1], []).append((given.cid, j))
        # self-resolution (renamed copy) for clauses eligible on both sides
        if pos_idx and neg_idx:
            for i in pos_idx:
                pred = given.literals[i][1]
                for j in neg_idx:
                    if given.literals[j][1] != pred:
                        continue
                    lits = _resolve_at(given, i, given, j)
                    if lits is not None:
                        new.append((lits, (cl.ORIGIN_DERIVED, "resolution", (given.cid, given.cid))))

        for lits, origin in new:
            # retention tests dominate late iterations; honor the deadline
            # per clause instead of overshooting by whole given rounds
            if time.monotonic() > deadline:
                return finish(tptp.STATUS_TIMEOUT)
            generated += 1
            fresh = keep(lits, origin)
            if fresh is not None and fresh.is_empty():
                cone = _refutation_cone(fresh.cid, record)
                return finish(tptp.STATUS_THEOREM, cone, _used_inputs(cone))


def _refutation_cone(falsum_cid: int, record: dict[int, Clause]) -> tuple[Clause, ...]:
    """All clauses reachable backwards from falsum, in cid order."""
    seen: set[int] = set()
    stack = [falsum_cid]
    while stack:
        cid = stack.pop()
        if cid in seen:
            continue
        seen.add(cid)
        origin = record[cid].origin
        if origin[0] == cl.ORIGIN_DERIVED:
            stack.extend(origin[2])
    return tuple(record[cid] for cid in sorted(seen))


def _used_inputs(cone: Iterable[Clause]) -> frozenset[str]:
    return frozenset(
        c.origin[1] for c in cone if c.origin[0] == cl.ORIGIN_INPUT
    )


def refutation_to_derivation(cone: Sequence[Clause]) -> tuple[tptp.DerivationNode, ...]:
    """Render a clause DAG as TSTP-style derivation nodes (builtin dialect)."""
    nodes = []
    for c in cone:
        if c.origin[0] == cl.ORIGIN_INPUT:
            source = ("leaf", c.origin[1])
        elif c.origin[0] == cl.ORIGIN_EQ:
            source = ("inference", "eq_axiom", ())
        else:
            source = ("inference", c.origin[1], tuple(f"c{p}" for p in c.origin[2]))
        nodes.append(tptp.DerivationNode(f"c{c.cid}", cl.render_clause(c.literals), source))
    return tuple(nodes)
