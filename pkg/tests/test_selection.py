import random

import pytest

from deskhammer import selection
from deskhammer.corpus import CorpusError, FactRef, load_snapshot
from deskhammer.selection import SineParams, sine_select, slice_facts
from deskhammer.tptp import parse_formula

from conftest import make_fact
from oracles import brute_sine, random_sine_corpus

CORPUS = """article(base, []).
fof(b_ax, axiom, ![X]: (p(X) => q(X))).
fof(b_ty, type, ![X]: (q(X) => r(X))).
fof(b_th, theorem, p(c) => q(c), by([b_ax])).
"""

LONER = """article(loner, []).
fof(l_ax, axiom, s(d)).
"""

MAIN = """article(main, [imports(base)]).
fof(m_bg, background, ![X]: ~member(X, empty)).
fof(m1, axiom, p(a)).
fof(m2, theorem, q(a), by([m1, base:b_ax])).
fof(m3, theorem, r(a), by([m2, base:b_ty])).
"""


@pytest.fixture
def snapshot():
    return load_snapshot([CORPUS, LONER, MAIN])


def goal_of(snapshot, label="m3"):
    return snapshot.fact("main", label)


def ids(facts):
    return {f"{f.article}:{f.label}" for f in facts}


def test_by_list_slice_is_refs_plus_mandatory(snapshot):
    goal = goal_of(snapshot)
    mode = selection.by_list([FactRef(None, "m2"), FactRef("base", "b_ty")])
    out = slice_facts(snapshot, goal, mode)
    # exactly the referenced facts plus type/background facts in scope
    assert ids(out) == {"main:m2", "base:b_ty", "main:m_bg"}


def test_by_list_rejects_forward_reference(snapshot):
    goal = snapshot.fact("main", "m2")
    with pytest.raises(CorpusError, match="precede"):
        slice_facts(snapshot, goal, selection.by_list([FactRef(None, "m3")]))


def test_current_article_reduces_to_context(snapshot):
    goal = goal_of(snapshot)
    out = slice_facts(snapshot, goal, selection.current_article())
    assert ids(out) == {"main:m1", "main:m2", "main:m_bg", "base:b_ty"}


def test_full_vs_imports_differ_on_unimported_article(snapshot):
    goal = goal_of(snapshot)
    full = slice_facts(snapshot, goal, selection.full_library())
    imports = slice_facts(snapshot, goal, selection.imports_only())
    assert "loner:l_ax" in ids(full)
    assert "loner:l_ax" not in ids(imports)
    assert ids(imports) < ids(full)


def test_slice_never_contains_goal_or_later(snapshot):
    goal = snapshot.fact("main", "m2")
    for mode in (selection.full_library(), selection.imports_only(),
                 selection.current_article()):
        out = ids(slice_facts(snapshot, goal, mode))
        assert "main:m2" not in out
        assert "main:m3" not in out


# ---------------------------------------------------------------------------
# SInE


def test_sine_hand_trace():
    ax1 = make_fact("ax1", "p(a)")
    ax2 = make_fact("ax2", "![X]: (p(X) => q(X))")
    ax3 = make_fact("ax3", "r(b)")
    occ = {"p": 2, "q": 1, "a": 1, "r": 1, "b": 1}
    out = sine_select(parse_formula("q(a)"), [ax1, ax2, ax3], occ,
                      SineParams(tolerance=1, depth=1))
    assert out == {ax1, ax2}


def test_sine_tolerance_saturation():
    ax1 = make_fact("ax1", "p(a)")
    ax2 = make_fact("ax2", "![X]: (p(X) => q(X))")
    ax3 = make_fact("ax3", "r(b)")
    occ = {"p": 2, "q": 1, "a": 1, "r": 1, "b": 1}
    out = sine_select(parse_formula("q(a)"), [ax1, ax2, ax3], occ,
                      SineParams(tolerance=100, depth=None))
    assert out == {ax1, ax2}  # ax3 shares no symbol path with the goal


def test_sine_no_shared_symbols():
    ax = make_fact("ax", "r(b)")
    out = sine_select(parse_formula("q(a)"), [ax], {"r": 1, "b": 1, "q": 1, "a": 1},
                      SineParams())
    assert out == set()


def test_sine_matches_oracle_on_random_corpora():
    rng = random.Random(4242)
    for _ in range(60):
        facts, occ, goal_syms = random_sine_corpus(rng)
        goal = parse_formula("&".join(f"{s}" for s in sorted(goal_syms)))
        for t in (1, 1.5, 2, 3):
            for d in (1, 2, None):
                got = sine_select(goal, facts, occ, SineParams(t, d))
                want = brute_sine(goal_syms, facts, occ, t, d)
                assert got == want, (t, d)


def test_sine_monotone_in_tolerance_and_depth():
    rng = random.Random(77)
    for _ in range(40):
        facts, occ, goal_syms = random_sine_corpus(rng)
        goal = parse_formula("&".join(sorted(goal_syms)))
        prev_t: set = set()
        for t in (1, 1.5, 2, 3):
            out = sine_select(goal, facts, occ, SineParams(t, 2))
            assert prev_t <= out
            prev_t = out
        prev_d: set = set()
        for d in (1, 2, None):
            out = sine_select(goal, facts, occ, SineParams(1.5, d))
            assert prev_d <= out
            prev_d = out


def test_sine_params_validation():
    with pytest.raises(ValueError):
        SineParams(tolerance=0.5)
    with pytest.raises(ValueError):
        SineParams(depth=0)
