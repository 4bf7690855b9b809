import random

import pytest

from deskhammer import fol, tptp
from deskhammer.fol import App, Atom, Binary, Eq, Not, Quant, Var
from deskhammer.tptp import (
    Assumed,
    By,
    ParseError,
    parse_article,
    parse_formula,
    parse_prover_output,
    render_formula,
    render_problem,
)

from conftest import make_fact
from oracles import random_formula


# ---------------------------------------------------------------------------
# formulas


def test_parse_forall_implication():
    f = parse_formula("![X]: (p(X) => q(X))")
    assert f == Quant("!", ("X",), Binary("=>", Atom("p", (Var("X"),)), Atom("q", (Var("X"),))))


def test_parse_exists_equality():
    f = parse_formula("?[X]: X = a")
    assert f == Quant("?", ("X",), Eq(Var("X"), App("a")))


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_formula("![X: (p(X)")
    assert err.value.line == 1
    assert err.value.col >= 3


def test_parse_inequality_sugar():
    assert parse_formula("a != b") == Not(Eq(App("a"), App("b")))


def test_parse_mixed_connectives_need_parens():
    with pytest.raises(ParseError):
        parse_formula("p & q | r")
    assert parse_formula("(p & q) | r") is not None


def test_parse_reversed_implication():
    assert parse_formula("p <= q") == Binary("=>", Atom("q"), Atom("p"))


def test_render_examples():
    f = Quant("!", ("X",), Binary("=>", Atom("p", (Var("X"),)), Atom("q", (Var("X"),))))
    assert render_formula(f) == "![X]: (p(X) => q(X))"
    assert render_formula(Eq(App("a"), App("a"))) == "a = a"


def test_render_is_deterministic():
    f = parse_formula("![X]: (p(X) & (q | r(X, f(X))))")
    assert render_formula(f) == render_formula(f)


def test_render_freshens_shadowed_binders():
    f = parse_formula("![X]: (p(X) & ?[X]: q(X))")
    text = render_formula(f)
    again = parse_formula(text)
    assert fol.alpha_equal(f, again)


def test_round_trip_random_formulas():
    rng = random.Random(99)
    for _ in range(300):
        f = random_formula(rng)
        assert fol.alpha_equal(f, parse_formula(render_formula(f)))


# ---------------------------------------------------------------------------
# articles


ARTICLE = """
article(demo, [imports(base_sets)]).

fof(pair_in, axiom, ![X,Y,Z]: (member(Z, upair(X,Y)) <=> (Z = X | Z = Y))).
fof(sub3, theorem, ![X,L]: (member(X,L) => subset(singleton(X), L)),
    by([pair_in, base_sets:subset_def])).
fof(sg1, theorem, ![G]: (graph(G) => ok(G)), assumed).
"""


def test_parse_article_header_and_facts():
    art = parse_article(ARTICLE)
    assert art.name == "demo"
    assert art.imports == ("base_sets",)
    assert [f.label for f in art.facts] == ["pair_in", "sub3", "sg1"]
    assert art.facts[0].role == "axiom"
    assert art.facts[1].justification == By(((None, "pair_in"), ("base_sets", "subset_def")))
    assert isinstance(art.facts[2].justification, Assumed)
    assert not art.diagnostics


def test_parse_article_batch_diagnostics():
    text = """article(demo, []).
fof(ok1, axiom, p(a)).
fof(broken, axiom, ![X: (p(X)).
fof(ok2, axiom, q(b)).
fof(ok1, axiom, r(c)).
fof(freeish, axiom, p(X)).
fof(conj, conjecture, p(a)).
fof(bad_assume, axiom, p(b), assumed).
"""
    art = parse_article(text)
    assert [f.label for f in art.facts] == ["ok1", "ok2"]
    assert len(art.diagnostics) == 5  # syntax, duplicate, free var, role, assumed
    assert all(d.line > 0 for d in art.diagnostics)
    messages = " | ".join(d.message for d in art.diagnostics)
    assert "duplicate label" in messages
    assert "free variable" in messages
    assert "reserved for generated problems" in messages
    assert "only allowed on lemma/theorem" in messages


def test_article_render_round_trip():
    art = parse_article(ARTICLE)
    text = tptp.render_article(art)
    again = parse_article(text)
    assert again.name == art.name
    assert again.imports == art.imports
    assert len(again.facts) == len(art.facts)
    for a, b in zip(art.facts, again.facts):
        assert a.label == b.label and a.role == b.role
        assert fol.alpha_equal(a.formula, b.formula)
        assert a.justification == b.justification


# ---------------------------------------------------------------------------
# problems


def test_render_problem_basic():
    goal = make_fact("g", "q(a)", role="theorem", article="demo")
    prem = make_fact("a1", "p(a)", article="demo")
    text = render_problem(goal, [prem])
    assert "fof(demo__a1, axiom, p(a))." in text
    assert "fof(demo__g, conjecture, q(a))." in text
    assert text.index("axiom") < text.index("conjecture")


def test_render_problem_empty_premises():
    goal = make_fact("g", "q(a)", role="theorem", article="demo")
    text = render_problem(goal, [])
    assert text.count("fof(") == 1


def test_render_problem_qualification_unique():
    goal = make_fact("g", "q(a)", role="theorem", article="demo")
    premises = [
        make_fact("t1", "p(a)", article="one"),
        make_fact("t1", "p(b)", article="two"),
        make_fact("t2", "p(c)", article="one"),
    ]
    text = render_problem(goal, premises)
    labels = [line.split(",")[0][4:] for line in text.strip().splitlines()]
    assert len(labels) == len(set(labels)) == 4


def test_render_problem_collision():
    goal = make_fact("g", "q(a)", role="theorem", article="demo")
    with pytest.raises(ValueError, match="collision"):
        render_problem(goal, [make_fact("g", "p(a)", article="demo")])


# ---------------------------------------------------------------------------
# prover output


def test_parse_output_theorem_with_leaves():
    text = """% solving...
% SZS status Theorem for problem
% SZS output start Proof
fof(f1, axiom, p(a), file('/x/p.p', t16_wellord2)).
fof(f2, axiom, q(a), file('/x/p.p', d1_wellord2)).
fof(f3, plain, $false, inference(resolution, [], [f1, f2])).
% SZS output end Proof
"""
    verdict = parse_prover_output(text, "tstp")
    assert verdict.status == tptp.STATUS_THEOREM
    assert tptp.leaf_labels(verdict) == ("t16_wellord2", "d1_wellord2")


def test_parse_output_countersatisfiable_no_derivation():
    verdict = parse_prover_output("% SZS status CounterSatisfiable\n", "tstp")
    assert verdict.status == tptp.STATUS_COUNTERSAT
    assert verdict.derivation is None


def test_parse_output_empty_is_error():
    verdict = parse_prover_output("", "tstp")
    assert verdict.status == tptp.STATUS_ERROR
    assert verdict.warnings


def test_parse_output_malformed_derivation_keeps_status():
    text = """% SZS status Theorem
% SZS output start Proof
fof(f2, plain, $false, inference(resolution, [], [nowhere])).
% SZS output end Proof
"""
    verdict = parse_prover_output(text, "builtin")
    assert verdict.status == tptp.STATUS_THEOREM
    assert verdict.derivation is None
    assert any("malformed" in w for w in verdict.warnings)


def test_parse_output_theorem_needs_single_falsum():
    text = """% SZS status Theorem
% SZS output start Proof
fof(f1, plain, $false, introduced(x)).
fof(f2, plain, $false, introduced(x)).
% SZS output end Proof
"""
    verdict = parse_prover_output(text, "tstp")
    assert verdict.derivation is None
    assert verdict.warnings


def test_parse_output_foreign_status_words():
    assert parse_prover_output("% SZS status Unsatisfiable\n").status == tptp.STATUS_THEOREM
    assert parse_prover_output("% SZS status Satisfiable\n").status == tptp.STATUS_COUNTERSAT
    assert parse_prover_output("% SZS status GaveUp\n").status == tptp.STATUS_GAVEUP
