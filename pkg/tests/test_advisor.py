import math
import random

import pytest

from deskhammer import advisor as adv

from oracles import advisor_score


def test_single_observation_counts():
    model = adv.train_advisor([({"p"}, {"f"})])
    assert model.n_proofs == 1
    assert model.uses == {"f": 1}
    assert model.cooc == {("f", "p"): 1}


def test_cold_start_ties_by_fact_id():
    model = adv.empty_model()
    ranked = adv.advise(model, {"p"}, {"b", "a", "c"}, 3)
    assert [fid for fid, _ in ranked] == ["a", "b", "c"]
    assert len({score for _, score in ranked}) == 1


def test_training_is_order_independent():
    ex1 = ({"p", "q"}, {"f", "g"})
    ex2 = ({"q"}, {"g"})
    assert adv.train_advisor([ex1, ex2]) == adv.train_advisor([ex2, ex1])


def test_score_worked_example():
    # N=2, uses(f)=1, cooc(f,p)=1, mu=1, goal {p}:
    # ln(2/4) + ln(2/3) = ln(1/3)
    model = adv.AdvisorModel(2, {"f": 1}, {("f", "p"): 1}, 1.0)
    assert adv.score(model, "f", {"p"}) == pytest.approx(math.log(1 / 3), abs=1e-12)
    assert adv.score(model, "f", {"p"}) == pytest.approx(-1.0986122886681098, abs=1e-9)


def test_score_zero_counts():
    model = adv.AdvisorModel(3, {}, {}, 2.0)
    want = math.log(2 / (3 + 4)) + math.log(2 / 4)
    assert adv.score(model, "ghost", {"p"}) == pytest.approx(want, abs=1e-12)


def test_identical_counts_tie_break():
    model = adv.AdvisorModel(2, {"x": 1, "y": 1}, {("x", "p"): 1, ("y", "p"): 1}, 1.0)
    ranked = adv.advise(model, {"p"}, {"y", "x"}, 2)
    assert [fid for fid, _ in ranked] == ["x", "y"]


def test_advise_k_validation():
    with pytest.raises(ValueError):
        adv.advise(adv.empty_model(), set(), {"a"}, 0)


def test_scores_match_oracle_random():
    rng = random.Random(2024)
    for _ in range(300):
        n = rng.randint(0, 20)
        facts = [f"a:f{i}" for i in range(rng.randint(1, 8))]
        syms = [f"s{i}" for i in range(rng.randint(1, 5))]
        uses = {f: rng.randint(0, n) for f in facts if rng.random() < 0.8}
        cooc = {
            (f, s): rng.randint(0, uses.get(f, 0))
            for f in facts for s in syms if rng.random() < 0.5 and uses.get(f, 0) > 0
        }
        mu = rng.choice([0.5, 1.0, 2.0])
        model = adv.AdvisorModel(n, uses, cooc, mu)
        goal = set(rng.sample(syms, rng.randint(0, len(syms))))
        for f in facts:
            want = advisor_score(n, uses, cooc, mu, f, sorted(goal))
            assert adv.score(model, f, sorted(goal)) == pytest.approx(want, abs=1e-9)


def test_model_save_load_round_trip():
    model = adv.train_advisor(
        [({"p", "q"}, {"art:f1", "art:f2"}), ({"q"}, {"art:f2"})], mu=0.5
    )
    text = adv.save_model(model)
    again = adv.load_model(text)
    assert again == model


def test_load_model_rejects_garbage():
    with pytest.raises(ValueError):
        adv.load_model("advisor_model(1, 2, 1.0).\nwhat is this\n")
    with pytest.raises(ValueError):
        adv.load_model("advisor_model(9, 2, 1.0).\n")


def test_mu_must_be_positive():
    with pytest.raises(ValueError):
        adv.AdvisorModel(0, {}, {}, 0.0)
