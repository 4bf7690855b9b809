import os
import stat
import time

import pytest

from deskhammer import tptp
from deskhammer.prover import (
    ExternalProver,
    ProverConfig,
    prove,
    prove_falsum,
    render_szs,
    run_external,
)

from conftest import make_fact
from oracles import validate_refutation


def test_config_validation():
    with pytest.raises(ValueError):
        ProverConfig(time_limit_ms=0)
    with pytest.raises(ValueError):
        ProverConfig(clause_limit=-1)


def test_prove_singleton_subset_step():
    # the in-L singleton step: goal follows from membership, the pair axiom
    # analog and the subset-of-singleton theorem analog
    premises = [
        make_fact("a", "member(x, l)"),
        make_fact("pair_ax", "![X,Y,Z]: (member(Z, upair(X,Y)) <=> (Z = X | Z = Y))"),
        make_fact("sing_sub", "![X,Y]: (subset(singleton(X), Y) <=> member(X, Y))"),
    ]
    goal = make_fact("d", "subset(singleton(x), l)", role="theorem")
    proof = prove(premises, goal, ProverConfig(time_limit_ms=10_000))
    assert proof.status == tptp.STATUS_THEOREM
    assert {"t:a", "t:sing_sub"} <= proof.used_fact_ids
    assert proof.used_fact_ids <= {"t:a", "t:pair_ax", "t:sing_sub"}


def test_prove_goal_equal_to_premise():
    premises = [make_fact("a", "![X]: p(X)")]
    goal = make_fact("g", "![X]: p(X)", role="theorem")
    proof = prove(premises, goal, ProverConfig())
    assert proof.status == tptp.STATUS_THEOREM
    assert proof.used_fact_ids == {"t:a"}


def test_prove_reflexivity_no_premises():
    goal = make_fact("g", "a = a", role="theorem")
    proof = prove([], goal, ProverConfig())
    assert proof.status == tptp.STATUS_THEOREM
    assert proof.used_fact_ids == frozenset()


def test_prove_falsum_for_probe():
    premises = [make_fact("a1", "p(a)"), make_fact("a2", "![X]: ~p(X)")]
    proof = prove_falsum(premises, ProverConfig())
    assert proof.status == tptp.STATUS_THEOREM
    assert proof.used_fact_ids == {"t:a1", "t:a2"}


def test_builtin_szs_round_trip():
    premises = [make_fact("a1", "p(a)"), make_fact("a2", "![X]: (p(X) => q(X))")]
    goal = make_fact("g", "q(a)", role="theorem")
    proof = prove(premises, goal, ProverConfig())
    text = render_szs(proof)
    verdict = tptp.parse_prover_output(text, dialect="builtin")
    assert verdict.status == tptp.STATUS_THEOREM
    assert set(tptp.leaf_labels(verdict)) == {"t__a1", "t__a2", "t__g"}
    problems = validate_refutation(proof.derivation)
    assert problems == []


# ---------------------------------------------------------------------------
# external provers (mock scripts)


def _script(tmp_path, name: str, body: str) -> str:
    path = tmp_path / name
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


def test_external_theorem_with_leaves(tmp_path):
    script = _script(
        tmp_path,
        "mock_prover.sh",
        """cat <<'OUT'
% SZS status Theorem
% SZS output start Proof
fof(f1, axiom, p(a), file('{problem}', t__a1)).
fof(f2, plain, $false, inference(resolution, [], [f1])).
% SZS output end Proof
OUT
""".replace("{problem}", "problem"),
    )
    spec = ExternalProver("mock", f"{script} {{problem}}")
    premises = [make_fact("a1", "p(a)")]
    goal = make_fact("g", "p(a)", role="theorem")
    proof = prove(premises, goal, ProverConfig(engine=spec))
    assert proof.status == tptp.STATUS_THEOREM
    assert proof.used_fact_ids == {"t:a1"}
    assert not proof.used_nonminimal


def test_external_theorem_without_derivation_flags_nonminimal(tmp_path):
    script = _script(tmp_path, "noproof.sh", "echo '% SZS status Theorem'\n")
    spec = ExternalProver("mock", f"{script} {{problem}}")
    premises = [make_fact("a1", "p(a)"), make_fact("a2", "q(b)")]
    goal = make_fact("g", "p(a)", role="theorem")
    proof = prove(premises, goal, ProverConfig(engine=spec))
    assert proof.status == tptp.STATUS_THEOREM
    assert proof.used_fact_ids == {"t:a1", "t:a2"}
    assert proof.used_nonminimal


def test_external_sleeper_killed(tmp_path):
    script = _script(tmp_path, "sleeper.sh", "sleep 30\necho '% SZS status Theorem'\n")
    spec = ExternalProver("sleeper", f"{script} {{problem}}")
    config = ProverConfig(time_limit_ms=300, engine=spec)
    start = time.monotonic()
    verdict = run_external(spec, "fof(g, conjecture, p(a)).\n", config)
    elapsed = time.monotonic() - start
    assert verdict.status == tptp.STATUS_TIMEOUT
    assert elapsed < 5  # killed well before the 30s sleep


def test_external_garbage_output(tmp_path):
    script = _script(tmp_path, "garbage.sh", "echo 'segfault whatever'\nexit 3\n")
    spec = ExternalProver("garbage", f"{script} {{problem}}")
    verdict = run_external(spec, "fof(g, conjecture, p(a)).\n", ProverConfig(engine=spec))
    assert verdict.status == tptp.STATUS_ERROR
    assert any("segfault" in w for w in verdict.warnings)


def test_external_spawn_failure():
    spec = ExternalProver("missing", "/nonexistent/prover {problem}")
    verdict = run_external(spec, "fof(g, conjecture, p(a)).\n", ProverConfig(engine=spec))
    # shell reports the missing binary on stdout/stderr; no SZS line -> Error
    assert verdict.status == tptp.STATUS_ERROR


def test_external_timeout_substitution(tmp_path):
    script = _script(tmp_path, "echoarg.sh", 'echo "% SZS status GaveUp"\necho "limit was $2"\n')
    spec = ExternalProver("echo", f"{script} {{problem}} {{timeout_s}}")
    verdict = run_external(spec, "fof(g, conjecture, p(a)).\n",
                           ProverConfig(time_limit_ms=2500, engine=spec))
    assert verdict.status == tptp.STATUS_GAVEUP


def test_prove_falsum_ignores_external_engine_config():
    # the probe always refutes with the builtin engine, whatever the config says
    premises = [make_fact("a1", "p(a)"), make_fact("a2", "![X]: ~p(X)")]
    config = ProverConfig(engine=ExternalProver("x", "false {problem}"))
    proof = prove_falsum(premises, config)
    assert proof.status == tptp.STATUS_THEOREM
