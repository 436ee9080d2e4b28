import json

import numpy as np
import pytest

from cohdist.basis_search import SearchConfig
from cohdist.ensembles import EnsembleSpec, named_state, random_state, state_rng
from cohdist.errors import UnknownTheorem
from cohdist.verifier import (
    Inequality,
    TheoremReport,
    check_discord_bounds,
    check_oneway_chain,
    check_theorem1,
    check_theorem2_3,
    check_theorem4,
    check_werner_equality,
    reproduce_paper,
    verify_ensemble,
)

FAST = SearchConfig(random_starts=8)


def test_inequality_slack_and_tolerance():
    ok = Inequality("a <= b", 1.0, 1.0 - 5e-9)
    assert ok.slack == pytest.approx(-5e-9) and ok.passed
    assert not Inequality("a <= b", 1.0, 1.0 - 2e-8).passed
    assert not Inequality("exact", 1e-9, 0.0, tolerance=0.0).passed


def test_report_takes_worst_check():
    checks = [Inequality("x", 0.0, 1.0), Inequality("y", 0.0, 0.25)]
    rep = TheoremReport.from_checks("t", "s", {"a": 1}, checks)
    assert (rep.lhs, rep.rhs, rep.slack, rep.status) == (0.0, 0.25, 0.25, "pass")
    rep = TheoremReport.from_checks("t", "s", {}, [Inequality("x", 1.0, 0.0, finding_ok=True)])
    assert rep.status == "finding" and not rep.passed
    rep = TheoremReport.from_checks("t", "s", {}, [Inequality("x", 1.0, 0.0, finding_ok=True), Inequality("z", 1.0, 0.0)])
    assert rep.status == "fail"


@pytest.mark.parametrize("name", ["plus_plus", "bell"])
def test_theorem1_on_examples(name):
    rep = check_theorem1(named_state(name), config=FAST)
    assert rep.passed and rep.retries_used == 0
    assert {"C", "Q", "D", "L"} <= set(rep.terms)


def test_theorem1_upper_half_fails_on_datta():
    # the nearest classical state can carry less coherence than the path through
    # the reference basis requires; this persists after the retry
    rep = check_theorem1(named_state("datta"), config=FAST)
    assert rep.retries_used == 1 and not rep.passed_before_retry
    assert rep.status == "finding"
    assert rep.terms["L"] < -1e-3
    assert rep.check("Q <= C").passed
    assert rep.check("|C + L - Q - D| <= 1e-9").passed


def test_oneway_upper_half_fails_on_a_known_state():
    # frozen from a 200 x 800 grid over the measured qubit's Bloch hemisphere plus
    # Nelder-Mead polishing; the minimizer is unique, so this is not an optimizer miss
    rho = random_state("induced_mixed", (2, 2), state_rng(5, 257))
    rep = check_oneway_chain(rho, config=FAST)
    assert rep.terms["Q_oneway"] == pytest.approx(0.1723115749000057, abs=1e-8)
    # D moves linearly with the witness angle, which the search resolves to about 1e-4
    assert rep.check("C1 <= Q1 + D1").slack == pytest.approx(-3.327783e-4, abs=5e-6)
    assert rep.status == "fail" and rep.retries_used == 1


def test_other_single_state_checks():
    rho = named_state("werner", p=0.6)
    for check in (check_oneway_chain, check_discord_bounds, check_theorem2_3):
        assert check(rho, config=FAST).passed
    rep = check_theorem4(named_state("ghz", n=3), config=FAST)
    assert rep.passed
    assert rep.terms["chain_sum"] == pytest.approx(1.0, abs=1e-8)
    assert rep.slack == pytest.approx(0.0, abs=1e-8)
    assert rep.notes


def test_werner_equality_report():
    rep = check_werner_equality(0.5, FAST)
    assert rep.passed and rep.terms["gap"] < 1e-8


def test_unknown_theorem():
    with pytest.raises(UnknownTheorem, match="UnknownTheorem"):
        verify_ensemble("99", EnsembleSpec("induced_mixed", (2, 2), 1))


def test_ensemble_report_is_deterministic_across_jobs():
    spec = EnsembleSpec("induced_mixed", (2, 2), 4, seed=5)
    a = verify_ensemble("bounds", spec, FAST, jobs=1)
    b = verify_ensemble("bounds", spec, FAST, jobs=2)
    assert a.to_json() == b.to_json()
    assert a.jsonl() == b.jsonl()
    assert a.trials == 4 and a.passes == 4
    assert sum(a.histogram["counts"]) == 4 and len(a.histogram["edges"]) == 21
    first = json.loads(a.jsonl().splitlines()[0])
    assert first["state"] == {"kind": "induced_mixed", "dims": [2, 2], "seed": 5, "index": 0}
    assert a.csv().splitlines()[0] == "theorem_id,trials,passes,min_slack"


def test_failures_carry_replay_keys():
    # the upper half of theorem 1 fails on some induced states; they come back as findings
    rep = verify_ensemble("1", EnsembleSpec("induced_mixed", (2, 2), 8, seed=1), FAST)
    assert rep.failures == [[1, 4], [1, 7]]
    assert rep.findings == rep.failures and rep.hard_failures == []
    assert rep.passes == 6 and rep.min_slack < -1e-3


def test_paper_rows_and_filters():
    rows = reproduce_paper(FAST, rows=["datta"])
    assert [r.name for r in rows] == ["datta.theta", "datta.C_AB", "datta.C_A", "datta.C_B"]
    assert all(r.status == "pass" for r in rows)
    single = reproduce_paper(FAST, rows=["datta.theta"])
    assert len(single) == 1 and single[0].tolerance == 1e-3
    tight = reproduce_paper(FAST, rows=["datta.theta"], tolerance=0.0)
    assert tight[0].status == "fail"
    assert np.isfinite(single[0].delta)
