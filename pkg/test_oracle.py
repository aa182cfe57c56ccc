import pytest

from conftest import TAU_S1
from core.automaton import unobservable_reach
from core.errors import FixtureInvalidError, UsageError
from core.models import GoldenFact, GoldenFactSet
from core.oracle import (
    check_golden_facts,
    enumerate_language,
    evaluate_fact,
    oracle_current_estimate,
    oracle_initial_estimate,
    oracle_pairs,
    oracle_si_states,
    oracle_ur,
    realize,
)
from core.protocol import replay


def test_golden_facts_hold_on_fixture(nfa, arch, golden):
    report = check_golden_facts(nfa, arch, golden)
    assert report.passed
    assert len(report.results) == 10
    assert len(report.annotations) == 3


def test_deleting_a_transition_names_the_failing_fact(model, golden):
    kept = [t for t in model.transitions if not (t.source == "x3" and t.event == "g3")]
    nfa, arch = model.model_copy(update={"transitions": kept}).to_plant()
    with pytest.raises(FixtureInvalidError) as e:
        check_golden_facts(nfa, arch, golden)
    assert e.value.fact == "r-g3-x3"
    assert e.value.report is not None and not e.value.report.passed


def test_fact_on_a_string_outside_the_plant_is_reported_not_raised(model, golden):
    kept = [t for t in model.transitions if not (t.source == "x4" and t.event == "l")]
    nfa, arch = model.model_copy(update={"transitions": kept}).to_plant()
    with pytest.raises(FixtureInvalidError) as e:
        check_golden_facts(nfa, arch, golden)
    assert e.value.fact == "r-a12-x0"
    results = {r.name: r for r in e.value.report.results}
    assert len(results) == len(golden.facts)
    assert not results["si-trace-s1"].passed
    assert "not in L(G)" in results["si-trace-s1"].actual


def test_unparseable_csi_argument_names_the_fact(nfa, arch):
    facts = GoldenFactSet(
        model="fixture.json",
        facts=[
            GoldenFact(name="ur-x0", kind="UR", args={"states": ["x0"]}, expected=["x0", "x1"]),
            GoldenFact(
                name="bad-csi",
                kind="Estimate",
                args={"mode": "current", "iota": ["(zz||)"], "initial": ["x0"]},
                expected=[],
            ),
        ],
    )
    with pytest.raises(FixtureInvalidError) as e:
        check_golden_facts(nfa, arch, facts)
    assert e.value.fact == "bad-csi"
    assert [r.passed for r in e.value.report.results] == [True, False]


def test_member_m_fact_agrees_with_construction(nfa, arch, golden, full_css, tau):
    fact = next(f for f in golden.facts if f.kind == "Member-M")
    assert evaluate_fact(nfa, arch, fact) is True
    wanted = {(nfa.state_id(a), nfa.state_id(b)) for a, b in fact.args["pairs"]}
    assert wanted <= full_css.pairs_of(tau(fact.args["csi"]))


def test_enumeration_without_observable_events(nfa, arch, evs):
    assert enumerate_language(nfa, arch.e_i, 0) == {(), evs("u")}
    assert oracle_ur(nfa, arch, nfa.initial) == unobservable_reach(nfa, arch.e_i, nfa.initial)


def test_enumeration_is_prefix_closed(nfa, arch, evs):
    strings = enumerate_language(nfa, arch.e_i, 3)
    assert evs("a12 l g3 a12") in strings
    assert all(s[:k] in strings for s in strings for k in range(len(s)))
    assert all(nfa.language_contains(s) for s in strings)


def test_enumeration_bounds(nfa, arch):
    with pytest.raises(UsageError):
        enumerate_language(nfa, arch.e_i, -1)
    assert enumerate_language(nfa, arch.e_i, 1, max_unobservable_run=0) == {
        (),
        (nfa.event_id("a12"),),
        (nfa.event_id("g2"),),
    }


def test_estimates_without_synchronization(nfa, arch, ids):
    assert oracle_current_estimate(nfa, arch, [], nfa.initial) == ids("x0", "x1")
    assert oracle_initial_estimate(nfa, arch, [], nfa.initial) == ids("x0", "x1")
    assert oracle_current_estimate(nfa, arch, [], ids("x4")) == ids("x3", "x4")


def test_estimates_after_one_synchronization(nfa, arch, ids, tau):
    assert oracle_current_estimate(nfa, arch, [tau(TAU_S1)], nfa.initial) == ids("x2", "x3", "x4")
    assert oracle_initial_estimate(nfa, arch, [tau(TAU_S1)], nfa.initial) == ids("x0")


def test_realize(nfa, arch, tau):
    s = realize(nfa, arch, nfa.initial, [tau(TAU_S1)])
    assert len(s) == 4
    assert replay(nfa, arch, s).csi_trace == [tau(TAU_S1)]
    assert realize(nfa, arch, nfa.initial, []) == ()


def test_unrealizable_sequence(nfa, arch, tau):
    iota = [tau("(b13||b13.g3)")]
    assert realize(nfa, arch, nfa.initial, iota) is None
    assert oracle_initial_estimate(nfa, arch, iota, nfa.initial) == frozenset()


def test_si_states_match_feasible_structure(nfa, arch, feasible):
    assert oracle_si_states(nfa, arch, nfa.initial) == feasible.si_states


def test_pairs_from_x2(nfa, arch, ids, tau):
    x2 = nfa.state_id("x2")
    assert oracle_pairs(nfa, arch, tau("(b13||b13.g3)"), {x2}) == {(x2, x) for x in ids("x0", "x1")}
