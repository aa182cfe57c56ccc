import pytest

from core.automaton import Nfa, ObservableReach, observable_reach, project, step, unobservable_reach
from core.errors import ModelError, UsageError


def test_unobservable_reach(nfa, arch, ids):
    assert unobservable_reach(nfa, arch.e_i, ids("x0")) == ids("x0", "x1")
    assert unobservable_reach(nfa, arch.e_i, ids("x4")) == ids("x3", "x4")
    assert unobservable_reach(nfa, arch.e_i, ids("x2")) == ids("x2")


def test_observable_reach(nfa, arch, ids):
    a12, b13, g3 = nfa.event_ids(["a12", "b13", "g3"])
    assert observable_reach(nfa, arch.e_i, ids("x0"), a12) == ids("x2", "x3", "x4")
    assert observable_reach(nfa, arch.e_i, ids("x1"), a12) == ids("x2")
    assert observable_reach(nfa, arch.e_i, ids("x2"), b13) == ids("x3")
    assert observable_reach(nfa, arch.e_i, ids("x3"), g3) == ids("x0", "x1")
    assert observable_reach(nfa, arch.e_i, ids("x2"), a12) == frozenset()


def test_observable_reach_rejects_unobservable_event(nfa, arch, ids):
    with pytest.raises(UsageError):
        observable_reach(nfa, arch.e_i, ids("x4"), nfa.event_id("l"))


def test_memoised_reach_matches_functions(nfa, arch):
    reach = ObservableReach(nfa, arch.e_i)
    for x in sorted(nfa.states):
        assert reach.ur(x) == unobservable_reach(nfa, arch.e_i, {x})
        for sigma in sorted(arch.e_i):
            assert reach.r(x, sigma) == observable_reach(nfa, arch.e_i, {x}, sigma)
    assert reach.r_set(nfa.states, nfa.event_id("g3")) == observable_reach(
        nfa, arch.e_i, nfa.states, nfa.event_id("g3")
    )


def test_step_and_projection(nfa, arch, ids, evs):
    s1 = evs("a12 l g3 a12")
    assert step(nfa, ids("x0"), s1) == ids("x4")
    assert project(s1, arch.e_i) == evs("a12 g3 a12")
    assert step(nfa, ids("x2"), evs("a12")) == frozenset()


def test_language_membership(nfa, evs):
    assert nfa.language_contains(evs("u g2 g3"))
    assert nfa.language_contains(())
    assert not nfa.language_contains(evs("b13"))


def test_reachable_states(nfa, ids):
    assert nfa.reachable_states() == nfa.states
    assert nfa.reachable_states(ids("x2")) == ids("x0", "x1", "x2", "x3", "x4")


def test_names_are_canonical(nfa, ids):
    assert nfa.names_of(ids("x4", "x2", "x3")) == ["x2", "x3", "x4"]
    assert nfa.state_name(nfa.state_id("x3")) == "x3"


def test_unknown_identifiers(nfa):
    with pytest.raises(ModelError) as e:
        nfa.state_id("x9")
    assert e.value.identifier == "x9"
    with pytest.raises(ModelError):
        nfa.event_id("zz")
    with pytest.raises(ModelError):
        nfa.state_name(42)


def test_malformed_plants():
    with pytest.raises(ModelError):
        Nfa.from_names(["a", "a"], ["e"], [], ["a"])
    with pytest.raises(ModelError):
        Nfa.from_names(["a"], ["e"], [], [])
    with pytest.raises(ModelError):
        Nfa.from_names(["a"], ["e"], [("a", "f", ["a"])], ["a"])


def test_with_initial_keeps_transitions(nfa, ids, evs):
    everything = nfa.with_initial(nfa.states)
    assert everything.initial == nfa.states
    assert everything.transitions() == nfa.transitions()
    assert everything.language_contains(evs("b13"))
