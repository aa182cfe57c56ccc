import pytest

from conftest import TAU_S1, TAU_S2
from core.automaton import Nfa
from core.css import build_feasible_css, build_ss
from core.errors import StateSpaceLimitError, UsageError
from core.estimators import (
    Coordinator,
    IObserver,
    build_do_observer,
    build_initial_estimator,
    build_reversed_observer,
    current_estimate,
    initial_estimate,
    replay,
    run_observer,
)
from core.protocol import ObservationArchitecture

# from {x2,x3,x4}: x4 -b13-> x1 -a12-> x2 is the only run producing this CSI-state
TAU_TO_X2 = "(b13.a12|a12|b13)"


def test_single_synchronization_estimates(nfa, feasible, ids, tau):
    assert current_estimate(feasible, tau(TAU_S1), ids("x0", "x1")) == ids("x2", "x3", "x4")
    assert initial_estimate(feasible, tau(TAU_S1), ids("x0", "x1")) == ids("x0")
    with pytest.raises(UsageError):
        current_estimate(feasible, tau("(a12|a12|)"), ids("x0"))


def test_do_observer_runs(nfa, arch, feasible, ids, tau):
    obs = build_do_observer(nfa, arch, feasible)
    assert obs.initial == ids("x0", "x1")
    assert run_observer(obs, []) == ids("x0", "x1")
    assert run_observer(obs, [tau(TAU_S1)]) == ids("x2", "x3", "x4")
    assert run_observer(obs, [tau(TAU_S1), tau(TAU_TO_X2)]) == ids("x2")
    assert run_observer(obs, [tau(TAU_TO_X2)]) is None
    assert len(obs.states) <= 2 ** len(nfa.states)


def test_observer_rejects_foreign_symbols(nfa, arch, feasible, tau):
    obs = build_do_observer(nfa, arch, feasible)
    with pytest.raises(UsageError):
        obs.successor(obs.initial, arch.tau0)


def test_initial_state_estimator(nfa, arch, feasible, ids, tau):
    iobs = build_initial_estimator(nfa, arch, feasible)
    x0, x1 = nfa.state_id("x0"), nfa.state_id("x1")
    assert iobs.initial == {(x0, x0), (x1, x1)}
    m = run_observer(iobs, [tau(TAU_S1)])
    assert IObserver.first_components(m) == ids("x0")
    assert {b for _, b in m} == ids("x2", "x3", "x4")
    assert iobs.alphabet == tuple(feasible.sorted_critical())


def test_reversed_observer(nfa, arch, full_css, ids, tau):
    robs = build_reversed_observer(nfa, arch, full_css)
    assert robs.initial == nfa.states
    assert run_observer(robs, [tau(TAU_S1)]) == ids("x0")
    assert run_observer(robs, [tau("(b13||b13.g3)")]) == ids("x2")


def test_reversed_observer_needs_every_seed(nfa, arch):
    with pytest.raises(UsageError):
        build_reversed_observer(nfa, arch, build_ss(nfa, arch, nfa.state_id("x2")))


def test_state_cap(nfa, arch, feasible):
    with pytest.raises(StateSpaceLimitError) as e:
        build_do_observer(nfa, arch, feasible, max_states=1)
    assert e.value.limit == 1


def test_coordinator_tracks_both_estimates(nfa, feasible, ids, tau):
    coordinator = Coordinator(feasible)
    assert coordinator.current == ids("x0", "x1")
    assert coordinator.initial == ids("x0", "x1")
    assert coordinator.receive(tau(TAU_S1)) == ids("x2", "x3", "x4")
    assert coordinator.initial == ids("x0")
    assert coordinator.receive(tau(TAU_S2)) == ids("x0", "x1")
    assert coordinator.initial == ids("x0")
    assert coordinator.received == [tau(TAU_S1), tau(TAU_S2)]


def test_replay_fills_estimates(nfa, arch, feasible, ids, evs):
    run = replay(nfa, arch, feasible, evs("a12 l g3 a12 b13 g2 g3 a12"))
    assert run.per_sync_estimates == [ids("x2", "x3", "x4"), ids("x0", "x1")]
    assert run.per_sync_initial == [ids("x0"), ids("x0")]


def test_language_upto(nfa, arch, feasible, tau):
    obs = build_do_observer(nfa, arch, feasible)
    words = obs.language_upto(2)
    assert () in words
    assert (tau(TAU_S1),) in words
    assert (tau(TAU_S1), tau(TAU_TO_X2)) in words
    assert all(len(w) <= 2 for w in words)


def test_observer_without_synchronizations():
    nfa = Nfa.from_names(["p", "q"], ["e"], [("p", "e", ["q"])], ["p"])
    arch = ObservationArchitecture.from_alphabets([[]], [1])
    obs = build_do_observer(nfa, arch, build_feasible_css(nfa, arch))
    assert obs.states == {frozenset({0, 1})}
    assert obs.alphabet == ()
    assert obs.to_dot().count("[shape=") == 1


def test_observer_exports(nfa, arch, feasible):
    obs = build_do_observer(nfa, arch, feasible)
    payload = obs.to_json()
    assert payload["kind"] == "current"
    assert payload["initial"] == "{x0,x1}"
    assert [payload["initial"], TAU_S1, "{x2,x3,x4}"] in payload["transitions"]
    assert obs.to_dot().startswith("digraph current_observer {")


def test_every_observer_builds_on_the_fixture(nfa, arch, feasible, full_css, ids, tau):
    obs = build_do_observer(nfa, arch, feasible)
    iobs = build_initial_estimator(nfa, arch, feasible)
    robs = build_reversed_observer(nfa, arch, full_css)
    assert obs.successor(obs.initial, tau(TAU_S1)) == ids("x2", "x3", "x4")
    assert IObserver.first_components(iobs.successor(iobs.initial, tau(TAU_S1))) == ids("x0")
    assert robs.successor(robs.initial, tau(TAU_S1)) >= ids("x0")
    assert all(len(o.transitions) > 0 for o in (obs, iobs, robs))
