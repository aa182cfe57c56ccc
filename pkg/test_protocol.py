import logging

import pytest

from conftest import TAU_S1, TAU_S2
from core.errors import ConfigError, CorruptedStateError, ModelError, NotInLanguageError, UndefinedTransitionError, UsageError
from core.protocol import (
    ObservationArchitecture,
    SiState,
    Site,
    absorb,
    is_critical,
    replay,
    replay_names,
    triggering_sites,
    validate,
)


def test_absorb_records_at_every_observing_site(nfa, arch):
    a12, b13 = nfa.event_ids(["a12", "b13"])
    tau = absorb(arch, arch.tau0, a12)
    assert tau.render(nfa) == "(a12|a12|)"
    assert absorb(arch, tau, b13).render(nfa) == "(a12.b13|a12|b13)"
    assert arch.sites_of(a12) == (1, 2)
    assert arch.sites_of(nfa.event_id("l")) == ()


def test_critical_states(arch, tau):
    assert not is_critical(arch, arch.tau0)
    assert not is_critical(arch, tau("(a12|a12|g3)"))
    assert is_critical(arch, tau(TAU_S1))
    assert triggering_sites(arch, tau(TAU_S1)) == (1, 2)
    assert triggering_sites(arch, tau(TAU_S2)) == (3,)


def test_absorb_is_undefined_on_critical_states(nfa, arch, tau):
    with pytest.raises(UndefinedTransitionError):
        absorb(arch, tau(TAU_S1), nfa.event_id("g2"))


def test_absorb_rejects_unobservable_events(nfa, arch):
    with pytest.raises(UsageError):
        absorb(arch, arch.tau0, nfa.event_id("u"))


def test_component_beyond_threshold_is_corrupted(nfa, arch):
    a12 = nfa.event_id("a12")
    broken = SiState(((a12, a12, a12), (), ()))
    with pytest.raises(CorruptedStateError) as e:
        is_critical(arch, broken)
    assert e.value.site == 1


def test_parse_canonical_text(nfa, arch, tau):
    parsed = tau(TAU_S2)
    assert parsed.render(nfa) == TAU_S2
    assert parsed.observed_count() == 4
    assert tau("(||)") == arch.tau0


@pytest.mark.parametrize("text", ["(a12|a12)", "a12|a12|", "(g2||)", "(zz||)"])
def test_parse_rejects_malformed_text(nfa, arch, text):
    with pytest.raises((UsageError, ModelError)):
        SiState.parse(text, nfa, arch)


def test_parse_rejects_overfull_component(nfa, arch):
    with pytest.raises(CorruptedStateError):
        SiState.parse("(a12.a12.a12||)", nfa, arch)


def test_replay_single_synchronization(nfa, arch, tau):
    run = replay_names(nfa, arch, ["a12", "l", "g3", "a12"])
    assert run.csi_trace == [tau(TAU_S1)]
    assert run.pending == arch.tau0
    assert [len(seg) for seg in run.segments] == [4, 0]


def test_replay_two_synchronizations_then_pending(nfa, arch, tau):
    run = replay_names(nfa, arch, "a12 l g3 a12 b13 g2 g3 a12".split())
    assert [t.render(nfa) for t in run.csi_trace] == [TAU_S1, TAU_S2]
    assert run.pending.render(nfa) == "(a12|a12|)"
    assert run.synchronizations == 2
    assert [[nfa.event_name(e) for e in seg] for seg in run.segments] == [
        ["a12", "l", "g3", "a12"],
        ["b13", "g2", "g3"],
        ["a12"],
    ]


def test_replay_empty_string(nfa, arch):
    run = replay(nfa, arch, ())
    assert run.csi_trace == []
    assert run.pending == arch.tau0


def test_replay_outside_language(nfa, arch):
    with pytest.raises(NotInLanguageError) as e:
        replay_names(nfa, arch, ["a12", "a12"])
    assert e.value.executed == 1


def test_site_indices_must_be_contiguous():
    with pytest.raises(ConfigError):
        ObservationArchitecture([Site(2, frozenset({0}), 1)])
    with pytest.raises(ConfigError):
        ObservationArchitecture([])


def test_validate_thresholds_and_alphabets(nfa):
    with pytest.raises(ConfigError):
        validate(ObservationArchitecture([Site(1, frozenset({0}), 0)]), nfa)
    with pytest.raises(ConfigError):
        validate(ObservationArchitecture([Site(1, frozenset({99}), 1)]), nfa)


def test_validate_warns_on_blind_site(nfa, caplog):
    arch = ObservationArchitecture([Site(1, frozenset({0}), 1), Site(2, frozenset(), 1, name="blind")])
    with caplog.at_level(logging.WARNING):
        validate(arch, nfa)
    assert "blind" in caplog.text
