import os
from pathlib import Path

import pytest

from core.css import build_css, build_feasible_css
from core.models import load_golden_facts, load_model
from core.protocol import SiState

ROOT = Path(__file__).parent
FIXTURE = ROOT / "fixtures" / "fixture.json"
FACTS = ROOT / "fixtures" / "golden_facts.json"

# the two CSI-states emitted along a12 l g3 a12 b13 g2 g3 a12
TAU_S1 = "(a12.a12|a12.a12|g3)"
TAU_S2 = "(b13|g2|b13.g3)"


def random_seed() -> int:
    return int(os.getenv("DESSYNC_SEED", "0"))


@pytest.fixture
def model():
    return load_model(FIXTURE)


@pytest.fixture
def golden(model):
    facts, _ = load_golden_facts(FACTS)
    return facts


@pytest.fixture
def plant(model):
    return model.to_plant()


@pytest.fixture
def nfa(plant):
    return plant[0]


@pytest.fixture
def arch(plant):
    return plant[1]


@pytest.fixture
def feasible(nfa, arch):
    return build_feasible_css(nfa, arch)


@pytest.fixture
def full_css(nfa, arch):
    return build_css(nfa, arch, nfa.states)


@pytest.fixture
def tau(nfa, arch):
    """Parse the canonical text form of an SI-state of the fixture."""
    return lambda text: SiState.parse(text, nfa, arch)


@pytest.fixture
def ids(nfa):
    return lambda *names: nfa.state_ids(names)


@pytest.fixture
def evs(nfa):
    return lambda text: nfa.event_ids(text.split())
