import json

import pytest

from core.errors import ModelError
from core.models import ModelFile, load_golden_facts, load_model
from conftest import FACTS, FIXTURE


def _write(tmp_path, payload):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def payload():
    return json.loads(FIXTURE.read_text(encoding="utf-8"))


def test_fixture_model_rebuilds_from_its_plant(model, nfa, arch):
    assert ModelFile.from_plant(nfa, arch, model.secret_ids(nfa)) == model
    assert ModelFile.model_validate_json(model.dumps()) == model


def test_single_target_is_accepted(tmp_path, payload):
    payload["transitions"][0]["to"] = "x4"
    model = load_model(_write(tmp_path, payload))
    assert model.transitions[0].to == ["x4"]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda p: p["transitions"].append({"from": "x9", "event": "a12", "to": ["x0"]}),
        lambda p: p["transitions"].append({"from": "x0", "event": "zz", "to": ["x0"]}),
        lambda p: p["sites"][0]["events"].append("zz"),
        lambda p: p.update(initial=["x7"]),
        lambda p: p.update(initial=[]),
        lambda p: p.update(secret=["x9"]),
        lambda p: p.update(states=["x0", "x0", "x1", "x2", "x3", "x4"]),
        lambda p: p["sites"][1].update(kappa=0),
        lambda p: p.pop("sites"),
    ],
    ids=["source", "event", "site-event", "initial", "no-initial", "secret", "duplicate", "kappa", "no-sites"],
)
def test_invalid_models_raise_model_error(tmp_path, payload, mutate):
    mutate(payload)
    with pytest.raises(ModelError):
        load_model(_write(tmp_path, payload))


def test_unreadable_model(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ModelError) as excinfo:
        load_model(path)
    assert excinfo.value.identifier == str(path)


def test_initial_override(model):
    nfa, _ = model.to_plant(["x2"])
    assert nfa.names_of(nfa.initial) == ["x2"]


def test_golden_facts_refer_to_fixture():
    facts, model = load_golden_facts(FACTS)
    assert model == load_model(FIXTURE)
    assert len(facts.facts) == 10
    assert {f.kind for f in facts.facts} >= {"UR", "Rsigma", "Member-M", "SI-trace", "Estimate"}


def test_golden_fact_names_are_unique(tmp_path):
    facts = {
        "model": str(FIXTURE),
        "facts": [
            {"name": "dup", "kind": "UR", "args": {"states": ["x0"]}, "expected": ["x0", "x1"]},
            {"name": "dup", "kind": "UR", "args": {"states": ["x1"]}, "expected": ["x1"]},
        ],
    }
    path = tmp_path / "facts.json"
    path.write_text(json.dumps(facts), encoding="utf-8")
    with pytest.raises(ModelError):
        load_golden_facts(path)
