"""
Pydantic models for the JSON model dialect, golden facts and verdict reports.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .automaton import Nfa, StateId
from .errors import ModelError
from .protocol import ObservationArchitecture, Site, validate

VERDICT_SCHEMA_VERSION = "1"


class TransitionSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    source: str = Field(..., alias="from")
    event: str
    to: List[str] = Field(..., description="Target states; a single name is accepted")

    @field_validator("to", mode="before")
    @classmethod
    def coerce_single_target(cls, v):
        return [v] if isinstance(v, str) else v


class SiteSpec(BaseModel):
    """One observation site: the events it sees and its threshold."""
    name: str
    events: List[str] = Field(default_factory=list)
    kappa: int = Field(..., description="Number of recorded events that triggers a synchronization")


class ModelFile(BaseModel):
    """
    Plant, observation architecture and optional secret in one document.

    Referential integrity is checked here; alphabet and threshold constraints
    are checked again when the architecture is built.
    """
    states: List[str]
    events: List[str]
    initial: List[str]
    transitions: List[TransitionSpec] = Field(default_factory=list)
    sites: List[SiteSpec]
    secret: Optional[List[str]] = None

    @model_validator(mode="after")
    def check_references(self):
        states = set(self.states)
        events = set(self.events)
        if len(states) != len(self.states):
            raise ValueError("Duplicate state names")
        if len(events) != len(self.events):
            raise ValueError("Duplicate event names")
        if not self.initial:
            raise ValueError("At least one initial state is required")
        if not self.sites:
            raise ValueError("At least one observation site is required")
        for name in self.initial + (self.secret or []):
            if name not in states:
                raise ValueError(f"Unknown state '{name}'")
        for t in self.transitions:
            if t.source not in states:
                raise ValueError(f"Unknown state '{t.source}' in transition")
            if t.event not in events:
                raise ValueError(f"Unknown event '{t.event}' in transition")
            for target in t.to:
                if target not in states:
                    raise ValueError(f"Unknown state '{target}' in transition")
        for site in self.sites:
            if site.kappa < 1:
                raise ValueError(f"Site {site.name} has threshold {site.kappa}; thresholds must be >= 1")
            for ev in site.events:
                if ev not in events:
                    raise ValueError(f"Site {site.name} observes unknown event '{ev}'")
        return self

    def to_plant(self, initial: Optional[List[str]] = None) -> Tuple[Nfa, ObservationArchitecture]:
        """Intern the names and build the plant and its observation architecture."""
        nfa = Nfa.from_names(
            self.states,
            self.events,
            [(t.source, t.event, t.to) for t in self.transitions],
            self.initial if initial is None else initial,
        )
        sites = [
            Site(index=i, observable=frozenset(nfa.event_ids(s.events)), kappa=s.kappa, name=s.name)
            for i, s in enumerate(self.sites, start=1)
        ]
        arch = validate(ObservationArchitecture(sites), nfa)
        return nfa, arch

    def secret_ids(self, nfa: Nfa) -> frozenset:
        return nfa.state_ids(self.secret or [])

    @classmethod
    def from_plant(
        cls, nfa: Nfa, arch: ObservationArchitecture, secret: Optional[List[StateId]] = None
    ) -> "ModelFile":
        by_edge: Dict[Tuple[int, int], List[str]] = {}
        for src, ev, dst in nfa.transitions():
            by_edge.setdefault((src, ev), []).append(nfa.state_name(dst))
        return cls(
            states=list(nfa.state_names),
            events=list(nfa.event_names),
            initial=nfa.names_of(nfa.initial),
            transitions=[
                TransitionSpec(source=nfa.state_name(src), event=nfa.event_name(ev), to=targets)
                for (src, ev), targets in by_edge.items()
            ],
            sites=[
                SiteSpec(name=s.label, events=[nfa.event_name(e) for e in sorted(s.observable)], kappa=s.kappa)
                for s in arch.sites
            ],
            secret=None if secret is None else nfa.names_of(secret),
        )

    def dumps(self) -> str:
        return json.dumps(self.model_dump(by_alias=True, exclude_none=True), indent=2) + "\n"


def _load_json(path: Union[str, Path]) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ModelError(f"Cannot read {path}: {e}", identifier=str(path)) from e
    except UnicodeDecodeError as e:
        raise ModelError(f"{path} is not UTF-8 text: {e}", identifier=str(path)) from e
    except json.JSONDecodeError as e:
        raise ModelError(f"{path} is not valid JSON: {e}", identifier=str(path)) from e


def load_model(path: Union[str, Path]) -> ModelFile:
    """Read and validate a model file; every failure surfaces as ModelError."""
    try:
        return ModelFile.model_validate(_load_json(path))
    except ValidationError as e:
        raise ModelError(f"Invalid model {path}: {e}", identifier=str(path)) from e


FactKind = Literal["UR", "Rsigma", "Member-Delta", "Member-M", "SI-trace", "Estimate"]


class GoldenFact(BaseModel):
    """A reference fact about the fixture plant, checked by the oracle."""
    name: str
    kind: FactKind
    args: Dict[str, Any] = Field(default_factory=dict)
    expected: Any
    source: str = ""


class GoldenFactSet(BaseModel):
    model: str = Field(..., description="Model file the facts refer to, relative to this file")
    facts: List[GoldenFact]
    # statements about unnamed CSI-states; kept for reference, never evaluated
    annotations: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_unique_names(self):
        names = [f.name for f in self.facts]
        if len(set(names)) != len(names):
            raise ValueError("Golden fact names must be unique")
        return self


def load_golden_facts(path: Union[str, Path]) -> Tuple[GoldenFactSet, ModelFile]:
    """Load a facts file together with the model it refers to."""
    try:
        facts = GoldenFactSet.model_validate(_load_json(path))
    except ValidationError as e:
        raise ModelError(f"Invalid golden facts {path}: {e}", identifier=str(path)) from e
    return facts, load_model(Path(path).parent / facts.model)


class FactResult(BaseModel):
    name: str
    kind: str
    passed: bool
    expected: Any
    actual: Any


class FactReport(BaseModel):
    passed: bool
    results: List[FactResult]
    annotations: List[str] = Field(default_factory=list)


class VerdictReport(BaseModel):
    """Serialized opacity verdict; `state` is the estimate that exposes the secret."""
    schema_version: str = VERDICT_SCHEMA_VERSION
    property: str
    holds: bool
    witness: Optional[List[str]] = None
    state: Optional[List[str]] = None
