"""
Plant model: nondeterministic finite automaton, natural projections and the
reachability operators used by every construction.

States and events are interned integers; display names live in side tables on
the Nfa so that set-heavy constructions hash cheaply.
"""
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple
import logging

from .errors import ModelError, UsageError

logger = logging.getLogger(__name__)

StateId = int
EventId = int
EventSeq = Tuple[EventId, ...]


class Nfa:
    """Immutable NFA G = (X, E, delta, X_0)."""

    def __init__(
        self,
        state_names: Sequence[str],
        event_names: Sequence[str],
        transitions: Dict[Tuple[StateId, EventId], FrozenSet[StateId]],
        initial: Iterable[StateId],
    ):
        if len(set(state_names)) != len(state_names):
            raise ModelError("State names must be unique")
        if len(set(event_names)) != len(event_names):
            raise ModelError("Event names must be unique")

        self._state_names: Tuple[str, ...] = tuple(state_names)
        self._event_names: Tuple[str, ...] = tuple(event_names)
        self._state_index = {name: i for i, name in enumerate(self._state_names)}
        self._event_index = {name: i for i, name in enumerate(self._event_names)}
        self.states: FrozenSet[StateId] = frozenset(range(len(self._state_names)))
        self.events: FrozenSet[EventId] = frozenset(range(len(self._event_names)))

        delta: Dict[Tuple[StateId, EventId], FrozenSet[StateId]] = {}
        for (src, ev), targets in transitions.items():
            self._check_state(src)
            self._check_event(ev)
            for dst in targets:
                self._check_state(dst)
            if targets:
                delta[(src, ev)] = frozenset(targets)
        self._delta = delta

        # outgoing edges per state, in canonical (event, target) order
        outgoing: Dict[StateId, List[Tuple[EventId, StateId]]] = {x: [] for x in self.states}
        for (src, ev), targets in sorted(delta.items()):
            for dst in sorted(targets):
                outgoing[src].append((ev, dst))
        self._outgoing = {x: tuple(edges) for x, edges in outgoing.items()}

        self.initial: FrozenSet[StateId] = frozenset(initial)
        if not self.initial:
            raise ModelError("At least one initial state is required")
        for x in self.initial:
            self._check_state(x)

    @classmethod
    def from_names(
        cls,
        states: Sequence[str],
        events: Sequence[str],
        transitions: Iterable[Tuple[str, str, Iterable[str]]],
        initial: Iterable[str],
    ) -> "Nfa":
        """Build an Nfa from display names, interning them in declaration order."""
        state_index = {name: i for i, name in enumerate(states)}
        event_index = {name: i for i, name in enumerate(events)}

        def sid(name: str) -> StateId:
            if name not in state_index:
                raise ModelError(f"Unknown state '{name}'", identifier=name)
            return state_index[name]

        def eid(name: str) -> EventId:
            if name not in event_index:
                raise ModelError(f"Unknown event '{name}'", identifier=name)
            return event_index[name]

        delta: Dict[Tuple[StateId, EventId], Set[StateId]] = {}
        for src, ev, targets in transitions:
            key = (sid(src), eid(ev))
            delta.setdefault(key, set()).update(sid(t) for t in targets)

        return cls(
            list(states),
            list(events),
            {k: frozenset(v) for k, v in delta.items()},
            [sid(x) for x in initial],
        )

    def with_initial(self, initial: Iterable[StateId]) -> "Nfa":
        """Return a copy of this plant with a different initial-state set."""
        return Nfa(self._state_names, self._event_names, self._delta, initial)

    # -- identifiers -----------------------------------------------------

    def _check_state(self, x: StateId) -> None:
        if not isinstance(x, int) or not 0 <= x < len(self._state_names):
            raise ModelError(f"Unknown state identifier {x!r}", identifier=str(x))

    def _check_event(self, e: EventId) -> None:
        if not isinstance(e, int) or not 0 <= e < len(self._event_names):
            raise ModelError(f"Unknown event identifier {e!r}", identifier=str(e))

    def state_id(self, name: str) -> StateId:
        try:
            return self._state_index[name]
        except KeyError:
            raise ModelError(f"Unknown state '{name}'", identifier=name) from None

    def event_id(self, name: str) -> EventId:
        try:
            return self._event_index[name]
        except KeyError:
            raise ModelError(f"Unknown event '{name}'", identifier=name) from None

    def state_ids(self, names: Iterable[str]) -> FrozenSet[StateId]:
        return frozenset(self.state_id(n) for n in names)

    def event_ids(self, names: Iterable[str]) -> EventSeq:
        return tuple(self.event_id(n) for n in names)

    def state_name(self, x: StateId) -> str:
        self._check_state(x)
        return self._state_names[x]

    def event_name(self, e: EventId) -> str:
        self._check_event(e)
        return self._event_names[e]

    @property
    def state_names(self) -> Tuple[str, ...]:
        return self._state_names

    @property
    def event_names(self) -> Tuple[str, ...]:
        return self._event_names

    def names_of(self, states: Iterable[StateId]) -> List[str]:
        """Display names of a state set, in canonical (interned id) order."""
        return [self.state_name(x) for x in sorted(states)]

    # -- transition relation ---------------------------------------------

    def successors(self, x: StateId, e: EventId) -> FrozenSet[StateId]:
        return self._delta.get((x, e), frozenset())

    def outgoing(self, x: StateId) -> Tuple[Tuple[EventId, StateId], ...]:
        return self._outgoing[x]

    def transitions(self) -> List[Tuple[StateId, EventId, StateId]]:
        return [(src, ev, dst) for (src, ev), targets in sorted(self._delta.items()) for dst in sorted(targets)]

    def reachable_states(self, sources: Optional[Iterable[StateId]] = None) -> FrozenSet[StateId]:
        """States reachable from `sources` (default X_0) by any string."""
        seen = set(self.initial if sources is None else sources)
        queue = deque(seen)
        while queue:
            x = queue.popleft()
            for _, dst in self._outgoing[x]:
                if dst not in seen:
                    seen.add(dst)
                    queue.append(dst)
        return frozenset(seen)

    def language_contains(self, s: Sequence[EventId]) -> bool:
        return bool(step(self, self.initial, s))

    def __repr__(self) -> str:
        return f"Nfa(states={len(self.states)}, events={len(self.events)}, transitions={len(self.transitions())})"


def step(nfa: Nfa, sources: Iterable[StateId], s: Sequence[EventId]) -> FrozenSet[StateId]:
    """Extended transition function delta(sources, s); empty when s is not executable."""
    current = frozenset(sources)
    for x in current:
        nfa._check_state(x)
    for ev in s:
        nfa._check_event(ev)
        if not current:
            continue
        current = frozenset(dst for x in current for dst in nfa.successors(x, ev))
    return current


def project(s: Sequence[EventId], observable: Iterable[EventId]) -> EventSeq:
    """Natural projection: erase every event outside `observable`, keeping order."""
    keep = observable if isinstance(observable, (set, frozenset)) else frozenset(observable)
    return tuple(ev for ev in s if ev in keep)


def unobservable_reach(nfa: Nfa, observable: Iterable[EventId], sources: Iterable[StateId]) -> FrozenSet[StateId]:
    """UR(sources): worklist fixpoint over edges labelled by events outside `observable`."""
    keep = frozenset(observable)
    seen = set(sources)
    for x in seen:
        nfa._check_state(x)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for ev, dst in nfa.outgoing(x):
            if ev not in keep and dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return frozenset(seen)


def observable_reach(
    nfa: Nfa, observable: Iterable[EventId], sources: Iterable[StateId], sigma: EventId
) -> FrozenSet[StateId]:
    """R_sigma(sources) = UR(delta(UR(sources), sigma))."""
    keep = frozenset(observable)
    if sigma not in keep:
        raise UsageError(f"Event {nfa.event_name(sigma)} is not observable by any site")
    before = unobservable_reach(nfa, keep, sources)
    after = frozenset(dst for x in before for dst in nfa.successors(x, sigma))
    return unobservable_reach(nfa, keep, after)


class ObservableReach:
    """Memoised UR / R_sigma for one (plant, E_I) pair."""

    def __init__(self, nfa: Nfa, observable: Iterable[EventId]):
        self.nfa = nfa
        self.observable = frozenset(observable)
        self._ur: Dict[StateId, FrozenSet[StateId]] = {}
        self._r: Dict[Tuple[StateId, EventId], FrozenSet[StateId]] = {}

    def ur(self, x: StateId) -> FrozenSet[StateId]:
        hit = self._ur.get(x)
        if hit is None:
            hit = unobservable_reach(self.nfa, self.observable, (x,))
            self._ur[x] = hit
        return hit

    def r(self, x: StateId, sigma: EventId) -> FrozenSet[StateId]:
        key = (x, sigma)
        hit = self._r.get(key)
        if hit is None:
            hit = observable_reach(self.nfa, self.observable, (x,), sigma)
            self._r[key] = hit
        return hit

    def r_set(self, sources: Iterable[StateId], sigma: EventId) -> FrozenSet[StateId]:
        out: Set[StateId] = set()
        for x in sources:
            out |= self.r(x, sigma)
        return frozenset(out)
