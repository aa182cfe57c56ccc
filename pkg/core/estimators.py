"""
State estimators driven by CSI-states.

- DO-observer: current-state estimates right after each synchronization
- initial-state estimator: sets of (initial, current) pairs
- synchronization-reversed observer: consumes reversed CSI-sequences
- Coordinator: online estimation over a precomputed CSS structure
"""
from collections import deque
from typing import Callable, Dict, FrozenSet, Generic, Hashable, Iterable, List, Optional, Sequence, Set, Tuple, TypeVar
import logging

from opentelemetry import trace

from .automaton import EventId, Nfa, StateId, unobservable_reach
from .css import CssStructure, StatePair
from .errors import StateSpaceLimitError, UsageError
from .protocol import ObservationArchitecture, Run, SiState, replay as replay_run
from .utils import dot_quote, format_state_set

logger = logging.getLogger(__name__)
_tracer = trace.get_tracer(__name__)

DEFAULT_MAX_OBSERVER_STATES = 1_000_000

Q = TypeVar("Q", bound=Hashable)


class PairIndex:
    """Forward and backward adjacency of M(tau) for every CSI-state of a structure."""

    def __init__(self, css: CssStructure):
        self.css = css
        self.forward: Dict[SiState, Dict[StateId, FrozenSet[StateId]]] = {}
        self.backward: Dict[SiState, Dict[StateId, FrozenSet[StateId]]] = {}
        for tau, pairs in css.csi_index.items():
            fwd: Dict[StateId, Set[StateId]] = {}
            bwd: Dict[StateId, Set[StateId]] = {}
            for a, b in pairs:
                fwd.setdefault(a, set()).add(b)
                bwd.setdefault(b, set()).add(a)
            self.forward[tau] = {k: frozenset(v) for k, v in fwd.items()}
            self.backward[tau] = {k: frozenset(v) for k, v in bwd.items()}

    def _check(self, tau: SiState) -> None:
        if tau not in self.forward:
            raise UsageError(f"{tau.render(self.css.nfa)} is not a CSI-state of this structure")

    def image(self, tau: SiState, sources: Iterable[StateId]) -> FrozenSet[StateId]:
        self._check(tau)
        fwd = self.forward[tau]
        out: Set[StateId] = set()
        for x in sources:
            out |= fwd.get(x, frozenset())
        return frozenset(out)

    def preimage(self, tau: SiState, targets: Iterable[StateId]) -> FrozenSet[StateId]:
        self._check(tau)
        bwd = self.backward[tau]
        out: Set[StateId] = set()
        for x in targets:
            out |= bwd.get(x, frozenset())
        return frozenset(out)

    def compose(self, tau: SiState, pairs: Iterable[StatePair]) -> FrozenSet[StatePair]:
        self._check(tau)
        fwd = self.forward[tau]
        return frozenset((x1, x3) for x1, x2 in pairs for x3 in fwd.get(x2, ()))


def _pair_index(css: CssStructure) -> PairIndex:
    index = css.cache.get("pair_index")
    if index is None:
        index = PairIndex(css)
        css.cache["pair_index"] = index
    return index


def current_estimate(css: CssStructure, tau: SiState, sources: Iterable[StateId]) -> FrozenSet[StateId]:
    """Current-state estimate after a single synchronization: image of `sources` under M(tau)."""
    return _pair_index(css).image(tau, sources)


def initial_estimate(css: CssStructure, tau: SiState, x0set: Iterable[StateId]) -> FrozenSet[StateId]:
    """Initial-state estimate after a single synchronization: domain of M(tau) within `x0set`."""
    index = _pair_index(css)
    index._check(tau)
    origins = index.forward[tau]
    return frozenset(x for x in x0set if x in origins)


class Observer(Generic[Q]):
    """Deterministic automaton over CSI-states with a partial transition function."""

    def __init__(
        self,
        nfa: Nfa,
        kind: str,
        initial: Q,
        alphabet: Sequence[SiState],
        states: Set[Q],
        transitions: Dict[Tuple[Q, SiState], Q],
    ):
        self.nfa = nfa
        self.kind = kind
        self.initial = initial
        self.alphabet: Tuple[SiState, ...] = tuple(alphabet)
        self._alphabet_set = frozenset(self.alphabet)
        self.states = states
        self.transitions = transitions

    def successor(self, q: Q, tau: SiState) -> Optional[Q]:
        if tau not in self._alphabet_set:
            raise UsageError(f"{tau.render(self.nfa)} is not in the observer alphabet")
        return self.transitions.get((q, tau))

    def outgoing(self, q: Q) -> List[Tuple[SiState, Q]]:
        """Defined transitions of `q` in canonical alphabet order."""
        return [(tau, self.transitions[(q, tau)]) for tau in self.alphabet if (q, tau) in self.transitions]

    def language_upto(self, depth: int) -> List[Tuple[SiState, ...]]:
        """All accepted CSI-sequences of length <= depth."""
        accepted: List[Tuple[SiState, ...]] = [()]
        frontier: List[Tuple[Tuple[SiState, ...], Q]] = [((), self.initial)]
        for _ in range(depth):
            nxt = []
            for word, q in frontier:
                for tau, target in self.outgoing(q):
                    nxt.append((word + (tau,), target))
            accepted.extend(w for w, _ in nxt)
            frontier = nxt
        return accepted

    # -- rendering -------------------------------------------------------

    def state_label(self, q: Q) -> str:
        if self.kind == "initial":
            return "{" + ",".join(
                f"({self.nfa.state_name(a)},{self.nfa.state_name(b)})" for a, b in sorted(q)
            ) + "}"
        return format_state_set(self.nfa.names_of(q))

    def sorted_states(self) -> List[Q]:
        return sorted(self.states, key=lambda q: (len(q), sorted(q)))

    def to_dot(self) -> str:
        lines = [f"digraph {self.kind}_observer {{", "  rankdir=LR;"]
        for q in self.sorted_states():
            shape = "doublecircle" if q == self.initial else "box"
            lines.append(f"  {dot_quote(self.state_label(q))} [shape={shape}];")
        for q in self.sorted_states():
            for tau, target in self.outgoing(q):
                lines.append(
                    f"  {dot_quote(self.state_label(q))} -> {dot_quote(self.state_label(target))} "
                    f"[label={dot_quote(tau.render(self.nfa))}];"
                )
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "initial": self.state_label(self.initial),
            "alphabet": [t.render(self.nfa) for t in self.alphabet],
            "states": [self.state_label(q) for q in self.sorted_states()],
            "transitions": [
                [self.state_label(q), tau.render(self.nfa), self.state_label(target)]
                for q in self.sorted_states()
                for tau, target in self.outgoing(q)
            ],
        }

    def __repr__(self) -> str:
        return f"Observer(kind={self.kind}, states={len(self.states)}, transitions={len(self.transitions)})"


class IObserver(Observer[FrozenSet[StatePair]]):
    """Initial-state estimator: states are sets of (initial, current) pairs."""

    @staticmethod
    def first_components(m: FrozenSet[StatePair]) -> FrozenSet[StateId]:
        """F(m): the initial-state estimate carried by an estimator state."""
        return frozenset(a for a, _ in m)


def _determinize(
    initial: Q,
    alphabet: Sequence[SiState],
    successor: Callable[[SiState, Q], Q],
    max_states: int,
    name: str,
) -> Tuple[Set[Q], Dict[Tuple[Q, SiState], Q]]:
    """Subset construction; `successor` has the (tau, state) signature of the PairIndex maps."""
    states: Set[Q] = {initial}
    transitions: Dict[Tuple[Q, SiState], Q] = {}
    queue = deque([initial])
    while queue:
        q = queue.popleft()
        for tau in alphabet:
            target = successor(tau, q)
            if not target:
                continue
            transitions[(q, tau)] = target
            if target not in states:
                if len(states) >= max_states:
                    raise StateSpaceLimitError(name, max_states)
                states.add(target)
                queue.append(target)
    return states, transitions


def build_do_observer(
    nfa: Nfa,
    arch: ObservationArchitecture,
    css_feasible: CssStructure,
    max_states: int = DEFAULT_MAX_OBSERVER_STATES,
) -> Observer[FrozenSet[StateId]]:
    """DO-observer over the CSI-states of a feasible CSS structure; starts at UR(X_0)."""
    index = _pair_index(css_feasible)
    alphabet = css_feasible.sorted_critical()
    initial = unobservable_reach(nfa, arch.e_i, nfa.initial)
    with _tracer.start_as_current_span("observer.build_current") as span:
        states, transitions = _determinize(initial, alphabet, index.image, max_states, "DO-observer")
        span.set_attribute("observer.states", len(states))
    obs = Observer(nfa, "current", initial, alphabet, states, transitions)
    logger.info(f"Built {obs!r}")
    return obs


def build_initial_estimator(
    nfa: Nfa,
    arch: ObservationArchitecture,
    css_feasible: CssStructure,
    max_states: int = DEFAULT_MAX_OBSERVER_STATES,
) -> IObserver:
    """Initial-state estimator: pair sets starting at {(x0, x0) | x0 in X_0}."""
    index = _pair_index(css_feasible)
    alphabet = css_feasible.sorted_critical()
    initial = frozenset((x, x) for x in nfa.initial)
    with _tracer.start_as_current_span("observer.build_initial") as span:
        states, transitions = _determinize(initial, alphabet, index.compose, max_states, "initial-state estimator")
        span.set_attribute("observer.states", len(states))
    obs = IObserver(nfa, "initial", initial, alphabet, states, transitions)
    logger.info(f"Built {obs!r}")
    return obs


def build_reversed_observer(
    nfa: Nfa,
    arch: ObservationArchitecture,
    css_full: CssStructure,
    max_states: int = DEFAULT_MAX_OBSERVER_STATES,
) -> Observer[FrozenSet[StateId]]:
    """Synchronization-reversed observer; needs a CSS structure seeded with every plant state."""
    if css_full.seeds != nfa.states:
        raise UsageError("The reversed observer needs a CSS structure built over all plant states")
    index = _pair_index(css_full)
    alphabet = css_full.sorted_critical()
    initial = frozenset(nfa.states)
    with _tracer.start_as_current_span("observer.build_reversed") as span:
        states, transitions = _determinize(initial, alphabet, index.preimage, max_states, "reversed observer")
        span.set_attribute("observer.states", len(states))
    obs = Observer(nfa, "reversed", initial, alphabet, states, transitions)
    logger.info(f"Built {obs!r}")
    return obs


def run_observer(obs: Observer, iota: Sequence[SiState]):
    """Fold the transition function over `iota`; None when some step is undefined."""
    q = obs.initial
    for tau in iota:
        q = obs.successor(q, tau)
        if q is None:
            return None
    return q


class Coordinator:
    """Online estimation at the coordinator using a precomputed CSS structure."""

    def __init__(self, css: CssStructure, x0set: Optional[Iterable[StateId]] = None):
        self.css = css
        self.index = _pair_index(css)
        x0 = frozenset(css.nfa.initial if x0set is None else x0set)
        self.current: FrozenSet[StateId] = unobservable_reach(css.nfa, css.arch.e_i, x0)
        self.pairs: FrozenSet[StatePair] = frozenset((x, x) for x in x0)
        self.received: List[SiState] = []

    @property
    def initial(self) -> FrozenSet[StateId]:
        return IObserver.first_components(self.pairs)

    def receive(self, tau: SiState) -> FrozenSet[StateId]:
        """Update both estimates with a newly received CSI-state."""
        self.current = self.index.image(tau, self.current)
        self.pairs = self.index.compose(tau, self.pairs)
        self.received.append(tau)
        logger.debug(
            f"Received {tau.render(self.css.nfa)}: current={self.css.nfa.names_of(self.current)} "
            f"initial={self.css.nfa.names_of(self.initial)}"
        )
        return self.current


def replay(nfa: Nfa, arch: ObservationArchitecture, css: CssStructure, s: Sequence[EventId]) -> Run:
    """Replay a plant string and attach the estimates computed at each synchronization."""
    run = replay_run(nfa, arch, s)
    coordinator = Coordinator(css)
    run.per_sync_estimates = []
    run.per_sync_initial = []
    for tau in run.csi_trace:
        run.per_sync_estimates.append(coordinator.receive(tau))
        run.per_sync_initial.append(coordinator.initial)
    return run
