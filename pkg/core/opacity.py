"""
Opacity verification over the CSI-state driven estimators.

Each check scans the reachable states of the relevant observer breadth-first,
so the witness returned for a violation is a shortest CSI-sequence.
"""
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple
import logging

from opentelemetry import trace

from .automaton import Nfa, StateId
from .css import build_css, build_feasible_css
from .errors import UsageError
from .estimators import (
    DEFAULT_MAX_OBSERVER_STATES,
    IObserver,
    Observer,
    build_do_observer,
    build_initial_estimator,
    build_reversed_observer,
)
from .models import VerdictReport
from .protocol import ObservationArchitecture, SiState

logger = logging.getLogger(__name__)
_tracer = trace.get_tracer(__name__)


@dataclass(frozen=True)
class SecretSpec:
    """Secret state set X_S."""
    secret: FrozenSet[StateId]

    @classmethod
    def for_iso(cls, secret: Iterable[StateId], x0set: Iterable[StateId]) -> "SecretSpec":
        secret = frozenset(secret)
        extra = secret - frozenset(x0set)
        if extra:
            raise UsageError(f"Initial-state opacity needs secret states within X_0; outside: {sorted(extra)}")
        return cls(secret)

    @classmethod
    def for_csso(cls, secret: Iterable[StateId], states: Iterable[StateId]) -> "SecretSpec":
        secret = frozenset(secret)
        extra = secret - frozenset(states)
        if extra:
            raise UsageError(f"Unknown secret states: {sorted(extra)}")
        return cls(secret)


@dataclass
class Verdict:
    """Outcome of an opacity check; a violation carries its witness."""
    property: str
    holds: bool
    witness: Optional[List[SiState]] = None
    violating_state: Optional[FrozenSet] = None
    estimate: Optional[FrozenSet[StateId]] = None

    def report(self, nfa: Nfa) -> VerdictReport:
        return VerdictReport(
            property=self.property,
            holds=self.holds,
            witness=None if self.witness is None else [t.render(nfa) for t in self.witness],
            state=None if self.estimate is None else nfa.names_of(self.estimate),
        )


def _shortest_violation(
    obs: Observer, violates: Callable[[FrozenSet], bool]
) -> Optional[Tuple[List[SiState], FrozenSet]]:
    parent: Dict[FrozenSet, Optional[Tuple[FrozenSet, SiState]]] = {obs.initial: None}
    queue = deque([obs.initial])
    while queue:
        q = queue.popleft()
        if violates(q):
            path: List[SiState] = []
            cur = q
            while parent[cur] is not None:
                prev, tau = parent[cur]
                path.append(tau)
                cur = prev
            return list(reversed(path)), q
        for tau, target in obs.outgoing(q):
            if target not in parent:
                parent[target] = (q, tau)
                queue.append(target)
    return None


def verify_iso_via_estimator(iobs: IObserver, x0set: Iterable[StateId], secret: Iterable[StateId]) -> Verdict:
    """Initial-state opacity: every estimator state must keep a non-secret initial state."""
    spec = SecretSpec.for_iso(secret, x0set)
    with _tracer.start_as_current_span("opacity.iso_estimator"):
        found = _shortest_violation(iobs, lambda m: IObserver.first_components(m) <= spec.secret)
    if found is None:
        return Verdict("iso", True)
    witness, m = found
    logger.info(f"Initial-state opacity violated after {len(witness)} synchronizations")
    return Verdict("iso", False, witness, m, IObserver.first_components(m))


def verify_iso_via_reversed(robs: Observer, x0set: Iterable[StateId], secret: Iterable[StateId]) -> Verdict:
    """Initial-state opacity via the reversed observer; the witness is returned in forward order."""
    x0 = frozenset(x0set)
    spec = SecretSpec.for_iso(secret, x0)

    def violates(q: FrozenSet[StateId]) -> bool:
        hit = q & x0
        return bool(hit) and hit <= spec.secret

    with _tracer.start_as_current_span("opacity.iso_reversed"):
        found = _shortest_violation(robs, violates)
    if found is None:
        return Verdict("iso-reversed", True)
    reversed_word, q = found
    logger.info(f"Initial-state opacity violated (reversed observer) after {len(reversed_word)} synchronizations")
    return Verdict("iso-reversed", False, list(reversed(reversed_word)), q, q & x0)


def verify_csso(obs: Observer, secret: Iterable[StateId]) -> Verdict:
    """Current-state-at-synchronization opacity over the DO-observer."""
    if obs.kind != "current":
        raise UsageError("Current-state opacity is checked on the DO-observer")
    spec = SecretSpec(frozenset(secret))
    with _tracer.start_as_current_span("opacity.csso"):
        found = _shortest_violation(obs, lambda q: q <= spec.secret)
    if found is None:
        return Verdict("csso", True)
    witness, q = found
    logger.info(f"Current-state opacity violated after {len(witness)} synchronizations")
    return Verdict("csso", False, witness, q, q)


def check_iso(
    nfa: Nfa,
    arch: ObservationArchitecture,
    secret: Iterable[StateId],
    method: str = "estimator",
    max_states: int = DEFAULT_MAX_OBSERVER_STATES,
) -> Verdict:
    """Build the structures a method needs and verify initial-state opacity."""
    if method == "estimator":
        iobs = build_initial_estimator(nfa, arch, build_feasible_css(nfa, arch), max_states)
        return verify_iso_via_estimator(iobs, nfa.initial, secret)
    if method == "reversed":
        robs = build_reversed_observer(nfa, arch, build_css(nfa, arch, nfa.states), max_states)
        return verify_iso_via_reversed(robs, nfa.initial, secret)
    raise UsageError(f"Unknown initial-state opacity method '{method}'")


def check_csso(
    nfa: Nfa,
    arch: ObservationArchitecture,
    secret: Iterable[StateId],
    max_states: int = DEFAULT_MAX_OBSERVER_STATES,
) -> Verdict:
    """Build the DO-observer and verify current-state-at-synchronization opacity."""
    SecretSpec.for_csso(secret, nfa.states)
    obs = build_do_observer(nfa, arch, build_feasible_css(nfa, arch), max_states)
    return verify_csso(obs, secret)
