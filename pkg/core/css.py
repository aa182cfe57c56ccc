"""
Complete synchronizing sequence (CSS) structures.

A CSS structure alternates state-pair layers and SI-state layers: h_a maps a
state pair to the SI-state obtained by absorbing an observable event, h_r maps
that SI-state to the state pairs reachable under the event. The structure is
saturated breadth-first; absorption is undefined on critical SI-states, which
bounds the depth.
"""
from collections import deque
from dataclasses import dataclass
from math import prod
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Set, Tuple
import logging

from opentelemetry import trace

from .automaton import EventId, Nfa, ObservableReach, StateId
from .errors import UsageError
from .protocol import ObservationArchitecture, SiState
from .utils import dot_quote

logger = logging.getLogger(__name__)
_tracer = trace.get_tracer(__name__)

StatePair = Tuple[StateId, StateId]


class CssState(NamedTuple):
    """State pair (origin, current) augmented with its layer."""
    origin: StateId
    current: StateId
    layer: int


class CssStructure:
    """Layered bipartite graph over state pairs and SI-states."""

    def __init__(self, nfa: Nfa, arch: ObservationArchitecture):
        self.nfa = nfa
        self.arch = arch
        self.t0: SiState = arch.tau0
        self.states: Set[CssState] = set()
        self.si_states: Set[SiState] = {self.t0}
        self.roots: Set[CssState] = set()
        self.critical: Set[SiState] = set()
        self.ha: Set[Tuple[CssState, EventId, SiState]] = set()
        # hr[tau][label] -> targets; label None stands for epsilon
        self.hr: Dict[SiState, Dict[Optional[EventId], Set[CssState]]] = {}
        self.csi_index: Dict[SiState, FrozenSet[StatePair]] = {}
        # root state -> CSI-state that introduced it (None for seeds)
        self.root_provenance: Dict[StateId, Optional[SiState]] = {}
        self._facts: Set[Tuple[SiState, CssState]] = set()
        self._pairs: Dict[SiState, FrozenSet[StatePair]] = {}
        # derived indexes built lazily by consumers (estimators)
        self.cache: Dict[str, object] = {}

    def _add_hr(self, tau: SiState, label: Optional[EventId], rho: CssState) -> bool:
        self.hr.setdefault(tau, {}).setdefault(label, set()).add(rho)
        fact = (tau, rho)
        if fact in self._facts:
            return False
        self._facts.add(fact)
        return True

    def _finalize(self) -> None:
        for tau, by_label in self.hr.items():
            self._pairs[tau] = frozenset((rho.origin, rho.current) for rhos in by_label.values() for rho in rhos)
        self.csi_index = {tau: self._pairs.get(tau, frozenset()) for tau in self.critical}

    # -- queries ---------------------------------------------------------

    @property
    def seeds(self) -> FrozenSet[StateId]:
        return frozenset(r.origin for r in self.roots)

    def pairs_of(self, tau: SiState) -> FrozenSet[StatePair]:
        """M(tau) for a CSI-state."""
        try:
            return self.csi_index[tau]
        except KeyError:
            raise UsageError(f"{tau.render(self.nfa)} is not a CSI-state of this structure") from None

    def reached_pairs(self, tau: SiState) -> FrozenSet[StatePair]:
        """State pairs targeted by h_r from any SI-state, critical or not."""
        return self._pairs.get(tau, frozenset())

    def sync_label(self, tau: SiState) -> EventId:
        """The single event labelling every h_r edge out of a CSI-state."""
        if tau not in self.critical:
            raise UsageError(f"{tau.render(self.nfa)} is not a CSI-state of this structure")
        labels = set(self.hr.get(tau, {}))
        if len(labels) != 1:
            raise UsageError(f"{tau.render(self.nfa)} has h_r labels {sorted(labels)}")
        return next(iter(labels))

    def max_layer(self) -> int:
        return max((rho.layer for rho in self.states), default=0)

    def layers(self) -> Tuple[Dict[int, Set[CssState]], Dict[int, Set[SiState]]]:
        """State-pair layers and SI-state layers, keyed by depth."""
        pair_layers: Dict[int, Set[CssState]] = {}
        for rho in self.states:
            pair_layers.setdefault(rho.layer, set()).add(rho)
        si_layers: Dict[int, Set[SiState]] = {0: {self.t0}}
        for rho, _, tau in self.ha:
            si_layers.setdefault(rho.layer + 1, set()).add(tau)
        return pair_layers, si_layers

    def sorted_critical(self) -> List[SiState]:
        return sorted(self.critical)

    # -- export ----------------------------------------------------------

    def _rho_label(self, rho: CssState) -> str:
        return f"({self.nfa.state_name(rho.origin)},{self.nfa.state_name(rho.current)},{rho.layer})"

    def _label(self, label: Optional[EventId]) -> str:
        return "eps" if label is None else self.nfa.event_name(label)

    def to_dot(self) -> str:
        lines = ["digraph css {", "  rankdir=LR;"]
        for tau in sorted(self.si_states):
            style = ' style=filled fillcolor="grey80"' if tau in self.critical else ""
            lines.append(f"  {dot_quote(tau.render(self.nfa))} [shape=oval{style}];")
        pair_layers, _ = self.layers()
        for layer in sorted(pair_layers):
            lines.append(f"  subgraph cluster_layer{layer} {{")
            lines.append(f'    label="layer {layer}"; style=dotted;')
            for rho in sorted(pair_layers[layer]):
                lines.append(f"    {dot_quote(self._rho_label(rho))} [shape=box];")
            lines.append("  }")
        for rho, sigma, tau in sorted(self.ha):
            lines.append(
                f"  {dot_quote(self._rho_label(rho))} -> {dot_quote(tau.render(self.nfa))} "
                f"[label={dot_quote(self._label(sigma))}];"
            )
        for tau in sorted(self.hr):
            for label in sorted(self.hr[tau], key=lambda e: -1 if e is None else e):
                for rho in sorted(self.hr[tau][label]):
                    lines.append(
                        f"  {dot_quote(tau.render(self.nfa))} -> {dot_quote(self._rho_label(rho))} "
                        f"[label={dot_quote(self._label(label))}];"
                    )
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        name = self.nfa.state_name
        return {
            "si_states": [t.render(self.nfa) for t in sorted(self.si_states)],
            "critical": [t.render(self.nfa) for t in self.sorted_critical()],
            "states": [[name(r.origin), name(r.current), r.layer] for r in sorted(self.states)],
            "roots": [name(r.origin) for r in sorted(self.roots)],
            "ha": [
                [[name(r.origin), name(r.current), r.layer], self._label(s), t.render(self.nfa)]
                for r, s, t in sorted(self.ha)
            ],
            "hr": [
                [tau.render(self.nfa), self._label(label), [name(r.origin), name(r.current), r.layer]]
                for tau in sorted(self.hr)
                for label in sorted(self.hr[tau], key=lambda e: -1 if e is None else e)
                for r in sorted(self.hr[tau][label])
            ],
            "pairs": {
                tau.render(self.nfa): [[name(a), name(b)] for a, b in sorted(self.csi_index[tau])]
                for tau in self.sorted_critical()
            },
        }

    def __repr__(self) -> str:
        return (
            f"CssStructure(|X|={len(self.states)}, |T|={len(self.si_states)}, "
            f"|Tc|={len(self.critical)}, roots={len(self.roots)})"
        )


def _saturate(nfa: Nfa, arch: ObservationArchitecture, seeds: Iterable[StateId], feasible: bool) -> CssStructure:
    strategy = arch.strategy
    reach = ObservableReach(nfa, arch.e_i)
    events = sorted(arch.e_i)
    css = CssStructure(nfa, arch)
    queue: deque = deque()

    def add_root(x: StateId, provenance: Optional[SiState]) -> None:
        rho = CssState(x, x, 0)
        if rho in css.roots:
            return
        css.roots.add(rho)
        css.states.add(rho)
        css.root_provenance[x] = provenance
        css._add_hr(css.t0, None, rho)
        if not strategy.is_critical(css.t0):
            queue.append((css.t0, rho))

    for x in sorted(seeds):
        add_root(x, None)

    while queue:
        tau, rho = queue.popleft()
        for sigma in events:
            targets = reach.r(rho.current, sigma)
            if not targets:
                continue
            nxt = strategy.absorb(tau, sigma)
            css.si_states.add(nxt)
            css.ha.add((rho, sigma, nxt))
            critical = strategy.is_critical(nxt)
            if critical:
                css.critical.add(nxt)
            for x in sorted(targets):
                child = CssState(rho.origin, x, rho.layer + 1)
                css.states.add(child)
                if css._add_hr(nxt, sigma, child) and not critical:
                    queue.append((nxt, child))
                if critical and feasible:
                    add_root(x, nxt)

    css._finalize()
    return css


def build_css(nfa: Nfa, arch: ObservationArchitecture, seeds: Iterable[StateId]) -> CssStructure:
    """CSS structure with layer-0 roots {(x, x, 0) | x in seeds}."""
    seeds = frozenset(seeds)
    if not seeds:
        raise UsageError("build_css needs at least one seed state")
    for x in seeds:
        nfa.state_name(x)
    with _tracer.start_as_current_span("css.build") as span:
        css = _saturate(nfa, arch, seeds, feasible=False)
        span.set_attribute("css.states", len(css.states))
        span.set_attribute("css.si_states", len(css.si_states))
        span.set_attribute("css.critical", len(css.critical))
    logger.info(f"Built {css!r} from {len(seeds)} seeds")
    return css


def build_ss(nfa: Nfa, arch: ObservationArchitecture, x: StateId) -> CssStructure:
    """Synchronizing sequence structure of a single state."""
    return build_css(nfa, arch, {x})


def build_feasible_css(nfa: Nfa, arch: ObservationArchitecture) -> CssStructure:
    """CSS structure restricted to SI-states realizable from X_0.

    Roots start at X_0; every state reached through a CSI-state becomes a new
    root so the next synchronization is explored from it.
    """
    with _tracer.start_as_current_span("css.build_feasible") as span:
        css = _saturate(nfa, arch, nfa.initial, feasible=True)
        span.set_attribute("css.states", len(css.states))
        span.set_attribute("css.si_states", len(css.si_states))
        span.set_attribute("css.critical", len(css.critical))
    logger.info(f"Built feasible {css!r}")
    return css


def pairs_of(css: CssStructure, tau: SiState) -> FrozenSet[StatePair]:
    return css.pairs_of(tau)


def check_sync_labels(css: CssStructure) -> List[SiState]:
    """CSI-states whose outgoing h_r edges carry more than one label."""
    return [tau for tau in css.sorted_critical() if len(css.hr.get(tau, {})) != 1]


@dataclass(frozen=True)
class Bounds:
    """Size bounds of the constructions for one plant and architecture."""
    delta: int
    delta_c: int
    lu: int
    max_css_states: int
    exact_noncritical: int
    exact_si_states: int

    @property
    def exact_critical(self) -> int:
        return self.exact_si_states - self.exact_noncritical

    @property
    def max_css_states_exact(self) -> int:
        """Bound on |state pairs| + |SI-states| using the exact SI-state count."""
        return self.max_css_states - self.delta + self.exact_si_states


def size_bounds(arch: ObservationArchitecture, nfa: Nfa) -> Bounds:
    sizes = [len(s.observable) for s in arch.sites]
    kappas = list(arch.kappas)
    base = prod(e ** (k - 1) for e, k in zip(sizes, kappas))
    delta_c = len(arch.e_i) * base
    delta = delta_c + base
    # kappa_max plus (kappa_i - 1) for every other site
    lu = 1 + sum(k - 1 for k in kappas)
    n = len(nfa.states)
    exact_noncritical = prod(sum(e ** j for j in range(k)) for e, k in zip(sizes, kappas))
    exact_si = prod(sum(e ** j for j in range(k + 1)) for e, k in zip(sizes, kappas))
    return Bounds(
        delta=delta,
        delta_c=delta_c,
        lu=lu,
        max_css_states=lu * n * n + n + delta,
        exact_noncritical=exact_noncritical,
        exact_si_states=exact_si,
    )
