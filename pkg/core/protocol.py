"""
The DO-based synchronization protocol: observation sites, SI-states, the
absorbing transition and replay of plant strings into runs.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging

from .automaton import EventId, EventSeq, Nfa, StateId, step
from .errors import ConfigError, CorruptedStateError, NotInLanguageError, UndefinedTransitionError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Site:
    """Observation site O_i with observable alphabet E_i and threshold kappa_i."""
    index: int
    observable: FrozenSet[EventId]
    kappa: int
    name: str = ""

    @property
    def label(self) -> str:
        return self.name or f"O{self.index}"


@dataclass(frozen=True, order=True)
class SiState:
    """Synchronization information state: one recorded event sequence per site.

    Ordering is lexicographic over components in site order, events compared
    by interned id.
    """
    components: Tuple[EventSeq, ...]

    @classmethod
    def empty(cls, m: int) -> "SiState":
        return cls(tuple(() for _ in range(m)))

    def __len__(self) -> int:
        return len(self.components)

    def observed_count(self) -> int:
        return sum(len(c) for c in self.components)

    def render(self, nfa: Nfa) -> str:
        """Canonical text form, e.g. "(a12.a12|a12.a12|g3)"."""
        parts = [".".join(nfa.event_name(e) for e in comp) for comp in self.components]
        return "(" + "|".join(parts) + ")"

    @classmethod
    def parse(cls, text: str, nfa: Nfa, arch: "ObservationArchitecture") -> "SiState":
        """Parse the canonical text form back into an SI-state of `arch`."""
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise UsageError(f"SI-state text must be wrapped in parentheses: {text!r}")
        parts = body[1:-1].split("|")
        if len(parts) != len(arch.sites):
            raise UsageError(f"SI-state {text!r} has {len(parts)} components, expected {len(arch.sites)}")
        comps = []
        for site, part in zip(arch.sites, parts):
            names = [p for p in part.split(".") if p] if part else []
            comp = nfa.event_ids(names)
            for ev in comp:
                if ev not in site.observable:
                    raise UsageError(f"Event {nfa.event_name(ev)} is not observable by site {site.label}")
            comps.append(comp)
        tau = cls(tuple(comps))
        arch.check_well_formed(tau)
        return tau


class SynchronizationStrategy(ABC):
    """Abstract synchronization strategy: when to synchronize, how to record."""

    def __init__(self, arch: "ObservationArchitecture"):
        self.arch = arch

    @abstractmethod
    def is_critical(self, tau: SiState) -> bool:
        """True when `tau` is immediately followed by a synchronization."""
        pass

    @abstractmethod
    def absorb(self, tau: SiState, sigma: EventId) -> SiState:
        """Record `sigma` at every site that observes it."""
        pass


class ThresholdStrategy(SynchronizationStrategy):
    """Synchronize as soon as any site has recorded kappa_i events."""

    def is_critical(self, tau: SiState) -> bool:
        critical = False
        for site, comp in zip(self.arch.sites, tau.components):
            if len(comp) > site.kappa:
                raise CorruptedStateError(site.index, len(comp), site.kappa)
            if len(comp) == site.kappa:
                critical = True
        return critical

    def absorb(self, tau: SiState, sigma: EventId) -> SiState:
        observers = self.arch.sites_of(sigma)
        if not observers:
            raise UsageError(f"Event id {sigma} is not observable by any site")
        if self.is_critical(tau):
            raise UndefinedTransitionError(str(tau.components), str(sigma))
        comps = list(tau.components)
        for i in observers:
            comps[i - 1] = comps[i - 1] + (sigma,)
        return SiState(tuple(comps))


class ObservationArchitecture:
    """m observation sites together with the synchronization strategy they follow."""

    def __init__(self, sites: Sequence[Site], strategy_cls: type = ThresholdStrategy):
        if not sites:
            raise ConfigError("At least one observation site is required")
        self.sites: Tuple[Site, ...] = tuple(sites)
        for expected, site in enumerate(self.sites, start=1):
            if site.index != expected:
                raise ConfigError(f"Site indices must be 1..m without gaps (found {site.index} at position {expected})")

        index: Dict[EventId, List[int]] = {}
        for site in self.sites:
            for ev in site.observable:
                index.setdefault(ev, []).append(site.index)
        self._sites_of: Dict[EventId, Tuple[int, ...]] = {ev: tuple(sorted(ix)) for ev, ix in index.items()}
        self.e_i: FrozenSet[EventId] = frozenset(self._sites_of)
        self.strategy: SynchronizationStrategy = strategy_cls(self)

    @classmethod
    def from_alphabets(cls, alphabets: Sequence[Iterable[EventId]], kappas: Sequence[int]) -> "ObservationArchitecture":
        if len(alphabets) != len(kappas):
            raise ConfigError("One threshold per site is required")
        return cls([Site(i + 1, frozenset(a), k) for i, (a, k) in enumerate(zip(alphabets, kappas))])

    @property
    def m(self) -> int:
        return len(self.sites)

    @property
    def tau0(self) -> SiState:
        return SiState.empty(self.m)

    @property
    def kappas(self) -> Tuple[int, ...]:
        return tuple(s.kappa for s in self.sites)

    def sites_of(self, sigma: EventId) -> Tuple[int, ...]:
        """I(sigma): indices of the sites observing sigma."""
        return self._sites_of.get(sigma, ())

    def check_well_formed(self, tau: SiState) -> None:
        if len(tau.components) != self.m:
            raise CorruptedStateError(0, len(tau.components), self.m)
        for site, comp in zip(self.sites, tau.components):
            if len(comp) > site.kappa:
                raise CorruptedStateError(site.index, len(comp), site.kappa)

    def __repr__(self) -> str:
        return f"ObservationArchitecture(m={self.m}, kappas={self.kappas}, |E_I|={len(self.e_i)})"


def is_critical(arch: ObservationArchitecture, tau: SiState) -> bool:
    return arch.strategy.is_critical(tau)


def absorb(arch: ObservationArchitecture, tau: SiState, sigma: EventId) -> SiState:
    if sigma not in arch.e_i:
        raise UsageError(f"Event id {sigma} is not in E_I")
    return arch.strategy.absorb(tau, sigma)


def triggering_sites(arch: ObservationArchitecture, tau: SiState) -> Tuple[int, ...]:
    """Sites whose component has reached its threshold."""
    return tuple(s.index for s, c in zip(arch.sites, tau.components) if len(c) == s.kappa)


def validate(arch: ObservationArchitecture, nfa: Nfa) -> ObservationArchitecture:
    """Check an architecture against its plant; returns the same architecture."""
    for site in arch.sites:
        if site.kappa < 1:
            raise ConfigError(f"Site {site.label} has threshold {site.kappa}; thresholds must be >= 1")
        unknown = [ev for ev in site.observable if ev not in nfa.events]
        if unknown:
            raise ConfigError(f"Site {site.label} observes events outside the plant alphabet: {unknown}")
        if not site.observable:
            logger.warning(f"Site {site.label} observes no events; it never records anything")
    logger.debug(f"Validated {arch!r}")
    return arch


@dataclass
class Run:
    """Decomposition of a plant string into segments separated by synchronizations."""
    segments: List[EventSeq]
    csi_trace: List[SiState]
    pending: SiState
    per_sync_estimates: Optional[List[FrozenSet[StateId]]] = None
    per_sync_initial: Optional[List[FrozenSet[StateId]]] = field(default=None)

    @property
    def synchronizations(self) -> int:
        return len(self.csi_trace)


def replay(nfa: Nfa, arch: ObservationArchitecture, s: Sequence[EventId]) -> Run:
    """Scan `s` left to right, emitting a CSI-state at every synchronization.

    Raises:
        NotInLanguageError: if `s` is not generated from the initial states
    """
    current = nfa.initial
    for k, ev in enumerate(s):
        current = step(nfa, current, (ev,))
        if not current:
            raise NotInLanguageError([nfa.event_name(e) for e in s], k)

    tau = arch.tau0
    segments: List[EventSeq] = []
    trace: List[SiState] = []
    segment: List[EventId] = []
    for ev in s:
        segment.append(ev)
        if ev not in arch.e_i:
            continue
        tau = absorb(arch, tau, ev)
        if is_critical(arch, tau):
            logger.debug(f"Synchronization after {len(segment)} events: {tau.render(nfa)}")
            trace.append(tau)
            segments.append(tuple(segment))
            segment = []
            tau = arch.tau0
    segments.append(tuple(segment))
    return Run(segments=segments, csi_trace=trace, pending=tau)


def replay_names(nfa: Nfa, arch: ObservationArchitecture, names: Iterable[str]) -> Run:
    return replay(nfa, arch, nfa.event_ids(list(names)))
