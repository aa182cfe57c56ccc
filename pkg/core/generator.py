"""
Seeded random plants and observation architectures.

Every instance carries the parameters it was generated with so a failing
property check can be reproduced from its message alone.
"""
from dataclasses import dataclass
from typing import Iterator, Tuple
import logging
import random

from .automaton import Nfa
from .protocol import ObservationArchitecture, Site

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstanceParams:
    seed: int
    index: int
    n_states: int
    n_events: int
    kappas: Tuple[int, ...]
    density: float

    def describe(self) -> str:
        return (
            f"seed={self.seed} index={self.index} |X|={self.n_states} |E|={self.n_events} "
            f"m={len(self.kappas)} kappas={self.kappas} density={self.density}"
        )


@dataclass(frozen=True)
class Instance:
    nfa: Nfa
    arch: ObservationArchitecture
    params: InstanceParams


def random_instance(
    rng: random.Random,
    seed: int = 0,
    index: int = 0,
    max_states: int = 6,
    max_events: int = 5,
    max_sites: int = 3,
    max_kappa: int = 3,
    density: float = 0.35,
    max_targets: int = 2,
) -> Instance:
    """Draw one plant with |X| <= max_states, |E| <= max_events and m <= max_sites."""
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_events)
    m = rng.randint(1, max_sites)
    kappas = tuple(rng.randint(1, max_kappa) for _ in range(m))

    states = [f"x{i}" for i in range(n)]
    events = [f"e{j}" for j in range(k)]
    transitions = []
    for src in states:
        for ev in events:
            if rng.random() < density:
                targets = rng.sample(states, rng.randint(1, min(max_targets, n)))
                transitions.append((src, ev, targets))
    initial = rng.sample(states, rng.randint(1, min(2, n)))
    nfa = Nfa.from_names(states, events, transitions, initial)

    sites = []
    for i, kappa in enumerate(kappas, start=1):
        alphabet = rng.sample(range(k), rng.randint(0, k))
        sites.append(Site(index=i, observable=frozenset(alphabet), kappa=kappa))
    arch = ObservationArchitecture(sites)

    params = InstanceParams(seed=seed, index=index, n_states=n, n_events=k, kappas=kappas, density=density)
    logger.debug(f"Generated instance {params.describe()}")
    return Instance(nfa, arch, params)


def random_instances(seed: int, count: int, **bounds) -> Iterator[Instance]:
    """`count` reproducible instances drawn from one seeded generator."""
    rng = random.Random(seed)
    for index in range(count):
        yield random_instance(rng, seed=seed, index=index, **bounds)


def random_large_plant(seed: int, n_states: int = 50, n_events: int = 5, kappa: int = 3, m: int = 3) -> Instance:
    """A sparse, mostly deterministic plant for scaling checks; site i observes e(i-1) and e(i)."""
    rng = random.Random(seed)
    states = [f"x{i}" for i in range(n_states)]
    events = [f"e{j}" for j in range(n_events)]
    transitions = []
    for src in states:
        for ev in events:
            if rng.random() < 0.4:
                targets = rng.sample(states, 2 if rng.random() < 0.1 else 1)
                transitions.append((src, ev, targets))
    nfa = Nfa.from_names(states, events, transitions, [states[0]])
    sites = [
        Site(index=i, observable=frozenset({(i - 1) % n_events, i % n_events}), kappa=kappa)
        for i in range(1, m + 1)
    ]
    arch = ObservationArchitecture(sites)
    params = InstanceParams(seed=seed, index=0, n_states=n_states, n_events=n_events, kappas=(kappa,) * m, density=0.4)
    return Instance(nfa, arch, params)
