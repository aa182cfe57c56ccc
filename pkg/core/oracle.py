"""
Brute-force reference semantics.

Nothing here touches a CSS structure or an observer: estimates, SI-states and
opacity verdicts are computed by searching plant runs directly, so they can be
compared against the constructions. Only meant for small plants.
"""
from collections import deque
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple
import logging

from .automaton import EventId, EventSeq, Nfa, StateId, project, step
from .errors import DessyncError, FixtureInvalidError, UsageError
from .models import FactReport, FactResult, GoldenFact, GoldenFactSet
from .opacity import SecretSpec, Verdict
from .protocol import ObservationArchitecture, SiState, absorb, is_critical, replay_names

logger = logging.getLogger(__name__)

Config = Tuple[StateId, StateId]  # (origin, current)
Node = FrozenSet[Config]


def _walk(
    nfa: Nfa,
    observable: FrozenSet[EventId],
    sources: FrozenSet[StateId],
    max_observable: int,
    max_unobservable_run: int,
) -> Iterator[Tuple[EventSeq, FrozenSet[StateId]]]:
    stack: List[Tuple[EventSeq, FrozenSet[StateId], int, int]] = [((), sources, 0, 0)]
    while stack:
        s, current, seen_obs, run = stack.pop()
        yield s, current
        for ev in sorted(nfa.events, reverse=True):
            if ev in observable:
                if seen_obs >= max_observable:
                    continue
                nxt_obs, nxt_run = seen_obs + 1, 0
            else:
                if run >= max_unobservable_run:
                    continue
                nxt_obs, nxt_run = seen_obs, run + 1
            nxt = step(nfa, current, (ev,))
            if nxt:
                stack.append((s + (ev,), nxt, nxt_obs, nxt_run))


def enumerate_language(
    nfa: Nfa,
    observable: Iterable[EventId],
    max_observable: int,
    max_unobservable_run: Optional[int] = None,
    sources: Optional[Iterable[StateId]] = None,
) -> Set[EventSeq]:
    """Strings of L(G) with bounded observable content and bounded unobservable runs.

    The unobservable run cap defaults to |X|; the result is prefix-closed.
    """
    if max_observable < 0 or (max_unobservable_run is not None and max_unobservable_run < 0):
        raise UsageError("Enumeration bounds must be >= 0")
    run_cap = len(nfa.states) if max_unobservable_run is None else max_unobservable_run
    start = frozenset(nfa.initial if sources is None else sources)
    return {s for s, _ in _walk(nfa, frozenset(observable), start, max_observable, run_cap)}


def oracle_ur(nfa: Nfa, arch: ObservationArchitecture, sources: Iterable[StateId]) -> FrozenSet[StateId]:
    """States reached from `sources` by strings with no observable event."""
    out: Set[StateId] = set()
    for _, reached in _walk(nfa, arch.e_i, frozenset(sources), 0, len(nfa.states)):
        out |= reached
    return frozenset(out)


def oracle_r(
    nfa: Nfa, arch: ObservationArchitecture, sources: Iterable[StateId], sigma: EventId
) -> FrozenSet[StateId]:
    """States reached from `sources` by strings whose only observable event is sigma."""
    out: Set[StateId] = set()
    for s, reached in _walk(nfa, arch.e_i, frozenset(sources), 1, len(nfa.states)):
        if project(s, arch.e_i) == (sigma,):
            out |= reached
    return frozenset(out)


def _compatible(tau: SiState, target: SiState) -> bool:
    return all(t[: len(c)] == c for c, t in zip(tau.components, target.components))


def _unobservable_closure(nfa: Nfa, arch: ObservationArchitecture, configs: Iterable[Config]) -> Node:
    seen = set(configs)
    queue = deque(seen)
    while queue:
        origin, x = queue.popleft()
        for ev, dst in nfa.outgoing(x):
            if ev not in arch.e_i and (origin, dst) not in seen:
                seen.add((origin, dst))
                queue.append((origin, dst))
    return frozenset(seen)


def _advance(
    nfa: Nfa, arch: ObservationArchitecture, node: Node, target: Optional[SiState] = None
) -> Dict[SiState, Node]:
    """Run every configuration of `node` up to its next synchronization.

    Returns, per CSI-state, the configurations right after that synchronization
    closed under unobservable events. With `target` set, runs whose SI-state
    can no longer grow into `target` are cut.
    """
    tau0 = arch.tau0
    seen: Set[Tuple[StateId, StateId, SiState]] = {(o, x, tau0) for o, x in node}
    queue = deque(seen)
    reached: Dict[SiState, Set[Config]] = {}
    while queue:
        origin, x, tau = queue.popleft()
        for ev, dst in nfa.outgoing(x):
            if ev not in arch.e_i:
                item = (origin, dst, tau)
            else:
                nxt = absorb(arch, tau, ev)
                if target is not None and not _compatible(nxt, target):
                    continue
                if is_critical(arch, nxt):
                    reached.setdefault(nxt, set()).add((origin, dst))
                    continue
                item = (origin, dst, nxt)
            if item not in seen:
                seen.add(item)
                queue.append(item)
    return {tau: _unobservable_closure(nfa, arch, configs) for tau, configs in reached.items()}


def _initial_node(nfa: Nfa, arch: ObservationArchitecture, x0set: Iterable[StateId]) -> Node:
    return _unobservable_closure(nfa, arch, ((x, x) for x in x0set))


def oracle_node(
    nfa: Nfa, arch: ObservationArchitecture, iota: Sequence[SiState], x0set: Iterable[StateId]
) -> Node:
    """(initial, current) configurations consistent with receiving exactly `iota`."""
    node = _initial_node(nfa, arch, x0set)
    for tau in iota:
        if not node:
            break
        node = _advance(nfa, arch, node, tau).get(tau, frozenset())
    return node


def oracle_current_estimate(
    nfa: Nfa, arch: ObservationArchitecture, iota: Sequence[SiState], x0set: Iterable[StateId]
) -> FrozenSet[StateId]:
    return frozenset(x for _, x in oracle_node(nfa, arch, iota, x0set))


def oracle_initial_estimate(
    nfa: Nfa, arch: ObservationArchitecture, iota: Sequence[SiState], x0set: Iterable[StateId]
) -> FrozenSet[StateId]:
    return frozenset(o for o, _ in oracle_node(nfa, arch, iota, x0set))


def oracle_pairs(
    nfa: Nfa, arch: ObservationArchitecture, tau: SiState, origins: Iterable[StateId]
) -> FrozenSet[Tuple[StateId, StateId]]:
    """Pairs (x, x') such that a run from x synchronizing exactly once, on tau, can end in x'."""
    return _advance(nfa, arch, _initial_node(nfa, arch, origins), tau).get(tau, frozenset())


def oracle_si_states(nfa: Nfa, arch: ObservationArchitecture, x0set: Iterable[StateId]) -> FrozenSet[SiState]:
    """Every SI-state occurring along some string generated from `x0set`."""
    tau0 = arch.tau0
    seen: Set[Tuple[StateId, SiState]] = {(x, tau0) for x in x0set}
    queue = deque(seen)
    found: Set[SiState] = {tau0}
    while queue:
        x, tau = queue.popleft()
        for ev, dst in nfa.outgoing(x):
            if ev not in arch.e_i:
                item = (dst, tau)
            else:
                nxt = absorb(arch, tau, ev)
                found.add(nxt)
                item = (dst, tau0) if is_critical(arch, nxt) else (dst, nxt)
            if item not in seen:
                seen.add(item)
                queue.append(item)
    return frozenset(found)


def realize(
    nfa: Nfa, arch: ObservationArchitecture, x0set: Iterable[StateId], iota: Sequence[SiState]
) -> Optional[EventSeq]:
    """A shortest plant string whose DO-projection is `iota`, or None if there is none."""
    iota = list(iota)
    start = [(x, arch.tau0, 0) for x in sorted(x0set)]
    parent: Dict[Tuple[StateId, SiState, int], Optional[Tuple[Tuple[StateId, SiState, int], EventId]]] = {
        item: None for item in start
    }
    queue = deque(start)
    while queue:
        item = queue.popleft()
        x, tau, k = item
        if k == len(iota) and tau == arch.tau0:
            path: List[EventId] = []
            while parent[item] is not None:
                item, ev = parent[item]
                path.append(ev)
            return tuple(reversed(path))
        for ev, dst in nfa.outgoing(x):
            if ev not in arch.e_i:
                nxt_item = (dst, tau, k)
            else:
                if k == len(iota):
                    continue
                nxt = absorb(arch, tau, ev)
                if not _compatible(nxt, iota[k]):
                    continue
                if is_critical(arch, nxt):
                    if nxt != iota[k]:
                        continue
                    nxt_item = (dst, arch.tau0, k + 1)
                else:
                    nxt_item = (dst, nxt, k)
            if nxt_item not in parent:
                parent[nxt_item] = (item, ev)
                queue.append(nxt_item)
    return None


def oracle_sequences(
    nfa: Nfa, arch: ObservationArchitecture, x0set: Iterable[StateId], depth: int
) -> Dict[Tuple[SiState, ...], Node]:
    """Every realizable CSI-sequence of length <= depth with its configurations."""
    cache: Dict[Node, Dict[SiState, Node]] = {}
    out: Dict[Tuple[SiState, ...], Node] = {}
    frontier = [((), _initial_node(nfa, arch, x0set))]
    for level in range(depth + 1):
        nxt = []
        for iota, node in frontier:
            out[iota] = node
            if level == depth:
                continue
            if node not in cache:
                cache[node] = _advance(nfa, arch, node)
            for tau in sorted(cache[node]):
                nxt.append((iota + (tau,), cache[node][tau]))
        frontier = nxt
    return out


def knowledge_space(
    nfa: Nfa, arch: ObservationArchitecture, x0set: Iterable[StateId]
) -> Dict[Node, Tuple[SiState, ...]]:
    """Every distinct configuration set reachable by realizable CSI-sequences, with a shortest sequence."""
    start = _initial_node(nfa, arch, x0set)
    shortest: Dict[Node, Tuple[SiState, ...]] = {start: ()}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for tau, target in sorted(_advance(nfa, arch, node).items()):
            if target not in shortest:
                shortest[target] = shortest[node] + (tau,)
                queue.append(target)
    logger.debug(f"Knowledge space from {sorted(x0set)}: {len(shortest)} configuration sets")
    return shortest


def _first_violation(space: Dict[Node, Tuple[SiState, ...]], violates) -> Optional[Tuple[Node, Tuple[SiState, ...]]]:
    hits = [(iota, node) for node, iota in space.items() if violates(node)]
    if not hits:
        return None
    iota, node = min(hits, key=lambda h: (len(h[0]), h[0]))
    return node, iota


def oracle_iso(
    nfa: Nfa, arch: ObservationArchitecture, x0set: Iterable[StateId], secret: Iterable[StateId]
) -> Verdict:
    """Initial-state opacity decided from the runs themselves."""
    x0 = frozenset(x0set)
    spec = SecretSpec.for_iso(secret, x0)
    found = _first_violation(
        knowledge_space(nfa, arch, x0), lambda node: frozenset(o for o, _ in node) <= spec.secret
    )
    if found is None:
        return Verdict("iso", True)
    node, iota = found
    return Verdict("iso", False, list(iota), node, frozenset(o for o, _ in node))


def oracle_csso(
    nfa: Nfa, arch: ObservationArchitecture, x0set: Iterable[StateId], secret: Iterable[StateId]
) -> Verdict:
    """Current-state-at-synchronization opacity decided from the runs themselves."""
    spec = SecretSpec.for_csso(secret, nfa.states)
    found = _first_violation(
        knowledge_space(nfa, arch, x0set), lambda node: frozenset(x for _, x in node) <= spec.secret
    )
    if found is None:
        return Verdict("csso", True)
    node, iota = found
    return Verdict("csso", False, list(iota), node, frozenset(x for _, x in node))


# -- golden facts ------------------------------------------------------------


def _names(nfa: Nfa, states: Iterable[StateId]) -> List[str]:
    return nfa.names_of(states)


def evaluate_fact(nfa: Nfa, arch: ObservationArchitecture, fact: GoldenFact):
    """Compute the actual value of a fact with the oracle."""
    args = fact.args
    if fact.kind == "UR":
        return _names(nfa, oracle_ur(nfa, arch, nfa.state_ids(args["states"])))
    if fact.kind == "Rsigma":
        return _names(nfa, oracle_r(nfa, arch, nfa.state_ids(args["states"]), nfa.event_id(args["event"])))
    if fact.kind == "Member-Delta":
        reached = step(nfa, nfa.state_ids(args["states"]), nfa.event_ids(args["trace"]))
        return nfa.state_id(args["member"]) in reached
    if fact.kind == "SI-trace":
        run = replay_names(nfa, arch, args["trace"])
        return [tau.render(nfa) for tau in run.csi_trace]
    if fact.kind == "Estimate":
        iota = [SiState.parse(text, nfa, arch) for text in args["iota"]]
        x0set = nfa.state_ids(args["initial"])
        if args.get("mode", "current") == "current":
            return _names(nfa, oracle_current_estimate(nfa, arch, iota, x0set))
        return _names(nfa, oracle_initial_estimate(nfa, arch, iota, x0set))
    if fact.kind == "Member-M":
        tau = SiState.parse(args["csi"], nfa, arch)
        wanted = {(nfa.state_id(a), nfa.state_id(b)) for a, b in args["pairs"]}
        pairs = oracle_pairs(nfa, arch, tau, {a for a, _ in wanted})
        return wanted <= pairs
    raise UsageError(f"Unknown golden fact kind '{fact.kind}'")


_SET_VALUED = {"UR", "Rsigma", "Estimate"}


def _matches(fact: GoldenFact, actual) -> bool:
    if fact.kind in _SET_VALUED:
        return sorted(fact.expected) == sorted(actual)
    return fact.expected == actual


def check_golden_facts(nfa: Nfa, arch: ObservationArchitecture, facts: GoldenFactSet) -> FactReport:
    """Evaluate every fact; raises FixtureInvalidError naming the first failing one."""
    results: List[FactResult] = []
    for fact in facts.facts:
        try:
            actual = evaluate_fact(nfa, arch, fact)
            passed = _matches(fact, actual)
        except (KeyError, TypeError) as e:
            actual, passed = f"malformed arguments: {e}", False
        except DessyncError as e:
            actual, passed = str(e), False
        if not passed:
            logger.warning(f"Golden fact {fact.name} failed: expected {fact.expected}, got {actual}")
        results.append(FactResult(name=fact.name, kind=fact.kind, passed=passed, expected=fact.expected, actual=actual))

    report = FactReport(passed=all(r.passed for r in results), results=results, annotations=facts.annotations)
    failed = [r for r in results if not r.passed]
    if failed:
        first = failed[0]
        raise FixtureInvalidError(first.name, f"expected {first.expected}, got {first.actual}", report=report)
    logger.info(f"All {len(results)} golden facts hold")
    return report
