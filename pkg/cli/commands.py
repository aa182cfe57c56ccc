"""
Command handlers. Each handler takes the parsed arguments and the runtime
settings, writes its result to stdout (or --out) and returns an exit code.
"""
import argparse
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from core.automaton import Nfa, unobservable_reach
from core.css import build_css, build_feasible_css
from core.errors import FixtureInvalidError
from core.estimators import build_do_observer, build_initial_estimator, build_reversed_observer, replay
from core.generator import random_instance
from core.models import ModelFile, load_golden_facts, load_model
from core.opacity import check_csso, check_iso
from core.oracle import check_golden_facts
from core.protocol import ObservationArchitecture
from core.utils import dumps, format_state_set, parse_name_list, parse_trace

from .settings import RuntimeSettings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MODEL = 2
EXIT_VIOLATED = 3

DEFAULT_FACTS = Path(__file__).resolve().parent.parent / "fixtures" / "golden_facts.json"


def _load(args: argparse.Namespace) -> Tuple[ModelFile, Nfa, ObservationArchitecture]:
    model = load_model(args.model)
    initial = parse_name_list(args.initial) if getattr(args, "initial", None) else None
    nfa, arch = model.to_plant(initial)
    logger.info(f"Loaded {nfa!r} with {arch!r}")
    return model, nfa, arch


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_build(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    """Build a CSS structure or one of the observers and export it."""
    _, nfa, arch = _load(args)
    cap = settings.max_observer_states
    if args.structure == "css":
        seeds = nfa.state_ids(parse_name_list(args.seeds)) if args.seeds else nfa.states
        result = build_css(nfa, arch, seeds)
    elif args.structure == "feasible-css":
        result = build_feasible_css(nfa, arch)
    elif args.structure == "observer":
        result = build_do_observer(nfa, arch, build_feasible_css(nfa, arch), cap)
    elif args.structure == "iobserver":
        result = build_initial_estimator(nfa, arch, build_feasible_css(nfa, arch), cap)
    else:
        result = build_reversed_observer(nfa, arch, build_css(nfa, arch, nfa.states), cap)

    text = result.to_dot() if args.format == "dot" else dumps(result.to_json())
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    """Decide an opacity property; exit 0 when it holds, 3 when violated."""
    model, nfa, arch = _load(args)
    names = (model.secret or []) if args.secret is None else parse_name_list(args.secret)
    secret = nfa.state_ids(names)
    cap = settings.max_observer_states
    if args.property == "iso":
        verdict = check_iso(nfa, arch, secret, method="estimator", max_states=cap)
    elif args.property == "iso-reversed":
        verdict = check_iso(nfa, arch, secret, method="reversed", max_states=cap)
    else:
        verdict = check_csso(nfa, arch, secret, max_states=cap)

    sys.stdout.write(dumps(verdict.report(nfa).model_dump()))
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def _replay_text(nfa: Nfa, names: List[str], run, latest) -> str:
    lines = [f"trace: {' '.join(names) if names else '(empty)'}"]
    for k, tau in enumerate(run.csi_trace):
        lines.append(f"sync {k + 1}: {tau.render(nfa)} after {' '.join(nfa.event_name(e) for e in run.segments[k])}")
        lines.append(f"  current: {format_state_set(nfa.names_of(run.per_sync_estimates[k]))}")
        lines.append(f"  initial: {format_state_set(nfa.names_of(run.per_sync_initial[k]))}")
    lines.append(f"pending: {run.pending.render(nfa)}")
    lines.append(f"estimate: {format_state_set(nfa.names_of(latest))}")
    return "\n".join(lines) + "\n"


def cmd_replay(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    """Replay a plant string and report the estimates at each synchronization."""
    _, nfa, arch = _load(args)
    names = parse_trace(args.trace)
    css = build_feasible_css(nfa, arch)
    run = replay(nfa, arch, css, nfa.event_ids(names))
    # estimate held by the coordinator at the end of the trace
    latest = run.per_sync_estimates[-1] if run.csi_trace else unobservable_reach(nfa, arch.e_i, nfa.initial)

    if args.format == "json":
        payload = {
            "trace": names,
            "synchronizations": [
                {
                    "csi": tau.render(nfa),
                    "segment": [nfa.event_name(e) for e in run.segments[k]],
                    "current": nfa.names_of(run.per_sync_estimates[k]),
                    "initial": nfa.names_of(run.per_sync_initial[k]),
                }
                for k, tau in enumerate(run.csi_trace)
            ],
            "pending": run.pending.render(nfa),
            "tail": [nfa.event_name(e) for e in run.segments[-1]],
            "estimate": nfa.names_of(latest),
        }
        sys.stdout.write(dumps(payload))
    else:
        sys.stdout.write(_replay_text(nfa, names, run, latest))
    return EXIT_OK


def cmd_facts(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    """Check the golden facts against the model they refer to."""
    facts, model = load_golden_facts(args.facts or DEFAULT_FACTS)
    nfa, arch = model.to_plant()
    try:
        report = check_golden_facts(nfa, arch, facts)
    except FixtureInvalidError as e:
        logger.error(str(e))
        if e.report is not None:
            sys.stdout.write(dumps(e.report.model_dump()))
        return EXIT_MODEL
    sys.stdout.write(dumps(report.model_dump()))
    return EXIT_OK


def cmd_generate(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    """Write a random model drawn with DESSYNC_SEED (or --seed)."""
    seed = settings.seed if args.seed is None else args.seed
    instance = random_instance(random.Random(seed), seed=seed)
    logger.info(f"Generated {instance.params.describe()}")
    model = ModelFile.from_plant(instance.nfa, instance.arch)
    _emit(model.dumps(), args.out)
    return EXIT_OK
