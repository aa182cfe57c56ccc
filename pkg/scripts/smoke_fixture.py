import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from core.css import build_feasible_css, size_bounds
from core.models import load_golden_facts
from core.opacity import check_csso, check_iso
from core.oracle import check_golden_facts

FACTS = Path(__file__).resolve().parent.parent / "fixtures" / "golden_facts.json"


def main():
    facts, model = load_golden_facts(FACTS)
    nfa, arch = model.to_plant()

    print('Checking golden facts')
    report = check_golden_facts(nfa, arch, facts)
    print(json.dumps([r.name for r in report.results], indent=2))

    css = build_feasible_css(nfa, arch)
    print(f'\nFeasible CSS: {css!r}')
    print(f'Bounds: {size_bounds(arch, nfa)}')

    print('\nInitial-state opacity, every state initial, secret {x0}')
    everything = nfa.with_initial(nfa.states)
    for method in ('estimator', 'reversed'):
        verdict = check_iso(everything, arch, nfa.state_ids(['x0']), method=method)
        print(json.dumps(verdict.report(everything).model_dump(), indent=2))

    print('\nCurrent-state opacity, secret {x2}')
    verdict = check_csso(nfa, arch, nfa.state_ids(['x2']))
    print(json.dumps(verdict.report(nfa).model_dump(), indent=2))


if __name__ == '__main__':
    main()
