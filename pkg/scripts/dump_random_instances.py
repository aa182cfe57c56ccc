import argparse
import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from core.css import build_feasible_css
from core.estimators import build_do_observer, build_initial_estimator
from core.generator import random_instances
from core.models import ModelFile


def main():
    parser = argparse.ArgumentParser(description="Write seeded random models and print their construction sizes")
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--seed", type=int, default=int(os.getenv("DESSYNC_SEED", "0")))
    parser.add_argument("--out-dir", default=None, help="Directory for the model files (default: print only)")
    args = parser.parse_args()

    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    for instance in random_instances(args.seed, args.count):
        css = build_feasible_css(instance.nfa, instance.arch)
        obs = build_do_observer(instance.nfa, instance.arch, css)
        iobs = build_initial_estimator(instance.nfa, instance.arch, css)
        print(f"{instance.params.describe()}: {css!r} observer={len(obs.states)} estimator={len(iobs.states)}")
        if out_dir:
            model = ModelFile.from_plant(instance.nfa, instance.arch)
            (out_dir / f"instance_{args.seed}_{instance.params.index}.json").write_text(model.dumps())


if __name__ == "__main__":
    main()
