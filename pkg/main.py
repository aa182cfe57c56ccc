import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from cli.commands import (
    EXIT_MODEL,
    EXIT_USAGE,
    cmd_build,
    cmd_facts,
    cmd_generate,
    cmd_replay,
    cmd_verify,
)
from cli.otel import setup_tracing, shutdown_tracing
from cli.settings import RuntimeSettings
from core.errors import ConfigError, DessyncError, FixtureInvalidError, ModelError

logger = logging.getLogger("dessync")


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the usage code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dessync",
        description="State estimation and opacity verification under threshold-triggered synchronization",
    )
    parser.add_argument("--log-level", default=None, help="Overrides DESSYNC_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="Build a structure and export it")
    build.add_argument("model", help="Model file (JSON)")
    build.add_argument(
        "--structure",
        choices=["css", "feasible-css", "observer", "iobserver", "reversed"],
        default="feasible-css",
    )
    build.add_argument("--seeds", nargs="+", help="Root states of a css structure (default: all states)")
    build.add_argument("--initial", nargs="+", help="Override the initial states of the model")
    build.add_argument("--format", choices=["dot", "json"], default="dot")
    build.add_argument("--out", help="Output file (default: stdout)")
    build.set_defaults(handler=cmd_build)

    verify = sub.add_parser("verify", help="Decide an opacity property")
    verify.add_argument("model", help="Model file (JSON)")
    verify.add_argument("--property", choices=["iso", "iso-reversed", "csso"], required=True)
    verify.add_argument("--secret", nargs="*", help="Secret states (default: the model's secret)")
    verify.add_argument("--initial", nargs="+", help="Override the initial states of the model")
    verify.set_defaults(handler=cmd_verify)

    replay = sub.add_parser("replay", help="Replay a plant string through the protocol")
    replay.add_argument("model", help="Model file (JSON)")
    replay.add_argument("--trace", default="", help='Events, e.g. "a12 l g3 a12"')
    replay.add_argument("--initial", nargs="+", help="Override the initial states of the model")
    replay.add_argument("--format", choices=["text", "json"], default="text")
    replay.set_defaults(handler=cmd_replay)

    facts = sub.add_parser("facts", help="Check golden facts against their fixture model")
    facts.add_argument("facts", nargs="?", help="Golden facts file (default: the shipped fixture)")
    facts.set_defaults(handler=cmd_facts)

    generate = sub.add_parser("generate", help="Write a random model")
    generate.add_argument("--seed", type=int, default=None, help="Overrides DESSYNC_SEED")
    generate.add_argument("--out", help="Output file (default: stdout)")
    generate.set_defaults(handler=cmd_generate)
    return parser


def _load_env() -> None:
    env_path = Path(__file__).parent / ".env"
    if env_path.exists():
        try:
            from dotenv import load_dotenv
            load_dotenv(dotenv_path=env_path)
        except Exception as e:
            print(f"python-dotenv failed to load .env: {e}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    _load_env()
    args = build_parser().parse_args(argv)
    try:
        settings = RuntimeSettings.from_env()
        if args.log_level:
            settings = RuntimeSettings(**{**settings.model_dump(), "log_level": args.log_level})
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=settings.log_level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    setup_tracing(settings)
    try:
        return args.handler(args, settings)
    except (ModelError, FixtureInvalidError) as e:
        logger.error(str(e))
        return EXIT_MODEL
    except DessyncError as e:
        logger.error(str(e))
        return EXIT_USAGE
    finally:
        shutdown_tracing()


if __name__ == "__main__":
    sys.exit(main())
