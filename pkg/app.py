"""
sl-solvability - correct solvability of Sturm-Liouville equations on the real line

Main entry point; dispatches the subcommands defined in src/cli.
"""
import logging

# Import configuration and initialization
from src.app_config import setup_logging, build_run_config

# Import command line components
from src.cli.parser import build_parser
from src.cli.commands import COMMANDS

from src.utils.constants import EXIT_INPUT_ERROR, EXIT_NUMERIC_ERROR
from src.utils.errors import ProblemFormatError, SolvabilityError


def main(argv=None):
    """Main application entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Setup logging
    setup_logging('INFO' if args.verbose else args.log_level)

    config = build_run_config(args)
    logging.info(f"Running {config.command} (p={config.p}, seed={config.seed}, threads={config.threads})")

    try:
        return COMMANDS[config.command](config)
    except (ProblemFormatError, ValueError) as e:
        logging.error(f"Invalid input: {e}")
        return EXIT_INPUT_ERROR
    except SolvabilityError as e:
        logging.error(f"Numerical failure in {config.command}: {e}", exc_info=True)
        return EXIT_NUMERIC_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
