"""lgks-audit command-line entrypoint."""

import sys
from typing import List, Optional

from app.cli import build_parser
from app.config.logging import setup_logging, get_logger
from app.core.errors import NumericalError

logger = get_logger(__name__)

EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one lgks-audit command.

    Exit status: 0 unique steady state (or success), 1 non-unique steady
    state, 2 input error, 3 numerical or internal failure.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    try:
        return args.handler(args)
    except NumericalError as e:
        logger.error("Numerical failure", extra={"command": args.command, "error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    except (ValueError, OSError) as e:
        logger.info("Input error", extra={"command": args.command, "error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except Exception as e:
        logger.error(
            "Unhandled exception",
            extra={"command": args.command, "error": str(e)},
            exc_info=True,
        )
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
