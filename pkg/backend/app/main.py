"""Command-line entry point for nlrm."""

import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from dotenv import load_dotenv
from pydantic import ValidationError
from pydantic_settings import CliApp, SettingsError

from app.config import get_settings
from app.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE, NlrmError
from app.telemetry_config import setup_telemetry, teardown_telemetry


# Load .env before settings are read so every command sees the same environment.
BACKEND_DIR = Path(__file__).parent.parent
ENV_FILE = BACKEND_DIR / ".env"
if ENV_FILE.exists():
    load_dotenv(ENV_FILE)


logger = logging.getLogger(__name__)

DETERMINISTIC_FLAG = "--deterministic"
THREAD_VARIABLES = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)
USAGE = "usage: nlrm [--version] {{{commands}}} [options]\n"


def pin_threads() -> None:
    """Cap BLAS/OpenMP pools at one thread; only effective before numpy is imported."""
    for variable in THREAD_VARIABLES:
        os.environ[variable] = "1"
    if "numpy" in sys.modules:
        logger.warning("numpy already loaded; thread caps may not apply")


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _fail(message: str, exit_code: int) -> int:
    sys.stderr.write(f"nlrm: error: {message}\n")
    return exit_code


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code.

    0 on success, 1 on usage or configuration errors, 2 on data errors, 3 on numeric failures.
    """
    args = list(sys.argv[1:] if argv is None else argv)
    settings = get_settings()
    if DETERMINISTIC_FLAG in args or settings.deterministic:
        pin_threads()
    _configure_logging(settings.telemetry_log_level)

    # Deferred so the thread caps above are in place before numpy loads.
    from app.commands import COMMANDS, NlrmCLI  # noqa: PLC0415

    context = setup_telemetry()
    try:
        CliApp.run(NlrmCLI, cli_args=args, cli_exit_on_error=False)
    except SettingsError as exc:
        sys.stderr.write(USAGE.format(commands=",".join(COMMANDS)))
        return _fail(str(exc), EXIT_USAGE)
    except ValidationError as exc:
        logger.error("Invalid arguments: %s", exc)
        return _fail(f"invalid arguments: {exc}", EXIT_USAGE)
    except NlrmError as exc:
        logger.error("%s failed: %s", type(exc).__name__, exc)
        return _fail(str(exc), exc.exit_code)
    except ValueError as exc:
        logger.error("Invalid value: %s", exc)
        return _fail(str(exc), EXIT_USAGE)
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        return _fail(str(exc), EXIT_DATA)
    finally:
        teardown_telemetry(context)
    return EXIT_OK


def run() -> None:
    """Console-script entry point."""
    sys.exit(dispatch())


if __name__ == "__main__":
    run()
