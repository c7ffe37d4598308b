import json
import logging
import sys
from argparse import Namespace
from typing import Callable

from pydantic import ValidationError

from cubeflats.config import get_settings
from cubeflats.core.exceptions import InputError, InvalidComplexError, PreconditionError, VerdictError
from cubeflats.models.schemas import ErrorResponse

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2

Handler = Callable[[Namespace], int]


def _report(detail: str, exit_code: int, errors: list[str] | None = None) -> int:
    response = ErrorResponse(detail=detail, exit_code=exit_code, errors=errors)
    print(response.model_dump_json(exclude_none=True), file=sys.stderr)
    return exit_code


def run_with_error_handlers(handler: Handler, args: Namespace) -> int:
    """
    Run a subcommand handler and translate the exception hierarchy into the exit-code contract.

    Args:
        handler (Handler): Subcommand function returning its own exit code.
        args (Namespace): Parsed command-line arguments.

    Returns:
        int: 0 on success, 1 for a negative verdict, 2 for unusable input.
    """
    try:
        return handler(args)
    except InvalidComplexError as e:
        logger.warning(f"Rejected complex with {len(e.violations)} violation(s)")
        return _report(str(e), EXIT_INPUT, e.violations)
    except ValidationError as e:
        logger.warning(f"Input failed schema validation. Errors: {e.error_count()}")
        errors = [f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors()]
        return _report("input does not match the expected schema", EXIT_INPUT, errors)
    except json.JSONDecodeError as e:
        logger.warning(f"Malformed JSON input: {e}")
        return _report(f"malformed JSON: {e}", EXIT_INPUT)
    except (InputError, PreconditionError) as e:
        logger.warning(f"Rejected input: {e}")
        return _report(str(e), EXIT_INPUT)
    except VerdictError as e:
        logger.warning(f"Negative verdict: {e}")
        return _report(str(e), EXIT_VERDICT)
    except OSError as e:
        logger.warning(f"Cannot access {e.filename or 'input'}: {e.strerror or e}")
        return _report(f"cannot access {e.filename or 'input'}: {e.strerror or e}", EXIT_INPUT)
    except Exception as e:
        logger.error(f"Unhandled exception in {handler.__name__}: {e}", exc_info=True)
        detail = str(e) if get_settings().DEBUG else "internal error; rerun with DEBUG=true for details"
        return _report(detail, EXIT_INPUT)
