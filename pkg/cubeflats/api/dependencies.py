import logging
import sys
from pathlib import Path
from typing import Optional

from cubeflats.config import get_settings
from cubeflats.core.complex import load_complex
from cubeflats.core.exceptions import InputError
from cubeflats.models.complex import CubeComplex
from cubeflats.models.isometry import RationalOrthoAffine
from cubeflats.models.schemas import CoverSpec
from cubeflats.utils.permutations import parse_permutation

logger = logging.getLogger(__name__)


# ==============================================================================
# INPUT LOADERS
# ==============================================================================

def read_text(path: str) -> str:
    """Contents of a file, or of stdin when the path is '-'."""
    if path == "-":
        logger.debug("Reading input from stdin")
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def load_complex_file(path: str) -> CubeComplex:
    complex_ = load_complex(read_text(path))
    logger.info(f"Loaded {len(complex_.cells)} cells of a {complex_.dimension}-dimensional complex from {path}")
    return complex_


def load_isometry_file(path: str) -> RationalOrthoAffine:
    return RationalOrthoAffine.model_validate_json(read_text(path))


def write_output(text: str, output: Optional[str]) -> None:
    """Emit a document on stdout or into the --output file."""
    if output is None or output == "-":
        print(text)
        return
    Path(output).write_text(text + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(text)} characters to {output}")


# ==============================================================================
# ARGUMENT VALIDATORS
# ==============================================================================

def parse_vector(text: str, length: Optional[int] = None) -> tuple[int, ...]:
    """'1,8' -> (1, 8)."""
    try:
        vector = tuple(int(token) for token in text.split(",") if token.strip())
    except ValueError:
        raise InputError(f"{text!r} is not a comma-separated list of integers") from None
    if not vector or (length is not None and len(vector) != length):
        raise InputError(f"expected {length or 'some'} integer coordinate(s), got {text!r}")
    return vector


def parse_shape(text: str) -> tuple[int, ...]:
    shape = parse_vector(text)
    if any(size < 1 for size in shape):
        raise InputError(f"grid sizes must be positive, got {text!r}")
    return shape


def parse_cover_spec(sigma_a: str, sigma_b: str, degree: Optional[int] = None) -> CoverSpec:
    """Sheet permutations in one-line ('2,1,3') or cycle ('(1 2)') notation; the degree is inferred when omitted."""
    if degree is None:
        degree = max(_degree_hint(sigma_a), _degree_hint(sigma_b))
    try:
        return CoverSpec(
            degree=degree,
            sigma_a=parse_permutation(sigma_a, degree),
            sigma_b=parse_permutation(sigma_b, degree)
        )
    except ValueError as e:
        raise InputError(str(e)) from None


def _degree_hint(text: str) -> int:
    text = text.strip()
    digits = [int(token) for token in text.replace("(", " ").replace(")", " ").replace(",", " ").split() if token.isdigit()]
    if not text.startswith("(") and digits:
        return len(digits)
    return max(digits, default=1)


def parse_word_pair(text: str) -> tuple[str, str]:
    """'aabA,b' -> ('aabA', 'b')."""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 2:
        raise InputError(f"expected two words separated by a comma, got {text!r}")
    bound = get_settings().WORD_SEARCH_BOUND
    if any(len(part) > bound for part in parts):
        raise InputError(f"words are limited to {bound} letters")
    return parts[0], parts[1]
