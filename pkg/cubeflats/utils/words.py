"""Words in the free group on a, b as Tietze tuples: a = 1, b = 2, negatives are inverses."""

from typing import Sequence

Word = tuple[int, ...]

_LETTERS = {"a": 1, "b": 2, "A": -1, "B": -2}
_NAMES = {value: key for key, value in _LETTERS.items()}


def free_reduce(word: Sequence[int]) -> Word:
    stack: list[int] = []
    for letter in word:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def parse_word(text: str) -> Word:
    """'aabA' -> (1, 1, 2, -1); '1' or '' is the empty word."""
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    try:
        return free_reduce(_LETTERS[ch] for ch in text if not ch.isspace())
    except KeyError as e:
        raise ValueError(f"unknown letter {e.args[0]!r} in word {text!r}; use a, b, A, B") from None


def format_word(word: Sequence[int]) -> str:
    return "".join(_NAMES[letter] for letter in word) or "1"


def invert(word: Sequence[int]) -> Word:
    return tuple(-letter for letter in reversed(word))


def substitute(word: Sequence[int], images: Sequence[Word]) -> Word:
    """Image of a word under the endomorphism a -> images[0], b -> images[1]."""
    result: list[int] = []
    for letter in word:
        image = images[abs(letter) - 1]
        result.extend(image if letter > 0 else invert(image))
    return free_reduce(result)


def exponent_sums(word: Sequence[int]) -> tuple[int, int]:
    """Abelianization of a word: (exponent sum of a, exponent sum of b)."""
    return (
        sum(1 if letter > 0 else -1 for letter in word if abs(letter) == 1),
        sum(1 if letter > 0 else -1 for letter in word if abs(letter) == 2),
    )
