"""
Lexical helpers shared by the heuristic evaluator and the synthetic generator.

Text is lowercased and split into tokens: runs of letters or digits, optionally
joined by inner hyphens or apostrophes (``type-1``, ``trade-off``, ``what's``).
Keywords and rubric markers match as contiguous token sequences.
"""
import re
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

from models.curriculum import Subtopic

TOKEN_RE = re.compile(r"[^\W_]+(?:['\-][^\W_]+)*")


def tokenize(text: str) -> Tuple[str, ...]:
    return tuple(TOKEN_RE.findall(text.lower()))


@lru_cache(maxsize=4096)
def phrase_tokens(phrase: str) -> Tuple[str, ...]:
    return tokenize(phrase)


def count_phrase(tokens: Sequence[str], phrase: str) -> int:
    """
    Number of positions where ``phrase`` occurs as a contiguous token sequence.
    """
    needle = phrase_tokens(phrase)
    if not needle:
        return 0
    width = len(needle)
    return sum(
        1
        for start in range(len(tokens) - width + 1)
        if tuple(tokens[start : start + width]) == needle
    )


def keyword_hits(tokens: Sequence[str], subtopic: Subtopic) -> int:
    return sum(count_phrase(tokens, keyword) for keyword in subtopic.keywords)


def has_marker(tokens: Sequence[str], markers: Iterable[str]) -> bool:
    return any(count_phrase(tokens, marker) for marker in markers)
