"""Tokenization, character classification and normalization for filtering.

Words are whitespace-delimited tokens; "alpha" means Unicode letters
plus combining marks (categories L* and M*).  Marks are included
because Brahmic scripts write vowels as combining signs: a clean
Sinhala or Tamil sentence must score like a clean Latin one, and under
a letters-only definition almost every Sinhala word would fail.
Normalization variants strip decimal digits (category Nd) or digits
plus punctuation and symbols (Nd + P* + S*), which makes the underscore
count as punctuation and also removes currency/math symbols.

All operations are pure functions.  The per-character classification is
routed through lazily-populated ``str.translate`` tables so that corpus
scale passes stay at C speed after the first few thousand distinct
code points.
"""

from __future__ import annotations

import unicodedata
from enum import Enum


class NormMode(Enum):
    """How sentence text is normalized before duplicate comparison."""

    IDENTITY = "identity"
    STRIP_NUMS = "nums"
    STRIP_PUNCT_NUMS = "punctnums"

    @classmethod
    def from_string(cls, name: str) -> "NormMode":
        key = name.strip().lower()
        for mode in cls:
            if mode.value == key:
                return mode
        if key in ("", "id", "none"):
            return cls.IDENTITY
        raise ValueError(f"unknown normalization mode: {name!r}")


class _CategoryDropTable(dict):
    """translate() table that deletes characters of given categories.

    Unknown code points are classified once via unicodedata and cached,
    so repeated translate() calls cost a plain dict lookup per char.
    """

    def __init__(self, drop_major: str, drop_full: tuple[str, ...] = ()):
        super().__init__()
        self._drop_major = drop_major
        self._drop_full = drop_full

    def __missing__(self, codepoint: int):
        cat = unicodedata.category(chr(codepoint))
        drop = cat[0] in self._drop_major or cat in self._drop_full
        value = None if drop else codepoint
        self[codepoint] = value
        return value


class _KeepAlphaTable(dict):
    """translate() table keeping letters and combining marks (L*, M*)."""

    def __missing__(self, codepoint: int):
        keep = unicodedata.category(chr(codepoint))[0] in "LM"
        value = codepoint if keep else None
        self[codepoint] = value
        return value


_STRIP_NUMS_TABLE = _CategoryDropTable("", ("Nd",))
_STRIP_PUNCT_NUMS_TABLE = _CategoryDropTable("PS", ("Nd",))
_ALPHA_TABLE = _KeepAlphaTable()


def is_alpha_word(token: str) -> bool:
    """True when every character is a letter or a combining mark."""
    if token.isalpha():
        return True
    return bool(token) and len(token.translate(_ALPHA_TABLE)) == len(token)


def tokenize(text: str) -> list[str]:
    """Split on runs of Unicode whitespace; empty input gives an empty list."""
    return text.split()


def normalize(text: str, mode: NormMode) -> str:
    """Apply a duplicate-comparison normalization variant.

    STRIP_NUMS removes decimal digits; STRIP_PUNCT_NUMS removes digits,
    punctuation and symbols.  Both collapse whitespace runs to single
    spaces and trim the ends.  IDENTITY returns the input untouched.
    """
    if mode is NormMode.IDENTITY:
        return text
    if mode is NormMode.STRIP_NUMS:
        stripped = text.translate(_STRIP_NUMS_TABLE)
    elif mode is NormMode.STRIP_PUNCT_NUMS:
        stripped = text.translate(_STRIP_PUNCT_NUMS_TABLE)
    else:
        raise ValueError(f"unknown normalization mode: {mode!r}")
    return " ".join(stripped.split())


def char_ratios(text: str) -> tuple[float, float]:
    """Return (alpha char ratio, alpha word ratio) for a sentence.

    alpha char ratio = alpha characters / non-whitespace characters;
    alpha word ratio = all-alpha tokens / tokens.  Empty or
    whitespace-only input vacuously scores (1.0, 1.0).
    """
    tokens = text.split()
    if not tokens:
        return (1.0, 1.0)
    joined = "".join(tokens)
    alpha_count = len(joined.translate(_ALPHA_TABLE))
    alpha_words = sum(1 for tok in tokens if is_alpha_word(tok))
    return (alpha_count / len(joined), alpha_words / len(tokens))


def word_ngrams(tokens: list[str], n: int) -> set[str]:
    """All consecutive n-token windows, keyed by space-joined tokens.

    Tokens never contain whitespace, so the space separator cannot make
    two distinct windows collide.  Shorter-than-n input yields the empty
    set.
    """
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    count = len(tokens) - n + 1
    if count <= 0:
        return set()
    return {" ".join(tokens[i : i + n]) for i in range(count)}
