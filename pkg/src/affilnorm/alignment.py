"""Sequence alignment scores for comparing organization names.

Character level: Needleman-Wunsch (global) and Smith-Waterman (local) with a
linear gap penalty, plus the two length-normalized local scores built on
them:

* word similarity -- local score over the mean length of the two words,
* extended local score (ESS) -- local score over the shorter length.

Word level: the tight string distance (TSS), a Levenshtein distance whose
unit is a word.  Two words are equal when their word similarity exceeds
0.85; a gap costs the length of the skipped word and a mismatch costs the
sum of both lengths.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .textutil import alignment_text, fold, strip_diacritics

WORD_SIMILARITY_THRESHOLD = 0.85
ESS_THRESHOLD = 0.90
TSS_THRESHOLD = 4


@dataclass(frozen=True)
class ScoringScheme:
    match_award: int = 1
    mismatch_penalty: int = -1
    gap_penalty: int = -1


DEFAULT_SCHEME = ScoringScheme()

WordSequence = tuple[str, ...]


def _codes(text: str) -> np.ndarray:
    return np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32)


def _align(a: str, b: str, scheme: ScoringScheme, local: bool) -> int:
    """Linear-gap DP, one numpy pass per row of ``a``.

    Within a row the horizontal gap chain has the closed form
    ``H[j] = max_k (T[k] + g*(j-k))`` where ``T`` already holds the diagonal
    and vertical moves, i.e. a running maximum of ``T[k] - g*k``.
    """
    m, n = len(a), len(b)
    g = scheme.gap_penalty
    if m == 0 or n == 0:
        return 0 if local else g * (m + n)
    ramp = g * np.arange(n + 1, dtype=np.int64)
    bc = _codes(b)
    prev = np.zeros(n + 1, dtype=np.int64) if local else ramp.copy()
    best = 0
    t = np.empty(n + 1, dtype=np.int64)
    for i, ch in enumerate(_codes(a), 1):
        sub = np.where(bc == ch, scheme.match_award, scheme.mismatch_penalty)
        t[0] = 0 if local else g * i
        np.maximum(prev[:-1] + sub, prev[1:] + g, out=t[1:])
        if local:
            np.maximum(t, 0, out=t)
        cur = np.maximum.accumulate(t - ramp) + ramp
        if local:
            best = max(best, int(cur.max()))
        prev = cur
    return best if local else int(prev[n])


def nw_score(a: str, b: str, scheme: ScoringScheme = DEFAULT_SCHEME, *, prepare: bool = True) -> int:
    """Optimal global alignment score of two strings."""
    if prepare:
        a, b = alignment_text(a), alignment_text(b)
    return _align(a, b, scheme, local=False)


def sw_score(a: str, b: str, scheme: ScoringScheme = DEFAULT_SCHEME, *, prepare: bool = True) -> int:
    """Optimal local alignment score; 0 when either string is empty."""
    if prepare:
        a, b = alignment_text(a), alignment_text(b)
    return _align(a, b, scheme, local=True)


@lru_cache(maxsize=200_000)
def _sw_cached(a: str, b: str) -> int:
    if a > b:
        a, b = b, a
    return _align(a, b, DEFAULT_SCHEME, local=True)


def word_similarity(a: str, b: str) -> float:
    """Local alignment score divided by the average length of the words."""
    a, b = alignment_text(a), alignment_text(b)
    if not a or not b:
        raise ValueError("word_similarity needs two non-empty words")
    return _sw_cached(a, b) / ((len(a) + len(b)) / 2)


def same_word(a: str, b: str) -> bool:
    return a == b or word_similarity(a, b) > WORD_SIMILARITY_THRESHOLD


def ess(a: str, b: str) -> float:
    """Extended local score: local alignment score over the shorter length."""
    a, b = alignment_text(a), alignment_text(b)
    if not a or not b:
        raise ValueError("ess needs two non-empty strings")
    return _sw_cached(a, b) / min(len(a), len(b))


_WORD_SPLIT = re.compile(r"[\s/&+]+")
_NON_WORD = re.compile(r"[^\w]|_")


def word_sequence(text: str, stopwords: Iterable[str] = ()) -> WordSequence:
    """Upper-cased, punctuation-free words of ``text`` minus stop words.

    Punctuation inside a word is dropped ("LUKE'S" -> "LUKES",
    "NORTH-WESTERN" -> "NORTHWESTERN"); whitespace, "/" and "&" separate words.
    """
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else frozenset(stopwords)
    out = []
    for chunk in _WORD_SPLIT.split(strip_diacritics(text)):
        word = _NON_WORD.sub("", chunk).upper()
        if word and fold(word) not in stop:
            out.append(word)
    return tuple(out)


def tss_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Word-level Levenshtein distance with length-weighted penalties."""
    n = len(b)
    prev = [0] * (n + 1)
    for j in range(1, n + 1):
        prev[j] = prev[j - 1] + len(b[j - 1])
    for wa in a:
        la = len(wa)
        cur = [prev[0] + la] + [0] * n
        for j in range(1, n + 1):
            wb = b[j - 1]
            lb = len(wb)
            sub = prev[j - 1] + (0 if same_word(wa, wb) else la + lb)
            cur[j] = min(sub, prev[j] + la, cur[j - 1] + lb)
        prev = cur
    return prev[n]


def tss_same(a: Sequence[str], b: Sequence[str]) -> bool:
    return tss_distance(a, b) <= TSS_THRESHOLD
