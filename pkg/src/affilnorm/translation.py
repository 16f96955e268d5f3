"""Phrase translation to English.

The pipeline only needs a callable ``provider(text, country=None) -> str``.
:class:`KeywordTranslator` is the offline default: a word-by-word lookup over
the bilingual keyword table in the gazetteer directory.  A live service can
be plugged in by passing any other callable; it should raise
:class:`TranslationUnavailable` when it cannot answer.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Callable

from .gazetteers import GazetteerSet
from .textutil import tokens

logger = logging.getLogger(__name__)

TranslationProvider = Callable[..., str]

_PIECES = re.compile(r"[^\W_]+(?:['’][^\W_]+)*|\s+|.", re.UNICODE)


class TranslationUnavailable(RuntimeError):
    """The provider could not translate (service down, quota, ...)."""


class KeywordTranslator:
    """Translate known foreign keywords, keeping every other word as is.

    Function words ("de", "und") are translated only when the phrase also
    contains a translated content word, so a Catalan name with an untranslated
    head word keeps its "de".
    """

    def __init__(self, gaz: GazetteerSet):
        self.table = gaz.translations
        self.max_len = max((len(k) for k in self.table), default=0)

    def __call__(self, text: str, country: str | None = None) -> str:
        pieces = _PIECES.findall(text)
        words = [(i, p) for i, p in enumerate(pieces) if re.match(r"[^\W_]", p)]
        keys = [tuple(tokens(p)) for _, p in words]
        replaced: dict[int, tuple[int, str, bool]] = {}
        k = 0
        while k < len(words):
            for n in range(min(self.max_len, len(words) - k), 0, -1):
                key = tuple(t for kk in keys[k : k + n] for t in kk)
                if key in self.table:
                    english, is_function = self.table[key]
                    replaced[k] = (n, english, is_function)
                    k += n
                    break
            else:
                k += 1
        if not any(not is_function for _, _, is_function in replaced.values()):
            return text
        word_pos = {piece_idx: k for k, (piece_idx, _) in enumerate(words)}
        out: list[str] = []
        i = 0
        while i < len(pieces):
            k = word_pos.get(i)
            if k is not None and k in replaced:
                n, english, _ = replaced[k]
                out.append(_match_case(english, pieces[i]))
                i = words[k + n - 1][0] + 1
            else:
                out.append(pieces[i])
                i += 1
        return "".join(out)


def _match_case(english: str, original: str) -> str:
    if original.isupper() and len(original) > 1:
        return english.upper()
    if original[:1].isupper():
        return english[:1].upper() + english[1:]
    return english


def translate_phrase(phrase: str, provider: TranslationProvider | None, country: str | None = None) -> str:
    """English rendering of ``phrase``; unchanged when no provider can help."""
    return _translate(phrase, provider, country)[0]


def _translate(phrase: str, provider: TranslationProvider | None, country: str | None = None) -> tuple[str, bool]:
    """(translation, failed).  A failing provider leaves the phrase as is."""
    if provider is None:
        return phrase, False
    try:
        return provider(phrase, country), False
    except TranslationUnavailable as exc:
        logger.warning("translation unavailable for %r: %s", phrase, exc)
        return phrase, True
