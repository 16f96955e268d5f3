"""Small text helpers shared by every stage: folding, tokenizing, cleanup."""

from __future__ import annotations

import re
import unicodedata

_WS = re.compile(r"\s+")
_APOSTROPHES = re.compile(r"['’‘`´]")
_TOKEN = re.compile(r"[^\W_]+")

# OCR/typesetting debris left at the start of a phrase when a footnote symbol
# was spelled out ("daggerDepartment of ...", "(dagger) ARS", "*Division").
_ARTIFACT = re.compile(
    r"^(?:\s*(?:\(\s*(?:[Dd]ouble\s+)?[Dd]agger\s*\)|[Dd]ouble\s*[Dd]agger|(?:[Dd]agger)+|[*†‡§]+)"
    r"(?=[A-Z(*\s†‡]|$))+\s*"
)


def strip_diacritics(text: str) -> str:
    """Canonical decomposition followed by removal of combining marks."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    # letters with no decomposition that still carry a "diacritic" look
    return stripped.replace("ß", "ss").replace("ø", "o").replace("Ø", "O").replace("ł", "l").replace("Ł", "L")


def collapse_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


def fold(text: str) -> str:
    """Lookup key: diacritic-free, lower case, single-spaced."""
    return collapse_ws(strip_diacritics(text).casefold())


def tokens(text: str) -> list[str]:
    """Folded word tokens used for dictionary matching.

    Apostrophes are deleted rather than split on, so "Children's" gives
    "childrens" and not a stray "s".
    """
    return _TOKEN.findall(_APOSTROPHES.sub("", fold(text)))


def raw_tokens(text: str) -> list[str]:
    """Tokens of the unfolded text, where the original capitalization matters.

    Same segmentation as :func:`tokens`: the i-th raw token folds to the
    i-th folded token.
    """
    cleaned = _APOSTROPHES.sub("", unicodedata.normalize("NFC", text))
    return _TOKEN.findall(cleaned)


def strip_artifacts(text: str) -> str:
    """Remove spelled-out footnote symbols from the start of a phrase."""
    return _ARTIFACT.sub("", text, count=1).strip()


def alignment_text(text: str) -> str:
    """Text as fed to the character aligners.

    Upper case, diacritics folded, whitespace runs collapsed; punctuation is
    kept because it takes part in the alignment.
    """
    return collapse_ws(strip_diacritics(text).upper())
