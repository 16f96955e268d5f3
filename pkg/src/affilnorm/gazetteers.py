"""Dictionaries used by extraction and normalization.

A gazetteer directory holds plain UTF-8 files, one entry per line, ``#``
comments, tab-separated columns for maps::

    countries.txt            code, canonical name, aliases...
    states.<cc>.tsv          state code, name, aliases...
    cities.<cc>.txt          city, optional state code
    zipcodes.<cc>.tsv        zip, city, state code
    domains.tsv              top-level domain, country
    org_keywords.txt         organization keywords (multilingual)
    address_keywords.txt     address / facility keywords
    address_weak_keywords.txt  abbreviations valid only after a number
    stopwords.txt
    acronyms.tsv             acronym, expansion, optional country
    person_names.txt / person_nonnames.txt
    directions.txt
    translations.tsv         foreign term, English, optional "function"

``<cc>`` is a lowercase ISO-3166 alpha-2 code.  All lookups fold case and
diacritics.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .textutil import fold, raw_tokens, tokens

logger = logging.getLogger(__name__)

LOOKUP_KINDS = ("stopword", "org_keyword", "address_keyword", "direction", "person_name", "place_name")

#: Ambiguous acronym marker in acronyms.tsv.
AMBIGUOUS = "-"

PersonNameProvider = Callable[[str], "bool | None"]


class GazetteerLoadError(ValueError):
    """A dictionary file has a malformed line."""

    def __init__(self, path: Path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class GeoHit:
    kind: str  # country | state | city | zip
    value: str
    country: str
    start: int
    end: int
    state: str | None = None
    city: str | None = None


@dataclass
class GeoMatch:
    """Every geographic reading found in one phrase."""

    hits: list[GeoHit]
    n_tokens: int
    postcodes: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.hits)

    def of_kind(self, kind: str) -> list[GeoHit]:
        return [h for h in self.hits if h.kind == kind]

    @property
    def countries(self) -> list[str]:
        return _unique(h.value for h in self.hits if h.kind == "country")

    @property
    def states(self) -> list[str]:
        return _unique(h.value for h in self.hits if h.kind == "state")

    @property
    def cities(self) -> list[str]:
        return _unique(h.value for h in self.hits if h.kind == "city")

    @property
    def zips(self) -> list[GeoHit]:
        return self.of_kind("zip")

    @property
    def covered(self) -> bool:
        """True when every token is a geo hit or an unlisted postal code."""
        if not self.hits or not self.n_tokens:
            return False
        seen = set(self.postcodes)
        for h in self.hits:
            seen.update(range(h.start, h.end))
        return len(seen) == self.n_tokens


def _unique(values: Iterable[str]) -> list[str]:
    out: list[str] = []
    for v in values:
        if v not in out:
            out.append(v)
    return out


class PhraseSet:
    """Set of (possibly multi-word) entries matched on folded tokens."""

    def __init__(self, entries: Iterable[str] = ()):
        self._entries: set[tuple[str, ...]] = set()
        self.max_len = 0
        for e in entries:
            self.add(e)

    def add(self, entry: str) -> None:
        key = tuple(tokens(entry))
        if key:
            self._entries.add(key)
            self.max_len = max(self.max_len, len(key))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PhraseSet) and self._entries == other._entries

    def __contains__(self, text: str) -> bool:
        return tuple(tokens(text)) in self._entries

    def has_key(self, key: tuple[str, ...]) -> bool:
        return key in self._entries

    def spans(self, toks: list[str]) -> list[tuple[int, int]]:
        """Longest-first, non-overlapping matches inside a token list."""
        out = []
        i = 0
        while i < len(toks):
            for n in range(min(self.max_len, len(toks) - i), 0, -1):
                if tuple(toks[i : i + n]) in self._entries:
                    out.append((i, i + n))
                    i += n
                    break
            else:
                i += 1
        return out

    def found_in(self, toks: list[str]) -> bool:
        return bool(self.spans(toks))


@dataclass
class GazetteerSet:
    # canonical country name -> cc, and folded alias -> canonical
    country_codes: dict[str, str] = field(default_factory=dict)
    countries: dict[str, str] = field(default_factory=dict)
    # cc -> folded state name/alias -> code; cc -> set of codes
    states: dict[str, dict[str, str]] = field(default_factory=dict)
    state_codes: dict[str, dict[str, str]] = field(default_factory=dict)
    # cc -> folded city -> (display name, state codes)
    cities: dict[str, dict[str, tuple[str, frozenset[str]]]] = field(default_factory=dict)
    zipcodes: dict[str, dict[str, tuple[str, str]]] = field(default_factory=dict)
    domains: dict[str, str] = field(default_factory=dict)
    org_keywords: PhraseSet = field(default_factory=PhraseSet)
    address_keywords: PhraseSet = field(default_factory=PhraseSet)
    address_weak_keywords: PhraseSet = field(default_factory=PhraseSet)
    stopwords: frozenset[str] = frozenset()
    # (folded acronym, country or None) -> expansion, None when ambiguous
    acronyms: dict[tuple[str, str | None], str | None] = field(default_factory=dict)
    person_names: set[str] = field(default_factory=set)
    person_nonnames: set[str] = field(default_factory=set)
    directions: PhraseSet = field(default_factory=PhraseSet)
    # folded foreign term -> (English, is_function_word)
    translations: dict[tuple[str, ...], tuple[str, bool]] = field(default_factory=dict)
    source: Path | None = None
    person_provider: PersonNameProvider | None = field(default=None, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)
    _cc_names: dict[str, str] | None = field(default=None, repr=False, compare=False)

    # -- simple membership --------------------------------------------------

    def counts(self) -> dict[str, int]:
        return {
            "countries": len(self.country_codes),
            "states": sum(len(v) for v in self.state_codes.values()),
            "cities": sum(len(v) for v in self.cities.values()),
            "zipcodes": sum(len(v) for v in self.zipcodes.values()),
            "domains": len(self.domains),
            "org_keywords": len(self.org_keywords),
            "address_keywords": len(self.address_keywords) + len(self.address_weak_keywords),
            "stopwords": len(self.stopwords),
            "acronyms": len(self.acronyms),
            "person_names": len(self.person_names),
            "person_nonnames": len(self.person_nonnames),
            "directions": len(self.directions),
            "translations": len(self.translations),
        }

    def lookup(self, kind: str, token: str) -> bool:
        if kind not in LOOKUP_KINDS:
            raise ValueError(f"unknown lookup kind {kind!r}; expected one of {LOOKUP_KINDS}")
        if not token or not token.strip():
            raise ValueError("lookup token must be non-empty")
        if kind == "stopword":
            return fold(token) in self.stopwords
        if kind == "org_keyword":
            return token in self.org_keywords
        if kind == "address_keyword":
            return token in self.address_keywords or token in self.address_weak_keywords
        if kind == "direction":
            return token in self.directions
        if kind == "person_name":
            return self.is_person_name(token)
        return self.is_place_name(token)

    def is_stopword(self, token: str) -> bool:
        return fold(token) in self.stopwords

    def is_org_keyword(self, text: str) -> bool:
        return text in self.org_keywords

    def is_person_name(self, token: str) -> bool:
        key = fold(token)
        if key in self.person_nonnames:
            return False
        if key in self.person_names:
            return True
        if self.person_provider is None:
            return False
        return self._ask_provider(key)

    def _ask_provider(self, key: str) -> bool:
        with self._lock:
            if key in self.person_names or key in self.person_nonnames:
                return key in self.person_names
            answer = self.person_provider(key)
            if answer is None:
                # provider could not decide; do not cache
                return False
            target = self.person_names if answer else self.person_nonnames
            target.add(key)
            if self.source is not None:
                name = "person_names.txt" if answer else "person_nonnames.txt"
                with open(self.source / name, "a", encoding="utf-8") as fh:
                    fh.write(key + "\n")
            return bool(answer)

    def is_place_name(self, text: str) -> bool:
        """Country, state or city name in any country; state codes excluded."""
        key = place_key(text)
        if not key:
            return False
        if key in self.countries:
            return True
        if any(key in names for names in self.states.values()):
            return True
        return any(key in names for names in self.cities.values())

    def country_code(self, country: str | None) -> str | None:
        if country is None:
            return None
        canonical = self.canonical_country(country)
        return self.country_codes.get(canonical) if canonical else None

    def canonical_country(self, text: str) -> str | None:
        return self.countries.get(fold(text)) or self.countries.get(place_key(text))

    def country_for_domain(self, domain: str) -> str | None:
        tld = domain.strip().rstrip(".").rsplit(".", 1)[-1]
        return self.domains.get(fold(tld))

    # -- acronyms ---------------------------------------------------------

    def expand_acronym(self, token: str, country_scope: str | None = None) -> str:
        if not token or not token.strip():
            raise ValueError("acronym token must be non-empty")
        key = fold(token)
        if country_scope is not None:
            scope = self.canonical_country(country_scope) or country_scope
            if (key, scope) in self.acronyms:
                return self.acronyms[(key, scope)] or token
        if (key, None) in self.acronyms:
            return self.acronyms[(key, None)] or token
        return token

    # -- geography --------------------------------------------------------

    def _scope_codes(self, country_scope: str | None) -> list[str]:
        if country_scope is None:
            codes = set(self.country_codes.values())
            codes.update(self.states, self.cities, self.zipcodes)
            return sorted(codes)
        cc = self.country_code(country_scope)
        return [cc] if cc else []

    def lookup_geo(self, phrase: str, country_scope: str | None = None) -> GeoMatch:
        """All geographic readings of a phrase, longest match first.

        Two-letter state codes only match when written in upper case in the
        phrase ("IN" is Indiana, "in" is a preposition).
        """
        if not phrase or not phrase.strip():
            raise ValueError("phrase must be non-empty")
        toks = tokens(phrase)
        raw = raw_tokens(phrase)
        if len(raw) != len(toks):
            raw = toks
        codes = self._scope_codes(country_scope)
        hits: list[GeoHit] = []
        postcodes: list[int] = []
        i = 0
        while i < len(toks):
            found: list[GeoHit] = []
            for n in range(min(6, len(toks) - i), 0, -1):
                key = " ".join(toks[i : i + n])
                found = self._hits_for(key, raw[i : i + n], codes, i, i + n, country_scope)
                if found:
                    break
            if found:
                hits.extend(found)
                i = found[0].end
            else:
                if any(ch.isdigit() for ch in toks[i]):
                    postcodes.append(i)
                i += 1
        return GeoMatch(hits, len(toks), postcodes)

    def _hits_for(self, key, raw, codes, start, end, country_scope) -> list[GeoHit]:
        out: list[GeoHit] = []
        country = self.countries.get(key)
        if country is not None and (country_scope is None or self.country_code(country) in codes):
            out.append(GeoHit("country", country, country, start, end))
        for cc in codes:
            cname = self._scope_country(cc)
            code = self.states.get(cc, {}).get(key)
            if code is None and len(raw) == 1 and raw[0].isupper():
                code = self.state_codes.get(cc, {}).get(key)
            if code is not None:
                out.append(GeoHit("state", code, cname, start, end, state=code))
            city = self.cities.get(cc, {}).get(key)
            if city is not None:
                display, states = city
                state = next(iter(states)) if len(states) == 1 else None
                out.append(GeoHit("city", display, cname, start, end, state=state, city=display))
            if end - start == 1 and key.isdigit():
                z = self.zipcodes.get(cc, {}).get(key)
                if z is not None:
                    out.append(GeoHit("zip", key, cname, start, end, state=z[1], city=z[0]))
        return out

    def _scope_country(self, cc: str) -> str:
        if self._cc_names is None:
            self._cc_names = {code: name for name, code in self.country_codes.items()}
        return self._cc_names.get(cc, cc.upper())

    def city_states(self, city: str, country: str | None) -> frozenset[str]:
        key = place_key(city)
        for cc in self._scope_codes(country):
            entry = self.cities.get(cc, {}).get(key)
            if entry is not None:
                return entry[1]
        return frozenset()


# -- loading ----------------------------------------------------------------


def place_key(text: str) -> str:
    """Lookup key for place names: folded tokens, punctuation dropped."""
    return " ".join(tokens(text))


def _lines(path: Path) -> Iterator[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, [c.strip() for c in line.split("\t")]


def _read(path: Path, min_fields: int, max_fields: int | None) -> Iterator[tuple[int, list[str]]]:
    for lineno, cols in _lines(path):
        while len(cols) > min_fields and cols[-1] == "":
            cols.pop()
        if len(cols) < min_fields or (max_fields is not None and len(cols) > max_fields):
            want = str(min_fields) if min_fields == max_fields else f"{min_fields}..{max_fields or 'n'}"
            raise GazetteerLoadError(path, lineno, f"expected {want} tab-separated fields, got {len(cols)}")
        if any(not c for c in cols[:min_fields]):
            raise GazetteerLoadError(path, lineno, "empty required field")
        yield lineno, cols


def _optional(directory: Path, name: str, missing: list[str]) -> Path | None:
    path = directory / name
    if path.is_file():
        return path
    missing.append(name)
    return None


def load_gazetteers(directory: str | Path, person_provider: PersonNameProvider | None = None) -> GazetteerSet:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"gazetteer directory not found: {directory}")
    gaz = GazetteerSet(source=directory, person_provider=person_provider)
    missing: list[str] = []

    if path := _optional(directory, "countries.txt", missing):
        for _, cols in _read(path, 2, None):
            cc, canonical = cols[0].lower(), cols[1]
            gaz.country_codes[canonical] = cc
            for alias in cols[1:]:
                gaz.countries[fold(alias)] = canonical
                gaz.countries.setdefault(place_key(alias), canonical)

    for path in sorted(directory.glob("states.*.tsv")):
        cc = path.name.split(".")[1].lower()
        names = gaz.states.setdefault(cc, {})
        codes = gaz.state_codes.setdefault(cc, {})
        for _, cols in _read(path, 2, None):
            code = cols[0]
            codes[fold(code)] = code
            for alias in cols[1:]:
                names[place_key(alias)] = code

    for path in sorted(directory.glob("cities.*.txt")):
        cc = path.name.split(".")[1].lower()
        table = gaz.cities.setdefault(cc, {})
        for _, cols in _read(path, 1, 2):
            key = place_key(cols[0])
            display, states = table.get(key, (cols[0], frozenset()))
            if len(cols) == 2:
                states = states | {cols[1]}
            table[key] = (display, states)

    for path in sorted(directory.glob("zipcodes.*.tsv")):
        cc = path.name.split(".")[1].lower()
        table = gaz.zipcodes.setdefault(cc, {})
        cities = gaz.cities.setdefault(cc, {})
        for lineno, cols in _read(path, 3, 3):
            zipcode, city, state = cols
            if not zipcode.isdigit():
                raise GazetteerLoadError(path, lineno, f"zip code must be digits: {zipcode!r}")
            if zipcode in table and table[zipcode] != (city, state):
                raise GazetteerLoadError(path, lineno, f"zip code {zipcode} mapped twice")
            table[zipcode] = (city, state)
            # a zip's city is a city in its own right
            key = place_key(city)
            display, states = cities.get(key, (city, frozenset()))
            cities[key] = (display, states | {state})

    if path := _optional(directory, "domains.tsv", missing):
        for _, cols in _read(path, 2, 2):
            gaz.domains[fold(cols[0]).lstrip(".")] = cols[1]

    for name, attr in (
        ("org_keywords.txt", "org_keywords"),
        ("address_keywords.txt", "address_keywords"),
        ("address_weak_keywords.txt", "address_weak_keywords"),
        ("directions.txt", "directions"),
    ):
        if path := _optional(directory, name, missing):
            target = getattr(gaz, attr)
            for _, cols in _read(path, 1, 1):
                target.add(cols[0])

    if path := _optional(directory, "stopwords.txt", missing):
        gaz.stopwords = frozenset(fold(cols[0]) for _, cols in _read(path, 1, 1))

    for name, attr in (("person_names.txt", "person_names"), ("person_nonnames.txt", "person_nonnames")):
        if path := _optional(directory, name, missing):
            getattr(gaz, attr).update(fold(cols[0]) for _, cols in _read(path, 1, 1))

    if path := _optional(directory, "acronyms.tsv", missing):
        for _, cols in _read(path, 1, 3):
            expansion = cols[1] if len(cols) > 1 and cols[1] not in ("", AMBIGUOUS) else None
            scope = None
            if len(cols) == 3 and cols[2]:
                scope = gaz.canonical_country(cols[2]) or cols[2]
            gaz.acronyms[(fold(cols[0]), scope)] = expansion

    if path := _optional(directory, "translations.tsv", missing):
        for lineno, cols in _read(path, 2, 3):
            flag = len(cols) == 3 and cols[2] == "function"
            if len(cols) == 3 and cols[2] and not flag:
                raise GazetteerLoadError(path, lineno, f"unknown translation flag {cols[2]!r}")
            gaz.translations[tuple(tokens(cols[0]))] = (cols[1], flag)

    for name in missing:
        logger.warning("gazetteer file %s missing in %s; using an empty list", name, directory)
    if not list(directory.glob("cities.*.txt")):
        logger.warning("no cities.<cc>.txt files in %s", directory)
    logger.info("loaded gazetteers from %s: %s", directory, gaz.counts())
    return gaz


def default_gazetteer_dir() -> Path:
    return Path(str(resources.files("affilnorm") / "data"))


@lru_cache(maxsize=1)
def default_gazetteers() -> GazetteerSet:
    """The seed dictionaries shipped with the package (shared, do not mutate)."""
    return load_gazetteers(default_gazetteer_dir())
