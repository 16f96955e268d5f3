"""Affiliation string -> structured record, by elimination.

Phrases that are plainly something else (contact details, country, street
address, city/state) are removed first; what survives is examined for
organization names.  Step order:

1. contact (email, URL)
2. country (explicit phrase, else the email's country domain)
3. acronym expansion
4. address: address keyword, or numbers with directions; an organization
   keyword vetoes the tag
5. city / state / zip, consuming phrases made only of place names
6. organizations
7. leftovers are translated to English and run through steps 4-6 again
"""

from __future__ import annotations

import logging
import re
from typing import NamedTuple

from .gazetteers import GazetteerSet, GeoMatch, default_gazetteers
from .normalization import make_mention
from .records import GPE, EntityClass, ExtractedRecord, OrgMention, Phrase
from .textutil import raw_tokens, strip_artifacts, tokens
from .translation import KeywordTranslator, TranslationProvider, _translate, translate_phrase

__all__ = [
    "split_phrases",
    "detect_contact",
    "detect_country",
    "expand_acronyms",
    "detect_address",
    "detect_city_state",
    "detect_organizations",
    "resolve_city_org_ambiguity",
    "translate_phrase",
    "strip_artifacts",
    "extract",
]

logger = logging.getLogger(__name__)

EMAIL_RE = re.compile(r"(?:[\w.+-]+\s?)?@\s?[\w-]+(?:\.[\w-]+)+")
URL_RE = re.compile(r"(?:https?://|ftp://|www\.)[^\s,;]+", re.IGNORECASE)
_CONTACT_LABEL = re.compile(
    r"(?:\b(?:e-?mail|electronic\s+address|correspondence|contact|tel|phone|fax)\b\s*(?:address)?\s*:?\s*)+$",
    re.IGNORECASE,
)
_ACRONYM = re.compile(r"(?<![\w.])[A-Z][A-Z]+(?![\w])")


def split_phrases(affiliation: str) -> list[Phrase]:
    """Split on commas and semicolons; emails and URLs become their own phrases."""
    if not affiliation or not affiliation.strip():
        return []
    contacts = []
    for m in EMAIL_RE.finditer(affiliation):
        contacts.append((m.start(), m.end()))
    for m in URL_RE.finditer(affiliation):
        if not any(s <= m.start() < e for s, e in contacts):
            contacts.append((m.start(), m.end()))
    contacts.sort()

    phrases: list[Phrase] = []
    pos = 0
    for start, end in contacts + [(len(affiliation), len(affiliation))]:
        segment = affiliation[pos:start]
        if start < len(affiliation):
            segment = _CONTACT_LABEL.sub("", segment)
        phrases.extend(_split_segment(segment, pos))
        if start < end:
            text = affiliation[start:end].rstrip(".")
            phrases.append(Phrase(text.strip(), start + (len(text) - len(text.lstrip()))))
        pos = end
    return phrases


def _split_segment(segment: str, offset: int) -> list[Phrase]:
    out = []
    pieces = list(re.finditer(r"[^,;]+", segment))
    for k, m in enumerate(pieces):
        text = m.group(0)
        lead = len(text) - len(text.lstrip())
        text = text.strip()
        if k == len(pieces) - 1:
            # sentence-final period
            text = text.rstrip(".").rstrip()
        if text and re.search(r"\w", text):
            out.append(Phrase(text, offset + m.start() + lead))
    return out


def detect_contact(phrases: list[Phrase]) -> tuple[list[str], list[str], list[Phrase]]:
    emails, urls, remaining = [], [], []
    for p in phrases:
        email = EMAIL_RE.search(p.text)
        if email and "@" in p.text:
            p.consume(EntityClass.EMAIL)
            emails.append(re.sub(r"\s*@\s*", "@", email.group(0).strip()))
            continue
        url = URL_RE.search(p.text)
        if url:
            p.consume(EntityClass.URL)
            urls.append(url.group(0).rstrip("."))
            continue
        remaining.append(p)
    return emails, urls, remaining


def detect_country(phrases: list[Phrase], emails: list[str], gaz: GazetteerSet) -> tuple[str | None, list[Phrase]]:
    """Country from an explicit phrase (consumed), else from an email domain."""
    for p in reversed(phrases):
        country = gaz.canonical_country(p.text.strip(" ."))
        if country is not None:
            p.consume(EntityClass.COUNTRY)
            return country, [q for q in phrases if q is not p]
    if phrases:
        # "Washington, DC 20007 USA": country glued to the end of the last phrase
        last = phrases[-1]
        words = last.text.split()
        for n in range(min(4, len(words) - 1), 0, -1):
            country = gaz.canonical_country(" ".join(words[-n:]).strip(" ."))
            if country is None:
                continue
            remainder = " ".join(words[:-n]).rstrip(" ,.")
            if remainder and not gaz.org_keywords.found_in(tokens(remainder)):
                last.original = last.original or last.text
                last.text = remainder
                return country, phrases
    for email in emails:
        country = gaz.country_for_domain(email.rsplit("@", 1)[-1])
        if country is not None:
            return country, phrases
    return None, phrases


def expand_acronyms(phrases: list[Phrase], gaz: GazetteerSet, country: str | None = None) -> list[Phrase]:
    """Replace upper-case acronyms with their unambiguous expansions, in place."""
    for p in phrases:
        expanded = _ACRONYM.sub(lambda m: gaz.expand_acronym(m.group(0), country), p.text)
        if expanded != p.text:
            p.original = p.original or p.text
            p.text = expanded
    return phrases


def _is_address(text: str, gaz: GazetteerSet) -> bool:
    toks = tokens(text)
    if not toks or gaz.org_keywords.found_in(toks):
        return False
    if gaz.address_keywords.found_in(toks):
        return True
    numeric = [i for i, t in enumerate(toks) if t[0].isdigit()]
    if not numeric:
        return False
    if gaz.directions.found_in(toks):
        return True
    # "12 Main St": a weak keyword counts once a number precedes it
    return any(s > numeric[0] for s, _ in gaz.address_weak_keywords.spans(toks))


def detect_address(phrases: list[Phrase], gaz: GazetteerSet) -> tuple[list[str], list[Phrase]]:
    addresses, remaining = [], []
    for p in phrases:
        if _is_address(p.text, gaz):
            p.consume(EntityClass.ADDRESS)
            addresses.append(p.text)
        else:
            remaining.append(p)
    return addresses, remaining


class CityState(NamedTuple):
    city: str | None
    state: str | None
    remaining: list[Phrase]
    country: str | None = None


def _has_org_keyword(text: str, gaz: GazetteerSet) -> bool:
    return gaz.org_keywords.found_in(tokens(text))


def _yields_city(p: Phrase, m: GeoMatch, gaz: GazetteerSet, exclude: str | None = None) -> bool:
    if not m.covered or _has_org_keyword(p.text, gaz):
        return False
    if any(c != exclude for c in m.cities):
        return True
    return any(z.city != exclude for z in m.zips)


def resolve_city_org_ambiguity(
    phrase: Phrase, other_phrases: list[Phrase], gaz: GazetteerSet, country: str | None = None
) -> str:
    """'organization' if another phrase supplies the city, else 'city'.

    For a phrase that reads both as a city and as an organization
    ("Auburn University" is also a US postal city).
    """
    own = gaz.lookup_geo(phrase.text, country)
    own_cities = own.cities
    exclude = own_cities[0] if own_cities else None
    for other in other_phrases:
        if other is phrase or not other.text.strip():
            continue
        if _yields_city(other, gaz.lookup_geo(other.text, country), gaz, exclude):
            return "organization"
    return "city"


def detect_city_state(
    phrases: list[Phrase],
    gaz: GazetteerSet,
    country: str | None = None,
    warnings: list[str] | None = None,
) -> CityState:
    """City and state from whole or partial phrase matches.

    Phrases made only of place names and zip codes are consumed; mixed
    phrases stay in the pool.  Returns a country guess when none was given
    and every hit agrees on one.
    """
    warnings = warnings if warnings is not None else []
    matches = {id(p): gaz.lookup_geo(p.text, country) for p in phrases if p.text.strip()}

    geo: list[tuple[Phrase, GeoMatch]] = []
    for p in phrases:
        m = matches.get(id(p))
        if m is None or not m.covered:
            continue
        if _has_org_keyword(p.text, gaz):
            if not m.cities:
                continue
            if resolve_city_org_ambiguity(p, phrases, gaz, country) == "organization":
                continue
        geo.append((p, m))

    city = state = None
    zip_hits = []
    deferred = []
    for p, m in geo:
        spans: dict[tuple[int, int], dict[str, list]] = {}
        for h in m.hits:
            spans.setdefault((h.start, h.end), {}).setdefault(h.kind, []).append(h)
        for kinds in spans.values():
            if "zip" in kinds:
                zip_hits.extend(kinds["zip"])
            elif "city" in kinds and "state" in kinds:
                deferred.append(kinds)
            elif "city" in kinds:
                city = city or kinds["city"][0].value
            elif "state" in kinds:
                state = state or kinds["state"][0].value
        p.consume(EntityClass.CITY if m.cities else EntityClass.STATE if (m.states or m.zips) else EntityClass.COUNTRY)

    for kinds in deferred:
        c_hit, s_hit = kinds["city"][0], kinds["state"][0]
        if city is None and state is not None:
            city = c_hit.value
        elif state is None and city is not None:
            state = s_hit.value
        elif city is None and state is None:
            city = c_hit.value
            if c_hit.state == s_hit.value:
                state = s_hit.value

    for z in zip_hits:
        if state is not None and z.state != state:
            msg = f"zip {z.value} belongs to {z.state}, phrase names {state}; keeping {state}"
            logger.warning(msg)
            warnings.append(msg)
            continue
        state = state or z.state
        city = city or z.city

    guess = None
    if country is None:
        countries = {h.country for _, m in geo for h in m.hits}
        if len(countries) == 1:
            guess = countries.pop()
    remaining = [p for p in phrases if p.consumed_as is None]
    return CityState(city, state, remaining, guess)


def _has_place(toks: list[str], gaz: GazetteerSet) -> bool:
    for i in range(len(toks)):
        for n in range(1, min(4, len(toks) - i) + 1):
            if gaz.is_place_name(" ".join(toks[i : i + n])):
                return True
    return False


def _has_proper_name(text: str, gaz: GazetteerSet) -> bool:
    for word in raw_tokens(text):
        if word[:1].isupper() and not word.isdigit() and not gaz.is_stopword(word) and not gaz.is_org_keyword(word):
            return True
    return False


def _keyword_only(text: str, gaz: GazetteerSet) -> bool:
    toks = tokens(text)
    return bool(toks) and gaz.org_keywords.has_key(tuple(toks))


def _starts_with_and(text: str) -> bool:
    return bool(re.match(r"(?:and\b|&)", text.strip(), re.IGNORECASE))


def detect_organizations(
    phrases: list[Phrase],
    gaz: GazetteerSet,
    gpe: GPE | None = None,
    pmid: str | None = None,
    provider: TranslationProvider | None = None,
    *,
    found_before: int = 0,
) -> list[OrgMention]:
    """Organization rules on the surviving phrases, in order.

    a) a following phrase that is just an organization keyword, or starts
       with "and", is appended to the current one;
    b) a phrase with an organization keyword not starting with a number;
    c) while nothing is found yet, a phrase with a place or proper name;
    d) the last phrase when nothing was found at all.
    """
    gpe = gpe or GPE()
    pool = [p for p in phrases if p.consumed_as is None]
    found: list[tuple[str, list[Phrase]]] = []
    i = 0
    while i < len(pool):
        group = [pool[i]]
        text = pool[i].text
        while i + 1 < len(pool):
            nxt = pool[i + 1].text
            if _starts_with_and(nxt):
                text = f"{text} {nxt.strip()}"
            elif _keyword_only(nxt, gaz):
                text = f"{text}, {nxt.strip()}"
            else:
                break
            group.append(pool[i + 1])
            i += 1
        toks = tokens(text)
        is_last = i == len(pool) - 1
        none_yet = not found and not found_before
        tagged = False
        if toks and gaz.org_keywords.found_in(toks) and not toks[0][0].isdigit():
            tagged = True
        elif none_yet and toks and (_has_place(toks, gaz) or _has_proper_name(text, gaz)):
            tagged = True
        elif none_yet and is_last and toks:
            tagged = True
        if tagged:
            found.append((text, group))
            for p in group:
                p.consume(EntityClass.ORGANIZATION)
        i += 1
    return [make_mention(text, gpe, pmid, gaz, provider) for text, _ in found]


def extract(
    affiliation: str,
    gaz: GazetteerSet | None = None,
    provider: TranslationProvider | None = None,
    pmid: str | None = None,
) -> ExtractedRecord:
    gaz = gaz or default_gazetteers()
    provider = provider or KeywordTranslator(gaz)
    record = ExtractedRecord(pmid=pmid)

    phrases = split_phrases(affiliation)
    record.emails, record.urls, rest = detect_contact(phrases)
    country, rest = detect_country(rest, record.emails, gaz)
    rest = expand_acronyms(rest, gaz, country)
    record.addresses, rest = detect_address(rest, gaz)
    cs = detect_city_state(rest, gaz, country, record.warnings)
    country = country or cs.country
    gpe = GPE(country=country, state=cs.state, city=cs.city)
    orgs = detect_organizations(cs.remaining, gaz, gpe, pmid, provider)
    record.gpe = gpe

    for p in [p for p in cs.remaining if p.consumed_as is None]:
        translated, failed = _translate(p.text, provider, country)
        if failed:
            record.warnings.append(f"translation unavailable for {p.text!r}")
        if translated == p.text:
            continue
        q = Phrase(translated, p.index, original=p.text)
        kind = _retry(q, gaz, country, gpe, record, orgs, pmid, provider)
        if kind is not None:
            p.consume(kind)
            record.used_translation = True
            gpe = record.gpe

    for m in orgs:
        m.gpe = record.gpe
    record.organizations = orgs
    record.leftovers = [p.text for p in cs.remaining if p.consumed_as is None]
    return record


def _retry(q, gaz, country, gpe, record, orgs, pmid, provider) -> EntityClass | None:
    """Run address, city/state and organization detection on one translated phrase."""
    addresses, rest = detect_address([q], gaz)
    if addresses:
        record.addresses.append(q.original or q.text)
        return EntityClass.ADDRESS
    cs = detect_city_state(rest, gaz, country, record.warnings)
    if q.consumed_as is not None:
        record.gpe = GPE(
            country=gpe.country or cs.country,
            state=gpe.state or cs.state,
            city=gpe.city or cs.city,
        )
        return q.consumed_as
    found = detect_organizations([q], gaz, gpe, pmid, provider, found_before=len(orgs))
    if found:
        orgs.extend(make_mention(q.original or q.text, gpe, pmid, gaz, provider) for _ in found)
        return EntityClass.ORGANIZATION
    return None
