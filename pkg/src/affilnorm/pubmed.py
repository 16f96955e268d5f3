"""Reading affiliation corpora: TSV files, PubMed efetch XML and live eutils."""

from __future__ import annotations

import csv
import logging
import time
import urllib.error
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

EUTILS_BASE = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/"
MAX_ATTEMPTS = 3


class InputFormatError(ValueError):
    """Unreadable input file (malformed XML, unknown format)."""


class FetchError(RuntimeError):
    """An eutils request failed after all retries."""


@dataclass
class ParseStats:
    records: int = 0
    skipped_empty: int = 0
    skipped_malformed: int = 0


def parse_input(path: str | Path, fmt: str = "tsv", stats: ParseStats | None = None) -> Iterator[tuple[str, str]]:
    """Yield (pmid, affiliation) pairs.

    TSV rows are ``pmid<TAB>affiliation``; malformed rows are skipped with a
    warning.  For efetch XML the first affiliation of each citation is used.
    Rows with an empty affiliation are skipped and counted in ``stats``.
    """
    stats = stats if stats is not None else ParseStats()
    if fmt == "tsv":
        return _parse_tsv(Path(path), stats)
    if fmt in ("pubmed-xml", "xml"):
        return _parse_xml(Path(path), stats)
    raise InputFormatError(f"unknown input format {fmt!r}; expected tsv or pubmed-xml")


def _parse_tsv(path: Path, stats: ParseStats) -> Iterator[tuple[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE), 1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2 or not row[0].strip():
                logger.warning("%s:%d: expected 'pmid<TAB>affiliation', skipping", path, lineno)
                stats.skipped_malformed += 1
                continue
            pmid, affiliation = row[0].strip(), row[1].strip()
            if not affiliation:
                stats.skipped_empty += 1
                continue
            stats.records += 1
            yield pmid, affiliation
    if stats.skipped_empty:
        logger.info("%s: skipped %d rows with empty affiliation", path, stats.skipped_empty)


def _parse_xml(path: Path, stats: ParseStats) -> Iterator[tuple[str, str]]:
    data = path.read_bytes()
    if not data.strip():
        return
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        offset = sum(len(x) + 1 for x in data.split(b"\n")[: line - 1]) + col
        raise InputFormatError(f"{path}: malformed XML at byte offset {offset} (line {line}, column {col})") from None
    for article in root.iter("PubmedArticle"):
        pmid = article.findtext(".//MedlineCitation/PMID") or article.findtext(".//PMID")
        aff = next((a for a in article.iter("Affiliation")), None)
        text = "".join(aff.itertext()).strip() if aff is not None else ""
        if not pmid or not text:
            stats.skipped_empty += 1
            continue
        stats.records += 1
        yield pmid.strip(), " ".join(text.split())


def esearch_url(query: str, email: str, base: str = EUTILS_BASE, retmax: int = 100) -> str:
    if not query or not query.strip():
        raise ValueError("query must be non-empty")
    params = {"db": "pubmed", "term": query, "retmax": str(retmax), "usehistory": "y", "email": email, "tool": "affilnorm"}
    return base + "esearch.fcgi?" + urllib.parse.urlencode(params)


def efetch_url(webenv: str, query_key: str, email: str, base: str = EUTILS_BASE, retmax: int = 100) -> str:
    params = {
        "db": "pubmed",
        "query_key": query_key,
        "WebEnv": webenv,
        "retmode": "xml",
        "retmax": str(retmax),
        "email": email,
        "tool": "affilnorm",
    }
    return base + "efetch.fcgi?" + urllib.parse.urlencode(params)


def _get(url: str, timeout: float, backoff: float) -> bytes:
    last: Exception | None = None
    for attempt in range(MAX_ATTEMPTS):
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError) as exc:
            last = exc
            logger.warning("request %s failed (attempt %d/%d): %s", url, attempt + 1, MAX_ATTEMPTS, exc)
            if attempt + 1 < MAX_ATTEMPTS:
                time.sleep(backoff * 2**attempt)
    raise FetchError(f"{url}: {last}")


def fetch_eutils(
    query: str,
    email: str,
    out: str | Path,
    *,
    base: str = EUTILS_BASE,
    retmax: int = 100,
    timeout: float = 30.0,
    backoff: float = 1.0,
) -> Path:
    """esearch then efetch; the raw efetch XML is written to ``out``."""
    search = _get(esearch_url(query, email, base, retmax), timeout, backoff)
    try:
        root = ET.fromstring(search)
    except ET.ParseError as exc:
        raise FetchError(f"malformed esearch response: {exc}") from None
    webenv, query_key = root.findtext("WebEnv"), root.findtext("QueryKey")
    if not webenv or not query_key:
        raise FetchError("esearch response lacks WebEnv/QueryKey")
    body = _get(efetch_url(webenv, query_key, email, base, retmax), timeout, backoff)
    out = Path(out)
    out.write_bytes(body)
    return out
