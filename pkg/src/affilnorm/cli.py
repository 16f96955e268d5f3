"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import TextIO

from .evaluation import eval_metrics, read_gold
from .extraction import extract
from .gazetteers import GazetteerLoadError, GazetteerSet, default_gazetteer_dir, default_gazetteers, load_gazetteers
from .normalization import (
    CurationError,
    NormalizationResult,
    OrgDB,
    associate_article,
    curate,
    described_mentions,
    normalize_mention,
    train,
)
from .pubmed import EUTILS_BASE, FetchError, InputFormatError, ParseStats, fetch_eutils, parse_input
from .records import GPE, ExtractedRecord, MentionKind, OrgMention
from .store import OrgDBFormatError, load_orgdb, save_orgdb

logger = logging.getLogger("affilnorm")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- record serialization -----------------------------------------------------


def record_to_dict(record: ExtractedRecord, results: list[NormalizationResult | None] | None = None) -> dict:
    results = results or [None] * len(record.organizations)
    orgs = []
    for m, r in zip(record.organizations, results):
        orgs.append(
            {
                "name": m.raw,
                "kind": m.kind.value,
                "normalized": r.display_name if r else None,
                "cluster": r.matched_cluster if r else None,
            }
        )
    out = {
        "pmid": record.pmid,
        "organizations": orgs,
        "city": record.gpe.city,
        "state": record.gpe.state,
        "country": record.gpe.country,
        "emails": record.emails,
        "urls": record.urls,
        "addresses": record.addresses,
        "leftovers": record.leftovers,
        "used_translation": record.used_translation,
        "warnings": record.warnings,
    }
    valid = [r for r in results if r is not None]
    if valid:
        out["article_organization"] = associate_article(record.pmid, valid).display_name
    return out


def record_from_dict(obj: dict) -> ExtractedRecord:
    gpe = GPE(country=obj.get("country"), state=obj.get("state"), city=obj.get("city"))
    orgs = [
        OrgMention(
            raw=o["name"],
            canonical_text=o["name"].upper(),
            words=tuple(o["name"].upper().split()),
            kind=MentionKind(o.get("kind", "described")),
            gpe=gpe,
            pmid=obj.get("pmid"),
        )
        for o in obj.get("organizations", [])
    ]
    return ExtractedRecord(
        pmid=obj.get("pmid"),
        organizations=orgs,
        gpe=gpe,
        emails=list(obj.get("emails", [])),
        urls=list(obj.get("urls", [])),
        addresses=list(obj.get("addresses", [])),
        leftovers=list(obj.get("leftovers", [])),
        used_translation=bool(obj.get("used_translation", False)),
    )


TSV_COLUMNS = ("pmid", "organizations", "normalized", "city", "state", "country", "emails", "urls", "addresses")


def _tsv_row(d: dict) -> str:
    cells = [
        d["pmid"] or "",
        " | ".join(o["name"] for o in d["organizations"]),
        " | ".join(o["normalized"] or "" for o in d["organizations"]),
        d["city"] or "",
        d["state"] or "",
        d["country"] or "",
        " | ".join(d["emails"]),
        " | ".join(d["urls"]),
        " | ".join(d["addresses"]),
    ]
    return "\t".join(c.replace("\t", " ") for c in cells)


def write_records(dicts: Iterable[dict], out: TextIO, fmt: str) -> int:
    n = 0
    if fmt == "tsv":
        out.write("\t".join(TSV_COLUMNS) + "\n")
    for d in dicts:
        out.write((_tsv_row(d) if fmt == "tsv" else json.dumps(d, ensure_ascii=False, sort_keys=False)) + "\n")
        n += 1
    return n


# -- pipeline helpers ---------------------------------------------------------

_worker_gaz: GazetteerSet | None = None


def _init_worker(gaz_dir: str | None) -> None:
    global _worker_gaz
    _worker_gaz = load_gazetteers(gaz_dir) if gaz_dir else default_gazetteers()


def _extract_one(item: tuple[str, str]) -> ExtractedRecord:
    pmid, text = item
    return extract(text, _worker_gaz, pmid=pmid)


def extract_stream(items: Iterable[tuple[str, str]], gaz: GazetteerSet, gaz_dir: str | None, workers: int) -> Iterator[ExtractedRecord]:
    """Extracted records in input order, optionally on a process pool."""
    if workers <= 1:
        for pmid, text in items:
            yield extract(text, gaz, pmid=pmid)
        return
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(gaz_dir,)) as pool:
        yield from pool.map(_extract_one, items, chunksize=64)


def _gazetteers(args) -> GazetteerSet:
    return load_gazetteers(args.gazetteers) if args.gazetteers else default_gazetteers()


def _read_items(args) -> tuple[list[tuple[str, str]], ParseStats]:
    if not args.input:
        raise UsageError("--input is required")
    stats = ParseStats()
    items = list(parse_input(args.input, args.input_format, stats))
    if stats.skipped_empty or stats.skipped_malformed:
        logger.warning("skipped %d empty and %d malformed input rows", stats.skipped_empty, stats.skipped_malformed)
    return items, stats


def _open_out(args):
    if args.output and args.output != "-":
        return open(args.output, "w", encoding="utf-8", newline="\n")
    return sys.stdout


def _normalize_record(record: ExtractedRecord, db: OrgDB) -> list[NormalizationResult | None]:
    keep = {id(m) for m in described_mentions(record)}
    out = []
    for m in record.organizations:
        out.append(normalize_mention(m, db) if id(m) in keep else None)
    return out


# -- subcommands ----------------------------------------------------------------


def cmd_extract(args) -> int:
    gaz = _gazetteers(args)
    items, _ = _read_items(args)
    records = extract_stream(items, gaz, args.gazetteers, args.workers)
    out = _open_out(args)
    try:
        n = write_records((record_to_dict(r) for r in records), out, args.format)
    finally:
        if out is not sys.stdout:
            out.close()
    logger.info("extracted %d records", n)
    return EXIT_OK


def cmd_train(args) -> int:
    if not args.thesaurus:
        raise UsageError("--thesaurus is required")
    gaz = _gazetteers(args)
    items, _ = _read_items(args)
    path = Path(args.thesaurus)
    db = load_orgdb(path, gaz) if args.append and path.exists() else OrgDB(stopwords=gaz.stopwords)
    db = train(extract_stream(items, gaz, args.gazetteers, args.workers), db)
    save_orgdb(db, path)
    logger.info("OrgDB %s: %d clusters from %d records", path, len(db), db.corpus_size)
    return EXIT_OK


def cmd_normalize(args) -> int:
    if not args.thesaurus:
        raise UsageError("--thesaurus is required")
    gaz = _gazetteers(args)
    db = load_orgdb(args.thesaurus, gaz)
    items, _ = _read_items(args)
    out = _open_out(args)
    try:
        dicts = (record_to_dict(r, _normalize_record(r, db)) for r in extract_stream(items, gaz, args.gazetteers, args.workers))
        write_records(dicts, out, args.format)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_curate(args) -> int:
    if not args.thesaurus:
        raise UsageError("--thesaurus is required")
    gaz = _gazetteers(args)
    db = load_orgdb(args.thesaurus, gaz)
    action = args.action.replace("-", "_")
    params = {"merge": 2, "rename": 2, "respell": 2}.get(action, 0)
    if len(args.params) != params:
        raise UsageError(f"curate {args.action} takes {params} argument(s), got {len(args.params)}")
    curate(db, action, *args.params, gaz=gaz, allow_cross_country=args.allow_cross_country)
    save_orgdb(db, args.output or args.thesaurus)
    return EXIT_OK


def cmd_eval(args) -> int:
    if not args.gold:
        raise UsageError("--gold is required")
    gold = read_gold(args.gold)
    if args.predictions:
        with open(args.predictions, encoding="utf-8") as fh:
            records = [record_from_dict(json.loads(line)) for line in fh if line.strip()]
    else:
        gaz = _gazetteers(args)
        items, _ = _read_items(args)
        records = list(extract_stream(items, gaz, args.gazetteers, args.workers))
    report = eval_metrics(gold, records)
    print(report.table())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            for row in report.rows():
                fh.write(json.dumps(row) + "\n")
    return EXIT_OK


def cmd_fetch(args) -> int:
    if not args.allow_network:
        raise UsageError("fetch needs --allow-network")
    if not args.query or not args.query.strip():
        raise UsageError("--query must be non-empty")
    if not args.email:
        raise UsageError("--email is required by NCBI usage policy")
    if not args.output:
        raise UsageError("--output is required")
    fetch_eutils(args.query, args.email, args.output, base=args.base_url, retmax=args.retmax)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = _Parser(add_help=False)
    shared.add_argument("--gazetteers", metavar="DIR", help=f"gazetteer directory (default: {default_gazetteer_dir()})")
    shared.add_argument("--thesaurus", metavar="FILE", help="OrgDB file")
    shared.add_argument("--input", metavar="FILE", help="input corpus")
    shared.add_argument("--input-format", choices=("tsv", "pubmed-xml"), default="tsv")
    shared.add_argument("--output", metavar="FILE", help="output file (default: stdout)")
    shared.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl", help="output format")
    shared.add_argument("--workers", type=int, default=1, help="extraction processes")
    shared.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="affilnorm", description="Extract and normalize organizations in affiliation strings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("extract", parents=[shared], help="extract entities from affiliation strings").set_defaults(func=cmd_extract)
    p = sub.add_parser("train", parents=[shared], help="build an OrgDB thesaurus")
    p.add_argument("--append", action="store_true", help="extend an existing thesaurus")
    p.set_defaults(func=cmd_train)
    sub.add_parser("normalize", parents=[shared], help="extract and normalize against a thesaurus").set_defaults(
        func=cmd_normalize
    )
    p = sub.add_parser("curate", parents=[shared], help="clean an OrgDB thesaurus")
    p.add_argument("action", choices=("drop-descriptors", "merge", "rename", "respell", "recalc"))
    p.add_argument("params", nargs="*", help="cluster ids / new name")
    p.add_argument("--allow-cross-country", action="store_true", help="permit merging clusters of different countries")
    p.set_defaults(func=cmd_curate)
    p = sub.add_parser("eval", parents=[shared], help="score extraction against gold annotations")
    p.add_argument("--gold", metavar="FILE", help="gold TSV: pmid, class, values")
    p.add_argument("--predictions", metavar="FILE", help="JSONL from `extract` instead of running it")
    p.set_defaults(func=cmd_eval)
    p = sub.add_parser("fetch", parents=[shared], help="download PubMed records through eutils")
    p.add_argument("--query", help="PubMed search term")
    p.add_argument("--email", help="contact address sent to NCBI")
    p.add_argument("--retmax", type=int, default=100)
    p.add_argument("--base-url", default=EUTILS_BASE)
    p.add_argument("--allow-network", action="store_true", help="permit network access")
    p.set_defaults(func=cmd_fetch)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"affilnorm {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputFormatError, OrgDBFormatError, GazetteerLoadError, CurationError, ValueError, KeyError) as exc:
        print(f"affilnorm {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, FetchError) as exc:
        print(f"affilnorm {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
