"""OrgDB persistence as UTF-8 JSON lines.

Line 1 is a header, every further line one cluster, sorted by id.  Distance
matrices, the GPE index and the graph are derived data and rebuilt on load.
The grammar is documented in docs/orgdb-format.md.
"""

from __future__ import annotations

import json
import logging
import os
from datetime import datetime, timezone
from pathlib import Path

from .gazetteers import GazetteerSet, default_gazetteers
from .normalization import Cluster, Member, OrgDB, distance_matrix, recompute_centroid
from .records import GPE

logger = logging.getLogger(__name__)

FORMAT = "orgdb"
VERSION = 1
CLUSTER_FIELDS = ("id", "centroid", "members", "pmids", "city", "state", "country")


class OrgDBFormatError(ValueError):
    def __init__(self, path: str | Path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = Path(path)
        self.lineno = lineno


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def cluster_record(cluster: Cluster) -> dict:
    return {
        "id": cluster.id,
        "centroid": cluster.centroid_name,
        "members": [[m.name, m.count, m.display] for m in cluster.members],
        "pmids": sorted(cluster.pmids),
        "city": cluster.gpe.city,
        "state": cluster.gpe.state,
        "country": cluster.gpe.country,
    }


def dump_orgdb(db: OrgDB) -> str:
    if db.created is None:
        db.created = _timestamp()
    header = {"format": FORMAT, "version": VERSION, "created": db.created, "corpus_size": db.corpus_size}
    lines = [_dumps(header)]
    lines.extend(_dumps(cluster_record(c)) for c in db)
    return "\n".join(lines) + "\n"


def save_orgdb(db: OrgDB, path: str | Path) -> None:
    path = Path(path)
    text = dump_orgdb(db)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write OrgDB to {path}: {exc.strerror}") from exc


def _parse_cluster(obj: object, path: Path, lineno: int) -> tuple[Cluster, str]:
    if not isinstance(obj, dict):
        raise OrgDBFormatError(path, lineno, "cluster record must be an object")
    missing = [k for k in CLUSTER_FIELDS if k not in obj]
    if missing:
        raise OrgDBFormatError(path, lineno, f"missing fields {missing}")
    members = obj["members"]
    if not isinstance(members, list) or not members:
        raise OrgDBFormatError(path, lineno, "members must be a non-empty list")
    parsed = []
    for m in members:
        if (
            not isinstance(m, list)
            or len(m) != 3
            or not isinstance(m[0], str)
            or not isinstance(m[1], int)
            or not isinstance(m[2], str)
            or m[1] < 1
        ):
            raise OrgDBFormatError(path, lineno, f"bad member {m!r}; expected [name, count>=1, display]")
        parsed.append(Member(m[0], m[1], m[2]))
    if not isinstance(obj["pmids"], list) or not all(isinstance(p, str) for p in obj["pmids"]):
        raise OrgDBFormatError(path, lineno, "pmids must be a list of strings")
    for k in ("city", "state", "country"):
        if obj[k] is not None and not isinstance(obj[k], str):
            raise OrgDBFormatError(path, lineno, f"{k} must be a string or null")
    if not isinstance(obj["id"], str) or not isinstance(obj["centroid"], str):
        raise OrgDBFormatError(path, lineno, "id and centroid must be strings")
    cluster = Cluster(
        id=obj["id"],
        members=parsed,
        pmids=set(obj["pmids"]),
        gpe=GPE(country=obj["country"], state=obj["state"], city=obj["city"]),
    )
    return cluster, obj["centroid"]


def load_orgdb(path: str | Path, gaz: GazetteerSet | None = None) -> OrgDB:
    """Read an OrgDB file; a stale centroid is recomputed with a warning."""
    path = Path(path)
    stopwords = (gaz or default_gazetteers()).stopwords
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read OrgDB {path}: {exc.strerror}") from exc
    lines = text.splitlines()
    if not lines:
        raise OrgDBFormatError(path, 1, "empty file; expected a header line")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise OrgDBFormatError(path, 1, f"malformed header: {exc.msg}") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT:
        raise OrgDBFormatError(path, 1, "not an OrgDB file")
    if header.get("version") != VERSION:
        raise OrgDBFormatError(path, 1, f"unsupported OrgDB version {header.get('version')!r}; expected {VERSION}")

    db = OrgDB(stopwords=stopwords, corpus_size=int(header.get("corpus_size", 0)), created=header.get("created"))
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise OrgDBFormatError(path, lineno, f"malformed record: {exc.msg}") from None
        cluster, centroid = _parse_cluster(obj, path, lineno)
        if cluster.id in db.clusters:
            raise OrgDBFormatError(path, lineno, f"duplicate cluster id {cluster.id}")
        names = [m.name for m in cluster.members]
        if len(set(names)) != len(names):
            raise OrgDBFormatError(path, lineno, "duplicate member names")
        for m in cluster.members:
            m.words = db.words(m.name)
        cluster.distances = distance_matrix([m.words for m in cluster.members])
        stored = names.index(centroid) if centroid in names else None
        best = recompute_centroid(cluster)
        if stored is None or stored != best:
            logger.warning(
                "%s:%d: cluster %s centroid %r is stale; recomputed as %r",
                path, lineno, cluster.id, centroid, cluster.centroid_name,
            )
        db.add_cluster(cluster)
    return db


__all__ = ["OrgDBFormatError", "dump_orgdb", "save_orgdb", "load_orgdb", "cluster_record"]
