"""Organization thesaurus: clustering, cluster graph and name normalization.

Training adds each described organization mention to the cluster of the same
GPE whose centroid is within TSS distance 4, or starts a new cluster.  At
query time the matched cluster is expanded into its connected component over
the cluster graph (edges: compatible city/state and ESS > 0.90 between
centroids); the centroid of the component cluster with the most publications
is the normalized name.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field

import numpy as np

from .alignment import ESS_THRESHOLD, TSS_THRESHOLD, WordSequence, ess, tss_distance, word_sequence
from .gazetteers import GazetteerSet, default_gazetteers
from .records import GPE, ExtractedRecord, MentionKind, OrgMention
from .textutil import collapse_ws, strip_artifacts, strip_diacritics, tokens
from .translation import KeywordTranslator, TranslationProvider, translate_phrase

logger = logging.getLogger(__name__)

TRANSIENT_ID = "TRANSIENT"
GPEKey = tuple[str | None, str | None, str | None]


class CurationError(ValueError):
    """Invalid curation request (unknown cluster, refused merge, ...)."""


# -- mentions ---------------------------------------------------------------


def canonicalize_org_name(
    raw: str,
    gpe: GPE | None = None,
    provider: TranslationProvider | None = None,
    gaz: GazetteerSet | None = None,
) -> str:
    """Artifact-stripped, English, diacritic-free, upper-case form of a name."""
    if not raw or not raw.strip():
        raise ValueError("organization name must be non-empty")
    if provider is None:
        provider = KeywordTranslator(gaz or default_gazetteers())
    text = strip_artifacts(raw)
    text = translate_phrase(text, provider, gpe.country if gpe else None)
    return collapse_ws(strip_diacritics(text).upper())


def display_form(raw: str) -> str:
    return collapse_ws(strip_artifacts(raw))


def classify_mention(canonical_text: str, gaz: GazetteerSet) -> MentionKind:
    """Described when a token is a person name, place name or direction."""
    if not canonical_text or not canonical_text.strip():
        raise ValueError("canonical_text must be non-empty")
    toks = tokens(canonical_text)
    for tok in toks:
        if gaz.is_stopword(tok):
            continue
        if gaz.is_person_name(tok):
            return MentionKind.DESCRIBED
        # single letters ("E" wing, "S" building) are too noisy as directions
        if len(tok) > 2 and tok in gaz.directions:
            return MentionKind.DESCRIBED
    for i in range(len(toks)):
        for n in range(1, min(4, len(toks) - i) + 1):
            gram = toks[i : i + n]
            if n == 1 and gaz.is_stopword(gram[0]):
                continue
            if gaz.is_place_name(" ".join(gram)):
                return MentionKind.DESCRIBED
    return MentionKind.DESCRIPTOR


def make_mention(
    raw: str,
    gpe: GPE | None = None,
    pmid: str | None = None,
    gaz: GazetteerSet | None = None,
    provider: TranslationProvider | None = None,
) -> OrgMention:
    gaz = gaz or default_gazetteers()
    gpe = gpe or GPE()
    canonical = canonicalize_org_name(raw, gpe, provider, gaz)
    words = word_sequence(canonical, gaz.stopwords) or word_sequence(canonical)
    if not words:
        raise ValueError(f"organization name {raw!r} has no words")
    return OrgMention(
        raw=raw,
        canonical_text=canonical,
        words=words,
        kind=classify_mention(canonical, gaz),
        gpe=gpe,
        pmid=pmid,
    )


# -- clusters ---------------------------------------------------------------


@dataclass
class Member:
    name: str
    count: int
    display: str
    words: WordSequence = field(default=(), compare=False, repr=False)


@dataclass(eq=False)
class Cluster:
    id: str
    members: list[Member]
    pmids: set[str] = field(default_factory=set)
    gpe: GPE = field(default_factory=GPE)
    centroid: int = 0
    distances: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64), repr=False)

    @property
    def centroid_name(self) -> str:
        return self.members[self.centroid].name

    @property
    def display_name(self) -> str:
        return self.members[self.centroid].display

    @property
    def centroid_words(self) -> WordSequence:
        return self.members[self.centroid].words

    @property
    def mention_count(self) -> int:
        return sum(m.count for m in self.members)

    @property
    def publication_count(self) -> int:
        return len(self.pmids)

    def member_index(self, name: str) -> int | None:
        for i, m in enumerate(self.members):
            if m.name == name:
                return i
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cluster):
            return NotImplemented
        return (
            self.id == other.id
            and self.members == other.members
            and self.pmids == other.pmids
            and self.gpe == other.gpe
            and self.centroid == other.centroid
        )


def distance_matrix(words: list[WordSequence]) -> np.ndarray:
    n = len(words)
    d = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = tss_distance(words[i], words[j])
    return d


def _grow_matrix(d: np.ndarray, words: list[WordSequence]) -> np.ndarray:
    """Append a row/column for the last word sequence."""
    n = len(words)
    out = np.zeros((n, n), dtype=np.int64)
    out[: n - 1, : n - 1] = d
    for j in range(n - 1):
        out[n - 1, j] = out[j, n - 1] = tss_distance(words[-1], words[j])
    return out


def recompute_centroid(cluster: Cluster) -> int:
    """Member with the least count-weighted sum of TSS distances.

    Ties go to the most frequent member, then the lexicographically smallest name.
    """
    if not cluster.members:
        raise ValueError(f"cluster {cluster.id} is empty")
    counts = np.array([m.count for m in cluster.members], dtype=np.int64)
    sums = cluster.distances @ counts
    members = cluster.members
    best = min(range(len(members)), key=lambda i: (int(sums[i]), -members[i].count, members[i].name))
    cluster.centroid = best
    return best


# -- database ---------------------------------------------------------------


@dataclass(eq=False)
class OrgDB:
    clusters: dict[str, Cluster] = field(default_factory=dict)
    gpe_index: dict[GPEKey, list[str]] = field(default_factory=dict)
    pmid_index: dict[str, set[str]] = field(default_factory=dict)
    stopwords: frozenset[str] = field(default_factory=lambda: default_gazetteers().stopwords, repr=False)
    corpus_size: int = 0
    created: str | None = None
    next_id: int = 1
    _graph: dict[str, set[str]] | None = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrgDB):
            return NotImplemented
        return self.clusters == other.clusters and self.corpus_size == other.corpus_size

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self) -> Iterator[Cluster]:
        return iter(self.clusters[k] for k in sorted(self.clusters))

    def __getitem__(self, cluster_id: str) -> Cluster:
        try:
            return self.clusters[cluster_id]
        except KeyError:
            raise KeyError(f"unknown cluster id {cluster_id!r}") from None

    def new_id(self) -> str:
        cid = f"C{self.next_id:06d}"
        self.next_id += 1
        return cid

    def words(self, name: str) -> WordSequence:
        return word_sequence(name, self.stopwords) or word_sequence(name)

    def add_cluster(self, cluster: Cluster) -> None:
        if cluster.id in self.clusters:
            raise ValueError(f"duplicate cluster id {cluster.id}")
        for m in cluster.members:
            if not m.words:
                m.words = self.words(m.name)
        if cluster.distances.shape != (len(cluster.members),) * 2:
            cluster.distances = distance_matrix([m.words for m in cluster.members])
        self.clusters[cluster.id] = cluster
        self.gpe_index.setdefault(cluster.gpe.key(), []).append(cluster.id)
        for p in cluster.pmids:
            self.pmid_index.setdefault(p, set()).add(cluster.id)
        if cluster.id.startswith("C") and cluster.id[1:].isdigit():
            self.next_id = max(self.next_id, int(cluster.id[1:]) + 1)
        self.invalidate()

    def remove_cluster(self, cluster_id: str) -> Cluster:
        cluster = self[cluster_id]
        del self.clusters[cluster_id]
        ids = self.gpe_index.get(cluster.gpe.key(), [])
        if cluster_id in ids:
            ids.remove(cluster_id)
        if not ids:
            self.gpe_index.pop(cluster.gpe.key(), None)
        for p in cluster.pmids:
            holders = self.pmid_index.get(p)
            if holders is not None:
                holders.discard(cluster_id)
                if not holders:
                    del self.pmid_index[p]
        self.invalidate()
        return cluster

    def invalidate(self) -> None:
        self._graph = None

    @property
    def graph(self) -> dict[str, set[str]]:
        with self._lock:
            if self._graph is None:
                self._graph = build_org_graph(self)
            return self._graph

    def co_mentions(self) -> set[tuple[str, str]]:
        """Pairs of cluster ids that share an article."""
        pairs = set()
        for holders in self.pmid_index.values():
            ids = sorted(holders)
            for i, a in enumerate(ids):
                for b in ids[i + 1 :]:
                    pairs.add((a, b))
        return pairs


def candidate_clusters(db: OrgDB, gpe: GPE, *, exact_only: bool = False) -> list[str]:
    """Clusters of the same GPE.

    Clusters with exactly the mention's GPE are preferred.  Failing those, a
    subtype the mention lacks matches anything, so a mention with only a
    country sees every cluster of that country.
    """
    exact = db.gpe_index.get(gpe.key())
    if exact:
        return sorted(exact)
    if exact_only:
        return []
    return sorted(cid for key, ids in db.gpe_index.items() if gpe.matches(GPE(*key)) for cid in ids)


def _closest(db: OrgDB, words: WordSequence, ids: Iterable[str]) -> tuple[str | None, int | None]:
    best, best_key = None, None
    for cid in ids:
        c = db.clusters[cid]
        d = tss_distance(words, c.centroid_words)
        key = (d, -c.publication_count, cid)
        if best_key is None or key < best_key:
            best, best_key = cid, key
    return best, (best_key[0] if best_key else None)


def add_mention(db: OrgDB, mention: OrgMention, display: str | None = None) -> str:
    """Cluster one mention into ``db``; returns the cluster id."""
    display = display or display_form(mention.raw)
    cid, dist = _closest(db, mention.words, candidate_clusters(db, mention.gpe, exact_only=True))
    if cid is None or dist > TSS_THRESHOLD:
        cid = db.new_id()
        db.add_cluster(
            Cluster(
                id=cid,
                members=[Member(mention.canonical_text, 1, display, mention.words)],
                pmids={mention.pmid} if mention.pmid else set(),
                gpe=mention.gpe,
            )
        )
        return cid
    cluster = db.clusters[cid]
    i = cluster.member_index(mention.canonical_text)
    if i is None:
        cluster.members.append(Member(mention.canonical_text, 1, display, mention.words))
        cluster.distances = _grow_matrix(cluster.distances, [m.words for m in cluster.members])
    else:
        cluster.members[i].count += 1
    old_key = cluster.gpe.key()
    cluster.gpe = cluster.gpe.union(mention.gpe)
    if cluster.gpe.key() != old_key:
        db.gpe_index[old_key].remove(cid)
        if not db.gpe_index[old_key]:
            del db.gpe_index[old_key]
        db.gpe_index.setdefault(cluster.gpe.key(), []).append(cid)
    if mention.pmid:
        cluster.pmids.add(mention.pmid)
        db.pmid_index.setdefault(mention.pmid, set()).add(cid)
    recompute_centroid(cluster)
    db.invalidate()
    return cid


def described_mentions(record: ExtractedRecord) -> list[OrgMention]:
    """Described mentions of a record; the longest descriptor stands in when there are none."""
    described = [m for m in record.organizations if m.described]
    if described or not record.organizations:
        return described
    return [max(record.organizations, key=lambda m: len(m.canonical_text))]


def train(records: Iterable[ExtractedRecord], db: OrgDB | None = None) -> OrgDB:
    """Incremental clustering; deterministic for a fixed input order."""
    db = db if db is not None else OrgDB()
    for record in records:
        db.corpus_size += 1
        for mention in described_mentions(record):
            add_mention(db, mention)
    return db


# -- graph and components -----------------------------------------------------


def gpe_compatible(a: GPE, b: GPE) -> bool:
    """Not from different cities or different states."""
    for x, y in ((a.city, b.city), (a.state, b.state)):
        if x is not None and y is not None and x != y:
            return False
    return True


def linked(a: Cluster, b: Cluster) -> bool:
    return gpe_compatible(a.gpe, b.gpe) and ess(a.centroid_name, b.centroid_name) > ESS_THRESHOLD


def build_org_graph(db: OrgDB) -> dict[str, set[str]]:
    ids = sorted(db.clusters)
    graph: dict[str, set[str]] = {cid: set() for cid in ids}
    for i, a in enumerate(ids):
        ca = db.clusters[a]
        for b in ids[i + 1 :]:
            if linked(ca, db.clusters[b]):
                graph[a].add(b)
                graph[b].add(a)
    return graph


@dataclass
class Component:
    root: str
    depth: dict[str, int]
    witnesses: dict[str, str]

    @property
    def members(self) -> frozenset[str]:
        return frozenset(self.depth)


def expand_component(
    root: str,
    db: OrgDB,
    graph: dict[str, set[str]] | None = None,
    *,
    extra: Cluster | None = None,
    extra_neighbors: set[str] | None = None,
) -> Component:
    """Breadth-first expansion to depth 2, then co-mention-gated growth.

    Beyond depth 2 a neighbor joins only when it shares an article with a
    cluster already in the component; the shared PMID is kept as witness.
    ``extra`` is an unsaved cluster overlaid on the graph.
    """
    graph = db.graph if graph is None else graph
    extra_neighbors = extra_neighbors or set()

    def adj(v: str) -> set[str]:
        if extra is not None and v == extra.id:
            return extra_neighbors
        out = graph.get(v, set())
        if extra is not None and v in extra_neighbors:
            out = out | {extra.id}
        return out

    def pmids(v: str) -> set[str]:
        return extra.pmids if extra is not None and v == extra.id else db.clusters[v].pmids

    if root not in db.clusters and not (extra is not None and root == extra.id):
        raise KeyError(f"unknown cluster id {root!r}")

    depth = {root: 0}
    frontier = [root]
    for d in (1, 2):
        nxt = []
        for v in frontier:
            for u in sorted(adj(v)):
                if u not in depth:
                    depth[u] = d
                    nxt.append(u)
        frontier = nxt

    witnesses: dict[str, str] = {}
    seen_pmids: set[str] = set()
    for v in depth:
        seen_pmids |= pmids(v)
    grew = True
    while grew:
        grew = False
        for u in sorted({u for v in depth for u in adj(v)} - depth.keys()):
            shared = pmids(u) & seen_pmids
            if shared:
                depth[u] = 1 + min(depth[v] for v in adj(u) if v in depth)
                witnesses[u] = min(shared)
                seen_pmids |= pmids(u)
                grew = True
    return Component(root, depth, witnesses)


def connected_component(root: str, db: OrgDB, graph: dict[str, set[str]] | None = None) -> set[str]:
    return set(expand_component(root, db, graph).members)


# -- normalization -----------------------------------------------------------


@dataclass
class NormalizationResult:
    input: OrgMention
    matched_cluster: str
    component: frozenset[str]
    canonical_name: str
    publication_count: int
    display_name: str = ""
    canonical_cluster: str = ""
    member_count: int = 0
    transient: bool = False
    witnesses: dict[str, str] = field(default_factory=dict)


def choose_canonical(ids: Iterable[str], lookup: Callable[[str], Cluster]) -> Cluster:
    """Most publications, then most mentions, then the component medoid, then name."""
    clusters = [lookup(cid) for cid in sorted(ids)]
    top = max((c.publication_count, c.mention_count) for c in clusters)
    tied = [c for c in clusters if (c.publication_count, c.mention_count) == top]
    if len(tied) == 1:
        return tied[0]

    def spread(c: Cluster) -> int:
        return sum(tss_distance(c.centroid_words, o.centroid_words) for o in clusters if o is not c)

    return min(tied, key=lambda c: (spread(c), c.centroid_name))


def normalize_mention(mention: OrgMention, db: OrgDB, graph: dict[str, set[str]] | None = None) -> NormalizationResult:
    """Match the mention to a cluster and name it after its component.

    Does not modify ``db``; an unmatched mention gets a temporary singleton
    cluster linked into the graph for this call only.
    """
    graph = db.graph if graph is None else graph
    cid, dist = _closest(db, mention.words, candidate_clusters(db, mention.gpe))
    extra = None
    extra_neighbors: set[str] = set()
    if cid is None or dist > TSS_THRESHOLD:
        extra = Cluster(
            id=TRANSIENT_ID,
            members=[Member(mention.canonical_text, 1, display_form(mention.raw), mention.words)],
            pmids={mention.pmid} if mention.pmid else set(),
            gpe=mention.gpe,
            distances=np.zeros((1, 1), dtype=np.int64),
        )
        extra_neighbors = {k for k, c in db.clusters.items() if linked(extra, c)}
        cid = TRANSIENT_ID
    comp = expand_component(cid, db, graph, extra=extra, extra_neighbors=extra_neighbors)

    def lookup(k: str) -> Cluster:
        return extra if extra is not None and k == extra.id else db.clusters[k]

    best = choose_canonical(comp.members, lookup)
    return NormalizationResult(
        input=mention,
        matched_cluster=cid,
        component=comp.members,
        canonical_name=best.centroid_name,
        publication_count=best.publication_count,
        display_name=best.display_name,
        canonical_cluster=best.id,
        member_count=best.mention_count,
        transient=extra is not None,
        witnesses=comp.witnesses,
    )


def associate_article(pmid: str | None, results: list[NormalizationResult]) -> NormalizationResult:
    """The organization of an article: the result with the most publications."""
    if not results:
        raise ValueError(f"no normalization results for article {pmid}")
    return min(results, key=lambda r: (-r.publication_count, -r.member_count, r.canonical_name))


# -- curation ---------------------------------------------------------------


def drop_descriptors(db: OrgDB, gaz: GazetteerSet | None = None) -> list[str]:
    gaz = gaz or default_gazetteers()
    dropped = [c.id for c in db if classify_mention(c.centroid_name, gaz) is MentionKind.DESCRIPTOR]
    for cid in dropped:
        db.remove_cluster(cid)
    return dropped


def merge_clusters(db: OrgDB, a: str, b: str, *, allow_cross_country: bool = False) -> Cluster:
    """Fold cluster ``b`` into ``a``."""
    if a == b:
        raise CurationError("cannot merge a cluster with itself")
    ca, cb = _get(db, a), _get(db, b)
    if ca.gpe.country and cb.gpe.country and ca.gpe.country != cb.gpe.country and not allow_cross_country:
        raise CurationError(f"{a} ({ca.gpe.country}) and {b} ({cb.gpe.country}) are in different countries")
    db.remove_cluster(a)
    db.remove_cluster(b)
    for m in cb.members:
        i = ca.member_index(m.name)
        if i is None:
            ca.members.append(Member(m.name, m.count, m.display, m.words))
        else:
            ca.members[i].count += m.count
    ca.pmids |= cb.pmids
    ca.gpe = ca.gpe.union(cb.gpe)
    ca.distances = distance_matrix([m.words for m in ca.members])
    recompute_centroid(ca)
    db.add_cluster(ca)
    return ca


def rename_centroid(db: OrgDB, cluster_id: str, text: str) -> Cluster:
    """Replace the centroid's name; an existing member of that name absorbs it."""
    if not text or not text.strip():
        raise CurationError("new name must be non-empty")
    cluster = _get(db, cluster_id)
    name = collapse_ws(strip_diacritics(text).upper())
    display = collapse_ws(text)
    old = cluster.members[cluster.centroid]
    other = cluster.member_index(name)
    if other is not None and other != cluster.centroid:
        cluster.members[other].count += old.count
        cluster.members[other].display = display
        del cluster.members[cluster.centroid]
    else:
        cluster.members[cluster.centroid] = Member(name, old.count, display, db.words(name))
    cluster.distances = distance_matrix([m.words for m in cluster.members])
    recompute_centroid(cluster)
    if cluster.centroid_name != name:
        logger.warning("cluster %s: %r is not the medoid; centroid stays %r", cluster_id, name, cluster.centroid_name)
    db.invalidate()
    return cluster


def respell_centroid(db: OrgDB, cluster_id: str, text: str) -> Cluster:
    """Correct a misspelled centroid; same edit as a rename."""
    return rename_centroid(db, cluster_id, text)


def recalc(db: OrgDB) -> dict[str, set[str]]:
    db.invalidate()
    return db.graph


def curate(db: OrgDB, action: str, *args, gaz: GazetteerSet | None = None, allow_cross_country: bool = False) -> OrgDB:
    """Apply one cleaning action: drop_descriptors, merge, rename, respell or recalc."""
    action = action.replace("-", "_")
    if action == "drop_descriptors":
        drop_descriptors(db, gaz)
    elif action == "merge":
        merge_clusters(db, *args, allow_cross_country=allow_cross_country)
    elif action == "rename":
        rename_centroid(db, *args)
    elif action == "respell":
        respell_centroid(db, *args)
    elif action == "recalc":
        recalc(db)
    else:
        raise CurationError(f"unknown curation action {action!r}")
    return db


def _get(db: OrgDB, cluster_id: str) -> Cluster:
    try:
        return db[cluster_id]
    except KeyError as exc:
        raise CurationError(str(exc.args[0])) from None


__all__ = [
    "CurationError",
    "Member",
    "Cluster",
    "OrgDB",
    "Component",
    "NormalizationResult",
    "canonicalize_org_name",
    "classify_mention",
    "make_mention",
    "display_form",
    "distance_matrix",
    "recompute_centroid",
    "candidate_clusters",
    "add_mention",
    "described_mentions",
    "train",
    "gpe_compatible",
    "build_org_graph",
    "expand_component",
    "connected_component",
    "choose_canonical",
    "normalize_mention",
    "associate_article",
    "drop_descriptors",
    "merge_clusters",
    "rename_centroid",
    "respell_centroid",
    "recalc",
    "curate",
]
