"""Extraction and normalization of organization names in affiliation strings."""

from .alignment import ess, nw_score, sw_score, tss_distance, word_similarity
from .extraction import extract
from .gazetteers import GazetteerSet, default_gazetteers, load_gazetteers
from .normalization import (
    Cluster,
    NormalizationResult,
    OrgDB,
    associate_article,
    build_org_graph,
    connected_component,
    curate,
    make_mention,
    normalize_mention,
    train,
)
from .records import GPE, ExtractedRecord, OrgMention
from .store import load_orgdb, save_orgdb

__version__ = "0.1.0"

__all__ = [
    "GPE",
    "Cluster",
    "ExtractedRecord",
    "GazetteerSet",
    "NormalizationResult",
    "OrgDB",
    "OrgMention",
    "associate_article",
    "build_org_graph",
    "connected_component",
    "curate",
    "default_gazetteers",
    "ess",
    "extract",
    "load_gazetteers",
    "load_orgdb",
    "make_mention",
    "normalize_mention",
    "nw_score",
    "save_orgdb",
    "sw_score",
    "train",
    "tss_distance",
    "word_similarity",
]
