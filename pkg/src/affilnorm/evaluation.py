"""Precision, recall and F-score of extracted entities against gold annotations."""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .records import ExtractedRecord
from .textutil import fold

logger = logging.getLogger(__name__)

CLASSES = ("org", "city", "state", "country")


@dataclass(frozen=True)
class GoldAnnotation:
    pmid: str
    entity_class: str
    values: tuple[str, ...]

    def __post_init__(self):
        if self.entity_class not in CLASSES:
            raise ValueError(f"unknown entity class {self.entity_class!r}")
        if not self.values or not all(v.strip() for v in self.values):
            raise ValueError(f"gold values for {self.pmid}/{self.entity_class} must be non-empty")


@dataclass
class ClassScore:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return precision(self.tp, self.fp)

    @property
    def recall(self) -> float:
        return recall(self.tp, self.fn)

    @property
    def f_score(self) -> float:
        return f_score(self.precision, self.recall)


@dataclass
class EvalReport:
    scores: dict[str, ClassScore] = field(default_factory=lambda: {c: ClassScore() for c in CLASSES})
    excluded: list[str] = field(default_factory=list)

    def rows(self) -> list[dict]:
        return [
            {
                "class": c,
                "tp": s.tp,
                "fp": s.fp,
                "fn": s.fn,
                "precision": round(s.precision, 4),
                "recall": round(s.recall, 4),
                "f_score": round(s.f_score, 4),
            }
            for c, s in self.scores.items()
        ]

    def table(self) -> str:
        lines = [f"{'class':<8} {'TP':>5} {'FP':>5} {'FN':>5} {'P':>7} {'R':>7} {'F':>7}"]
        for r in self.rows():
            lines.append(
                f"{r['class']:<8} {r['tp']:>5} {r['fp']:>5} {r['fn']:>5} "
                f"{r['precision']:>7.3f} {r['recall']:>7.3f} {r['f_score']:>7.3f}"
            )
        return "\n".join(lines)


def precision(tp: int, fp: int) -> float:
    return tp / (tp + fp) if tp + fp else 0.0


def recall(tp: int, fn: int) -> float:
    return tp / (tp + fn) if tp + fn else 0.0


def f_score(p: float, r: float) -> float:
    """Harmonic mean; 0 when both are 0."""
    return 2 * p * r / (p + r) if p + r else 0.0


def predicted_values(record: ExtractedRecord) -> dict[str, set[str]]:
    orgs = {m.raw for m in record.organizations}
    return {
        "org": orgs,
        "city": {record.gpe.city} if record.gpe.city else set(),
        "state": {record.gpe.state} if record.gpe.state else set(),
        "country": {record.gpe.country} if record.gpe.country else set(),
    }


def eval_metrics(
    gold: Iterable[GoldAnnotation],
    predicted: Mapping[str, ExtractedRecord] | Iterable[ExtractedRecord],
) -> EvalReport:
    """Per-class counts; values are compared after case and diacritic folding."""
    if not isinstance(predicted, Mapping):
        predicted = {r.pmid: r for r in predicted}
    gold_by: dict[str, dict[str, set[str]]] = {}
    for g in gold:
        gold_by.setdefault(g.pmid, {c: set() for c in CLASSES})[g.entity_class].update(fold(v) for v in g.values)

    report = EvalReport()
    for pmid in sorted(predicted, key=str):
        if pmid not in gold_by:
            logger.warning("pmid %s has no gold annotation; excluded", pmid)
            report.excluded.append(pmid)
    for pmid, expected in gold_by.items():
        record = predicted.get(pmid)
        got = predicted_values(record) if record is not None else {c: set() for c in CLASSES}
        for c in CLASSES:
            found = {fold(v) for v in got[c]}
            s = report.scores[c]
            s.tp += len(found & expected[c])
            s.fp += len(found - expected[c])
            s.fn += len(expected[c] - found)
    return report


def read_gold(path: str | Path) -> list[GoldAnnotation]:
    """TSV rows: pmid, class, value[|value...]."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE), 1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected pmid, class, values")
            out.append(GoldAnnotation(row[0], row[1], tuple(v.strip() for v in row[2].split("|"))))
    return out
