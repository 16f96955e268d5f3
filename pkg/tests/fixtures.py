"""Shared fixture builders: the Duke component and the Washington University synonyms."""

from __future__ import annotations

from affilnorm.gazetteers import default_gazetteers
from affilnorm.normalization import OrgDB, make_mention, train
from affilnorm.records import GPE, ExtractedRecord

DURHAM = GPE(country="USA", state="NC", city="Durham")
ST_LOUIS = GPE(country="USA", state="MO", city="St. Louis")

DUKE_NAMES = [
    "Duke University Medical Center and Duke Clinical Research Institute",
    "Duke Clinical Research Institute",
    "Duke University Medicalcenter",
    "Duke University Medical Center",
    "Duke University",
    "Department of Biostatistics and Bioinformatics and Duke Clinical Research Institute",
    "Duke University Medical Center Durham",
    "Duke University Medical Center Duke University",
    "Department of Psychiatry and Behavioral Sciences Duke University Medical Center Durham",
    "Box 3709 Duke University Medical Center",
    "Division of Gastroenterology Duke University Medical Center Durham",
    "Veterans Affairs and Duke University Medical Centers",
    "Duke University Eye Center",
    "Duke University Health System",
    "Duke University School of Nursing",
    "Duke University School of Medicine",
    "Duke University Hospital",
    "Duke University Pain Prevention Center",
    "Duke University and Durham Veterans Affairs Medical Center",
    "Preston Robert Tisch Brain Tumor Center at Duke University",
]
VA_NAMES = ["Durham Veterans Affairs Medical Center", "Veterans Affairs Medical Center"]

# (PMID, name); the starred variants are the misspellings of the original listing
TABLE3 = [
    ("20740553", "Washington University School of Medicine"),
    ("20653866", "Washington University School of Medicine and St. Louis Children's Hospital"),
    ("20720053", "School of Medicine"),
    ("20506172", "Washington University School of Medicine at Barnes-Jewish Hospital"),
    ("18762643", "Barnes-Jewish Hospital at Washington University School of Medicine"),
    ("20720053", "Washington University"),
    ("17182886", "Washington University School of Medicien"),
    ("12056922", "Washington University School of Medicine and Metropolitan St. Louis Psychiatric Center"),
    ("11195749", "Barnes Retina Institute and Washington University School of Meidcine"),
    ("10784594", "Division of Gastroenterology Washington University School of Medicine St. Louis"),
]


def record(name: str, gpe: GPE, pmid: str | None) -> ExtractedRecord:
    gaz = default_gazetteers()
    return ExtractedRecord(pmid=pmid, organizations=[make_mention(name, gpe, pmid, gaz)], gpe=gpe)


def duke_records() -> list[ExtractedRecord]:
    """One article per Duke name; the plain medical-center name is the most published.

    The Veterans Affairs clusters get articles of their own, so they never
    co-occur with a Duke cluster.
    """
    out = []
    serial = 100
    for i, name in enumerate(DUKE_NAMES, 1):
        copies = 5 if i == 4 else 1
        for _ in range(copies):
            serial += 1
            out.append(record(name, DURHAM, f"9{serial:06d}"))
    for j, name in enumerate(VA_NAMES):
        out.append(record(name, DURHAM, f"8{j:06d}"))
    return out


def duke_db() -> OrgDB:
    db = train(duke_records(), OrgDB(created="2020-01-01T00:00:00Z"))
    return db


def table3_records() -> list[ExtractedRecord]:
    by_pmid: dict[str, ExtractedRecord] = {}
    gaz = default_gazetteers()
    for pmid, name in TABLE3:
        rec = by_pmid.setdefault(pmid, ExtractedRecord(pmid=pmid, gpe=ST_LOUIS))
        rec.organizations.append(make_mention(name, ST_LOUIS, pmid, gaz))
    return list(by_pmid.values())


def table3_db() -> OrgDB:
    return train(table3_records(), OrgDB(created="2020-01-01T00:00:00Z"))


def cluster_of(db: OrgDB, name: str) -> str:
    """Id of the cluster holding ``name`` (given in any case)."""
    key = name.upper()
    for c in db:
        if any(m.name == key for m in c.members):
            return c.id
    raise KeyError(name)
