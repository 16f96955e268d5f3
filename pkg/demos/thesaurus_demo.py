"""Train a small thesaurus, then normalize mentions against it."""

import sys
import tempfile
from pathlib import Path

from affilnorm.extraction import extract
from affilnorm.normalization import connected_component, make_mention, normalize_mention, train
from affilnorm.records import GPE
from affilnorm.store import load_orgdb, save_orgdb

CORPUS = [
    ("101", "Duke University Medical Center, Durham, NC 27710, USA"),
    ("102", "Duke University Medical Center, Durham, NC, USA"),
    ("103", "Duke University Medical Centre, Durham, NC, USA"),
    ("104", "Duke Univesity Medical Center, Durham, North Carolina, USA"),
    ("105", "Department of Surgery, Duke University Medical Center, Durham, NC, USA"),
    ("106", "Duke University, Durham, NC 27708, USA"),
    ("107", "Washington University School of Medicine, St. Louis, MO 63110, USA"),
    ("108", "Washington University School of Medicien, St. Louis, MO, USA"),
]


def main() -> None:
    db = train(extract(text, pmid=pmid) for pmid, text in CORPUS)
    print(f"{len(db)} clusters from {db.corpus_size} affiliations")
    for c in db:
        print(f"  {c.id} {c.display_name!r} members={len(c.members)} pubs={c.publication_count} {c.gpe}")

    durham = GPE("USA", "NC", "Durham")
    for name in ("Duke Univesity Medical Center", "Duke Medical Center", "Mayo Clinic"):
        r = normalize_mention(make_mention(name, durham), db)
        note = " (unseen, transient cluster)" if r.transient else ""
        print(f"\n{name!r} -> {r.display_name!r}{note}")
        print(f"  component: {sorted(r.component)}")

    root = next(iter(db)).id
    print(f"\ncomponent of {root}: {sorted(connected_component(root, db))}")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "orgdb.jsonl"
        save_orgdb(db, path)
        print(f"\nsaved {path.stat().st_size} bytes; reload equal: {load_orgdb(path) == db}")
        sys.stdout.write(path.read_text(encoding="utf-8").splitlines()[0] + "\n")


if __name__ == "__main__":
    main()
