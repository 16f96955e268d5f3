import json
import logging

import pytest

from affilnorm.normalization import OrgDB, normalize_mention
from affilnorm.store import OrgDBFormatError, dump_orgdb, load_orgdb, save_orgdb
from fixtures import DUKE_NAMES, DURHAM, duke_db, table3_db, record
from affilnorm.normalization import make_mention, train


def fixture_dbs():
    return {"duke": duke_db(), "table3": table3_db(), "empty": OrgDB(created="2020-01-01T00:00:00Z")}


@pytest.mark.parametrize("name", ["duke", "table3", "empty"])
def test_round_trip(tmp_path, name):
    db = fixture_dbs()[name]
    path = tmp_path / "db.jsonl"
    save_orgdb(db, path)
    loaded = load_orgdb(path)
    assert loaded == db
    assert loaded.created == db.created and loaded.corpus_size == db.corpus_size
    assert loaded.gpe_index == {k: sorted(v) for k, v in db.gpe_index.items()}
    assert loaded.pmid_index == db.pmid_index
    for c in loaded:
        assert (c.distances == db[c.id].distances).all()
    # second save is byte-identical
    path2 = tmp_path / "again.jsonl"
    save_orgdb(loaded, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_bytes_stable_across_builds(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    save_orgdb(duke_db(), a)
    save_orgdb(duke_db(), b)
    assert a.read_bytes() == b.read_bytes()


def test_layout(tmp_path):
    db = duke_db()
    text = dump_orgdb(db)
    lines = text.splitlines()
    header = json.loads(lines[0])
    assert header == {"format": "orgdb", "version": 1, "created": "2020-01-01T00:00:00Z", "corpus_size": 26}
    assert len(lines) == 1 + len(db)
    first = json.loads(lines[1])
    assert list(first) == ["id", "centroid", "members", "pmids", "city", "state", "country"]
    assert [json.loads(l)["id"] for l in lines[1:]] == sorted(db.clusters)


def test_empty_db_is_header_only():
    assert len(dump_orgdb(OrgDB(created="x")).splitlines()) == 1


def test_one_cluster_one_line():
    db = train([record("Duke University", DURHAM, "1")], OrgDB(created="x"))
    assert len(dump_orgdb(db).splitlines()) == 2


def test_loaded_db_normalizes_the_same(tmp_path):
    db = duke_db()
    save_orgdb(db, tmp_path / "d")
    loaded = load_orgdb(tmp_path / "d")
    m = make_mention(DUKE_NAMES[0], DURHAM)
    assert normalize_mention(m, loaded).canonical_name == normalize_mention(m, db).canonical_name


def test_truncated_line(tmp_path):
    path = tmp_path / "db"
    save_orgdb(duke_db(), path)
    lines = path.read_text().splitlines()
    lines[3] = lines[3][: len(lines[3]) // 2]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(OrgDBFormatError) as err:
        load_orgdb(path)
    assert err.value.lineno == 4


def test_bad_version(tmp_path):
    path = tmp_path / "db"
    path.write_text('{"format":"orgdb","version":2,"created":"x","corpus_size":0}\n')
    with pytest.raises(OrgDBFormatError, match="version"):
        load_orgdb(path)


@pytest.mark.parametrize(
    "line",
    [
        '{"id":"C1"}',
        '{"id":"C1","centroid":"A","members":[],"pmids":[],"city":null,"state":null,"country":null}',
        '{"id":"C1","centroid":"A","members":[["A",0,"a"]],"pmids":[],"city":null,"state":null,"country":null}',
        '[1,2]',
    ],
)
def test_malformed_records(tmp_path, line):
    path = tmp_path / "db"
    path.write_text('{"format":"orgdb","version":1,"created":"x","corpus_size":0}\n' + line + "\n")
    with pytest.raises(OrgDBFormatError) as err:
        load_orgdb(path)
    assert err.value.lineno == 2


def test_not_an_orgdb(tmp_path):
    path = tmp_path / "db"
    path.write_text("")
    with pytest.raises(OrgDBFormatError):
        load_orgdb(path)
    path.write_text('{"format":"other"}\n')
    with pytest.raises(OrgDBFormatError):
        load_orgdb(path)


def test_stale_centroid_repaired(tmp_path, caplog):
    db = train(
        [record("Duke University Hospital", DURHAM, str(i)) for i in range(3)]
        + [record("The Duke University Hospital", DURHAM, "9")],
        OrgDB(created="x"),
    )
    path = tmp_path / "db"
    save_orgdb(db, path)
    lines = path.read_text().splitlines()
    rec = json.loads(lines[1])
    assert rec["centroid"] == "DUKE UNIVERSITY HOSPITAL"
    rec["centroid"] = "THE DUKE UNIVERSITY HOSPITAL"
    path.write_text(lines[0] + "\n" + json.dumps(rec) + "\n")
    with caplog.at_level(logging.WARNING):
        loaded = load_orgdb(path)
    assert "stale" in caplog.text
    (c,) = loaded
    assert c.centroid_name == "DUKE UNIVERSITY HOSPITAL"


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError, match="cannot write"):
        save_orgdb(OrgDB(created="x"), tmp_path / "missing" / "db")
    with pytest.raises(OSError, match="cannot read"):
        load_orgdb(tmp_path / "missing")
