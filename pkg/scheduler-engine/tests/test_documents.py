import json

import pytest

from services.core import SUM_WC, SUM_WU, Instance
from services.documents import (
    InstanceDocument,
    dump_document,
    load_corpus,
    load_instance,
    parse_document,
    write_document,
)
from services.errors import DocumentError
from tests.strategies import make_jobs


def _document(**overrides):
    data = {
        "id": "small",
        "criteria": {
            "agent1": {"kind": "TotalWeightedCompletion", "bound": 10},
            "agent2": {"kind": "WeightedTardyCount", "bound": 0},
        },
        "jobs1": [{"p": 2}, {"p": 1, "w": 3}],
        "jobs2": [{"p": 1, "d": 2}],
    }
    data.update(overrides)
    return json.dumps(data, indent=2)


class TestParse:
    def test_defaults(self):
        document = parse_document(_document())
        instance = document.to_instance()
        assert (instance.n, instance.k) == (2, 1)
        assert [job.id for job in instance.jobs1] == [0, 1]
        assert instance.jobs1[0].w == 1
        assert instance.jobs1[1].w == 3
        assert (instance.crit1, instance.crit2) == (SUM_WC, SUM_WU)
        assert (instance.a1, instance.a2) == (10, 0)

    def test_syntax_error_has_line_and_column(self):
        with pytest.raises(DocumentError) as info:
            parse_document('{\n  "id": "x",\n  oops\n}', source="bad.json")
        assert str(info.value).startswith("bad.json:3:3:")

    def test_missing_due_date_path(self):
        text = _document(jobs2=[{"p": 1}])
        with pytest.raises(DocumentError) as info:
            parse_document(text, source="doc.json")
        assert "jobs2[0].d" in str(info.value)

    @pytest.mark.parametrize("job", [{"p": 0}, {"p": 1, "w": -1}, {"p": "1"}, {"p": 1, "extra": 2}])
    def test_field_errors_point_at_job(self, job):
        with pytest.raises(DocumentError) as info:
            parse_document(_document(jobs1=[{"p": 1}, job]))
        assert "jobs1[1]" in str(info.value)

    def test_unknown_criterion(self):
        text = _document(criteria={
            "agent1": {"kind": "Makespan", "bound": 1},
            "agent2": {"kind": "WeightedTardyCount", "bound": 0},
        })
        with pytest.raises(DocumentError) as info:
            parse_document(text)
        assert "criteria.agent1.kind" in str(info.value)

    def test_duplicate_ids_rejected_on_conversion(self):
        document = parse_document(_document(jobs1=[{"p": 1, "id": 0}, {"p": 1, "id": 0}]))
        with pytest.raises(DocumentError):
            document.to_instance()


class TestSerialize:
    def test_round_trip_keeps_instance(self):
        instance = Instance(
            make_jobs(1, (2, 1, None), (1, 3, None)),
            make_jobs(2, (1, 1, 2)),
            SUM_WC, SUM_WU, 10, 0,
        )
        text = dump_document(InstanceDocument.from_instance(instance, doc_id="rt"))
        assert parse_document(text).to_instance() == instance

    def test_dump_is_deterministic(self):
        document = parse_document(_document())
        assert dump_document(document) == dump_document(parse_document(dump_document(document)))
        assert '"d": null' not in dump_document(document)

    def test_write_and_load(self, tmp_path):
        document = parse_document(_document())
        path = tmp_path / "nested" / "small.json"
        write_document(document, path)
        loaded, instance = load_instance(path)
        assert dump_document(loaded) == dump_document(document)
        assert instance.n == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(DocumentError):
            load_instance(tmp_path / "absent.json")


class TestCorpus:
    def test_sorted_by_file_name(self, tmp_path):
        (tmp_path / "b.json").write_text(_document(id=None), encoding="utf-8")
        (tmp_path / "a.json").write_text(_document(id="first"), encoding="utf-8")
        (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")
        corpus = load_corpus(tmp_path)
        assert [name for name, _ in corpus] == ["first", "b"]

    def test_not_a_directory(self, tmp_path):
        with pytest.raises(DocumentError):
            load_corpus(tmp_path / "missing")
