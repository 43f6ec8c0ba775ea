import pytest

from tgec.annotate import (
    AnnotationConfigError,
    AnnotationJob,
    AnnotationRecord,
    annotate_batch,
    export_pairs,
)

from stub_server import PROMPT, build_job, run_stub


@pytest.fixture
def stub():
    with run_stub() as server:
        yield server


def make_job(stub, sentences, checkpoint, **kwargs):
    return build_job(stub, sentences, checkpoint, **kwargs)


@pytest.fixture(autouse=True)
def _credential(monkeypatch):
    monkeypatch.setenv("TGEC_TEST_KEY", "test-token")


def test_three_sentences_all_ok(stub, tmp_path):
    job = make_job(stub, ["bir", "iki", "üç"], tmp_path / "cp.tsv")
    records = annotate_batch(job)
    assert [r.status for r in records] == ["ok", "ok", "ok"]
    assert [r.corrected for r in records] == \
        ["düzeltildi bir", "düzeltildi iki", "düzeltildi üç"]
    assert [r.id for r in records] == ["0", "1", "2"]


def test_resume_after_kill_issues_only_missing_request(stub, tmp_path):
    checkpoint = tmp_path / "cp.tsv"
    # as if a previous run died after completing 2 of 3
    checkpoint.write_text("0\tok\tdüzeltildi bir\n1\tok\tdüzeltildi iki\n",
                          encoding="utf-8")
    job = make_job(stub, ["bir", "iki", "üç"], checkpoint)
    records = annotate_batch(job)
    assert stub.state.requests == ["üç"]
    assert [r.status for r in records] == ["ok", "ok", "ok"]
    # exactly-once across a second replay: no new requests at all
    records_again = annotate_batch(job)
    assert stub.state.requests == ["üç"]
    assert [r.corrected for r in records_again] == [r.corrected for r in records]


def test_retry_twice_then_success(stub, tmp_path):
    stub.state.fail_first["bir"] = 2
    job = make_job(stub, ["bir"], tmp_path / "cp.tsv", max_attempts=3)
    records = annotate_batch(job)
    assert records[0].status == "ok"
    assert records[0].attempts == 3
    assert stub.state.requests == ["bir", "bir", "bir"]


def test_transport_error_after_exhausted_retries(stub, tmp_path):
    stub.state.fail_first["bir"] = 99
    job = make_job(stub, ["bir", "iki"], tmp_path / "cp.tsv", max_attempts=2)
    records = annotate_batch(job)
    assert records[0].status == "transport_error"
    assert records[0].attempts == 2
    assert records[1].status == "ok"  # the run continues


def test_refused_sentence(stub, tmp_path):
    stub.state.refuse.add("kötü")
    job = make_job(stub, ["kötü", "iyi"], tmp_path / "cp.tsv")
    records = annotate_batch(job)
    assert records[0].status == "refused"
    assert records[0].corrected == ""
    assert records[1].status == "ok"


def test_in_flight_bound_respected(stub, tmp_path):
    stub.state.delay = 0.05
    job = make_job(stub, [f"cümle {i}" for i in range(12)], tmp_path / "cp.tsv",
                   concurrency=3)
    annotate_batch(job)
    assert stub.state.max_in_flight <= 3


def test_checkpoint_appended_per_completion(stub, tmp_path):
    checkpoint = tmp_path / "cp.tsv"
    job = make_job(stub, ["bir", "iki"], checkpoint)
    annotate_batch(job)
    lines = checkpoint.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert {line.split("\t")[0] for line in lines} == {"0", "1"}
    for line in lines:
        assert line.split("\t")[1] == "ok"


def test_missing_credential_is_fatal_at_startup(stub, tmp_path, monkeypatch):
    monkeypatch.delenv("TGEC_TEST_KEY", raising=False)
    job = make_job(stub, ["bir"], tmp_path / "cp.tsv")
    with pytest.raises(AnnotationConfigError):
        annotate_batch(job)
    assert stub.state.requests == []


def test_prompt_template_must_have_one_slot(stub, tmp_path):
    job = make_job(stub, ["bir"], tmp_path / "cp.tsv")
    bad = AnnotationJob(job.sentences, job.endpoint, job.checkpoint_path,
                        prompt_template="no slot here")
    with pytest.raises(AnnotationConfigError):
        annotate_batch(bad)


def test_duplicate_ids_rejected(stub, tmp_path):
    job = make_job(stub, ["bir"], tmp_path / "cp.tsv")
    dup = AnnotationJob((("0", "a"), ("0", "b")), job.endpoint,
                        job.checkpoint_path, PROMPT)
    with pytest.raises(AnnotationConfigError):
        annotate_batch(dup)


def test_export_pairs_in_input_id_order(stub, tmp_path):
    # later ids finish first thanks to per-sentence delays
    stub.state.delay_per_sentence = {"bir": 0.08, "iki": 0.04, "üç": 0.0}
    job = make_job(stub, ["bir", "iki", "üç"], tmp_path / "cp.tsv", concurrency=3)
    records = annotate_batch(job)
    pairs_path = tmp_path / "pairs.tsv"
    rejects_path = tmp_path / "rejects.txt"
    exported, rejected = export_pairs(records, pairs_path, rejects_path)
    assert exported == 3 and rejected == 0
    lines = pairs_path.read_text(encoding="utf-8").splitlines()
    assert lines == ["bir\tdüzeltildi bir", "iki\tdüzeltildi iki", "üç\tdüzeltildi üç"]


def test_export_pairs_rejects_sidecar(tmp_path):
    records = [
        AnnotationRecord("0", "a", "A", "ok", 1),
        AnnotationRecord("1", "b", "", "refused", 1),
        AnnotationRecord("2", "c", "", "transport_error", 3),
    ]
    pairs_path = tmp_path / "pairs.tsv"
    rejects_path = tmp_path / "rejects.txt"
    exported, rejected = export_pairs(records, pairs_path, rejects_path)
    assert exported == 1 and rejected == 2
    assert pairs_path.read_text(encoding="utf-8") == "a\tA\n"
    assert rejects_path.read_text(encoding="utf-8") == "1\n2\n"


def test_export_all_refused(tmp_path):
    records = [AnnotationRecord(str(i), "s", "", "refused", 1) for i in range(3)]
    pairs_path = tmp_path / "pairs.tsv"
    rejects_path = tmp_path / "rejects.txt"
    exported, rejected = export_pairs(records, pairs_path, rejects_path)
    assert exported == 0 and rejected == 3
    assert pairs_path.read_text(encoding="utf-8") == ""
    assert len(rejects_path.read_text(encoding="utf-8").splitlines()) == 3
