from pingcert.models.schemas import DeltaResult
from pingcert.services.report_store import get_document, list_documents, save_document


def test_documents_are_content_addressed(tmp_path):
    ledger = tmp_path / "ledger" / "pingcert.db"
    doc = DeltaResult(presentation_hash="abc", radius=4, delta_hat=0, mode="exhaustive", triangles=10)
    digest = save_document(ledger, "delta", doc)
    assert save_document(ledger, "delta", doc) == digest
    assert get_document(ledger, digest)["delta_hat"] == 0
    assert get_document(ledger, "missing") is None


def test_list_by_kind(tmp_path):
    ledger = tmp_path / "pingcert.db"
    a = save_document(ledger, "delta", DeltaResult(presentation_hash="x", radius=2, delta_hat=0, mode="exhaustive", triangles=1))
    save_document(ledger, "delta", DeltaResult(presentation_hash="y", radius=2, delta_hat=1, mode="exhaustive", triangles=1))
    assert len(list_documents(ledger)) == 2
    assert (a, "delta") in list_documents(ledger, "delta")
    assert list_documents(ledger, "certificate") == []
