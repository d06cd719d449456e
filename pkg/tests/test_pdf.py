from io import BytesIO

from pypdf import PdfReader

from pingcert.models.schemas import Certificate, OracleRecord, Verdict
from pingcert.services.gate_engine import evaluate_gates
from pingcert.services.pdf_generator import generate_certificate_pdf


def sample_certificate() -> dict:
    _, gates = evaluate_gates("theorem1", {"instance_invariants": True})
    cert = Certificate(
        mode="theorem1",
        presentation_hash="deadbeef",
        presentation="gens: a b\n",
        subgroups={"H": ["a"], "K": ["b"], "H1": ["a"], "K1": ["b"], "G0": []},
        window_radius=4,
        delta_hat=0,
        mu_hat=0,
        C="1",
        gates=gates,
        oracle=OracleRecord(maxlen=6, outcome="consistent", achieved_length=6, normal_forms=120),
        verdict=Verdict(status="INCONCLUSIVE", reason="mu_stable"),
        notes=["A counts group elements shorter than 2 mu + delta, not letter strings."],
    )
    return cert.model_dump()


def test_pdf_contains_certificate_sections():
    pdf = generate_certificate_pdf(sample_certificate())
    text = "".join(page.extract_text() for page in PdfReader(BytesIO(pdf)).pages)
    assert "Ping-pong certificate" in text
    assert "deadbeef" in text
    assert "INCONCLUSIVE" in text
    assert "Oracle cross-check" in text
    assert "(trivial)" in text


def test_pdf_is_reproducible():
    assert generate_certificate_pdf(sample_certificate()) == generate_certificate_pdf(sample_certificate())
