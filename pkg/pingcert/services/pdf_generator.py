"""PDF summary of a certificate."""

from io import BytesIO
from xml.sax.saxutils import escape

from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

CONSTANTS = [
    ("delta_hat", "delta (window)"),
    ("mu_hat", "mu (window, max over H and K)"),
    ("mu1_hat", "mu of H1 and K1"),
    ("A", "A = #{g : |g| < 2 mu + delta}"),
    ("lambda0", "lambda0"),
    ("epsilon0", "epsilon0"),
    ("C", "C"),
    ("m_rel", "m (relative ball)"),
    ("M", "M = m^2 + 1"),
    ("join_mu_hat", "mu of the join (window)"),
]


def _p(text: object, style: ParagraphStyle) -> Paragraph:
    safe = escape(str(text if text is not None else ""))
    return Paragraph(safe, style)


def _styled_table(data: list[list], col_widths: list[float], body_style: ParagraphStyle) -> Table:
    wrapped = [data[0]]
    for row in data[1:]:
        wrapped.append([_p(cell, body_style) for cell in row])

    table = Table(wrapped, colWidths=col_widths, repeatRows=1)
    table.setStyle(
        TableStyle(
            [
                ("BACKGROUND", (0, 0), (-1, 0), colors.HexColor("#16324f")),
                ("TEXTCOLOR", (0, 0), (-1, 0), colors.white),
                ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
                ("FONTSIZE", (0, 0), (-1, 0), 9),
                ("GRID", (0, 0), (-1, -1), 0.4, colors.HexColor("#9fb3c8")),
                ("ROWBACKGROUNDS", (0, 1), (-1, -1), [colors.white, colors.HexColor("#eef4fb")]),
                ("VALIGN", (0, 1), (-1, -1), "TOP"),
                ("LEFTPADDING", (0, 0), (-1, -1), 6),
                ("RIGHTPADDING", (0, 0), (-1, -1), 6),
            ]
        )
    )
    return table


def generate_certificate_pdf(certificate: dict) -> bytes:
    """Render a certificate (as dumped JSON) to PDF; identical input gives identical bytes."""
    buffer = BytesIO()
    doc = SimpleDocTemplate(
        buffer,
        pagesize=A4,
        rightMargin=0.7 * inch,
        leftMargin=0.7 * inch,
        topMargin=0.7 * inch,
        bottomMargin=0.7 * inch,
        invariant=1,
        title="Ping-pong certificate",
    )

    styles = getSampleStyleSheet()
    title_style = ParagraphStyle("CertTitle", parent=styles["Heading1"], fontSize=18, textColor=colors.HexColor("#16324f"))
    h2 = ParagraphStyle("SectionHeading", parent=styles["Heading2"], fontSize=12, textColor=colors.HexColor("#16324f"), spaceAfter=6)
    body = ParagraphStyle("TableBody", parent=styles["BodyText"], fontName="Helvetica", fontSize=8.5, leading=10.2, wordWrap="CJK")

    verdict = certificate.get("verdict", {})
    story = [Paragraph(f"Ping-pong certificate ({certificate.get('mode', '')})", title_style), Spacer(1, 6)]
    story.append(Paragraph(f"<b>Presentation hash:</b> {certificate.get('presentation_hash', 'N/A')}", styles["Normal"]))
    story.append(Paragraph(f"<b>Window radius:</b> {certificate.get('window_radius', 'N/A')}", styles["Normal"]))
    status = verdict.get("status", "N/A")
    detail = verdict.get("reason") or verdict.get("counterexample") or ""
    story.append(Paragraph(f"<b>Verdict:</b> {escape(status)} {escape(detail)}", styles["Normal"]))
    story.append(Spacer(1, 12))

    story.append(Paragraph("1. Subgroups", h2))
    rows = [["Role", "Generators"]]
    for role, gens in certificate.get("subgroups", {}).items():
        rows.append([role, ", ".join(gens) or "(trivial)"])
    story.append(_styled_table(rows, [1.2 * inch, 5.3 * inch], body))
    story.append(Spacer(1, 12))

    story.append(Paragraph("2. Constants", h2))
    provenance = certificate.get("provenance", {})
    rows = [["Constant", "Value", "Provenance"]]
    for key, label in CONSTANTS:
        value = certificate.get(key)
        if value is not None:
            rows.append([label, value, provenance.get(key, "")])
    ltg = certificate.get("local_to_global")
    if ltg:
        rows.append(["(L, lambda, eps)", f"({ltg['L']}, {ltg['lam']}, {ltg['eps']})", ltg["provenance"]])
    story.append(_styled_table(rows, [2.4 * inch, 1.6 * inch, 2.5 * inch], body))
    story.append(Spacer(1, 12))

    story.append(Paragraph("3. Gates", h2))
    rows = [["Gate", "Pass/Fail", "Details"]]
    for gate in certificate.get("gates", []):
        rows.append([gate.get("gate_name", ""), "Pass" if gate.get("passed") else "Fail", gate.get("message", "")])
    story.append(_styled_table(rows, [2.6 * inch, 0.9 * inch, 3.0 * inch], body))
    story.append(Spacer(1, 12))

    story.append(Paragraph("4. Oracle cross-check", h2))
    oracle = certificate.get("oracle")
    if oracle:
        text = f"{oracle['outcome']} to length {oracle['achieved_length']} of {oracle['maxlen']} ({oracle['normal_forms']} normal forms)"
        if oracle.get("counterexample"):
            text += f"; counterexample {oracle['counterexample']}"
        story.append(_p(text, styles["Normal"]))
    else:
        story.append(Paragraph("Not run.", styles["Normal"]))

    notes = certificate.get("notes", [])
    if notes:
        story.append(Spacer(1, 12))
        story.append(Paragraph("5. Notes", h2))
        for note in notes:
            story.append(_p(f"- {note}", styles["Normal"]))

    doc.build(story)
    return buffer.getvalue()
