"""SQLite-backed ledger of emitted documents, keyed by content hash."""

import hashlib
import json
import sqlite3
from pathlib import Path
from typing import Optional

from pydantic import BaseModel


def _conn(path: Path) -> sqlite3.Connection:
    path.parent.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(path)
    conn.execute(
        """
        CREATE TABLE IF NOT EXISTS documents (
            digest TEXT PRIMARY KEY,
            kind TEXT NOT NULL,
            payload TEXT NOT NULL
        )
        """
    )
    conn.commit()
    return conn


def document_digest(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def save_document(path: Path, kind: str, document: BaseModel) -> str:
    """Store the JSON of a document; returns its sha256."""
    payload = document.model_dump_json(indent=2)
    digest = document_digest(payload)
    with _conn(path) as conn:
        conn.execute(
            "INSERT OR REPLACE INTO documents (digest, kind, payload) VALUES (?, ?, ?)",
            (digest, kind, payload),
        )
        conn.commit()
    return digest


def get_document(path: Path, digest: str) -> Optional[dict]:
    with _conn(path) as conn:
        cur = conn.execute("SELECT payload FROM documents WHERE digest = ?", (digest,))
        row = cur.fetchone()
    if not row:
        return None
    return json.loads(row[0])


def list_documents(path: Path, kind: Optional[str] = None) -> list[tuple[str, str]]:
    query = "SELECT digest, kind FROM documents"
    args: tuple = ()
    if kind is not None:
        query += " WHERE kind = ?"
        args = (kind,)
    with _conn(path) as conn:
        return [(d, k) for d, k in conn.execute(query + " ORDER BY digest", args)]
