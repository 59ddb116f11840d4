"""Source documents: raw text plus a content-derived identifier."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from ..errors import InputError


@dataclass(frozen=True)
class SourceDocument:
    """One text to extract from. doc_id is a pure function of the text."""

    text: str
    doc_id: str
    title: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise InputError("document text must be non-empty")
        expected = _digest(self.text)
        if self.doc_id != expected:
            raise InputError(
                f"doc_id {self.doc_id!r} does not match the text digest {expected!r}"
            )


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def document_from_text(text: str, title: str | None = None) -> SourceDocument:
    return SourceDocument(text=text, doc_id=_digest(text), title=title)


def load_corpus_dir(directory) -> list[SourceDocument]:
    """All .txt files under a directory, sorted by filename for determinism."""
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"corpus directory {root} does not exist")
    docs = []
    for path in sorted(root.glob("*.txt")):
        text = path.read_text(encoding="utf-8")
        if text.strip():
            docs.append(document_from_text(text, title=path.name))
    return docs
