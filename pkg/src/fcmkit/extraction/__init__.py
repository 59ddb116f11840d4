"""Three-step text-to-FCM extraction over a pluggable LLM provider."""

from .documents import SourceDocument, document_from_text, load_corpus_dir
from .pipeline import (
    CausalEdgeCandidate,
    ExtractionArtifacts,
    ExtractionConfig,
    NounCandidate,
    build_fcm,
    extract_edges,
    extract_fcm,
    extract_nouns,
    normalize_quote,
    refine_nodes,
    validate_evidence,
)
from .providers import (
    HttpProvider,
    LlmRequest,
    LlmResponse,
    RecordingProvider,
    ReplayProvider,
    ScriptedProvider,
    request_hash,
)

__all__ = [
    "SourceDocument",
    "document_from_text",
    "load_corpus_dir",
    "NounCandidate",
    "CausalEdgeCandidate",
    "ExtractionArtifacts",
    "ExtractionConfig",
    "extract_nouns",
    "refine_nodes",
    "extract_edges",
    "validate_evidence",
    "build_fcm",
    "extract_fcm",
    "normalize_quote",
    "LlmRequest",
    "LlmResponse",
    "request_hash",
    "HttpProvider",
    "ReplayProvider",
    "RecordingProvider",
    "ScriptedProvider",
]
