"""fcmkit: build, run, mix, and steer fuzzy cognitive maps.

An FCM is a signed weighted digraph over causal concepts. This package
simulates its discrete dynamics to fixed points and limit cycles, mixes
FCMs by convex combination over unioned node sets, extracts
evidence-backed FCMs from text through a three-step LLM pipeline, and
closes the loop in which equilibria decide what text to read next.
"""

from .engine import (
    classify_equilibrium,
    default_max_steps,
    enumerate_basins,
    run_trajectory,
    squash,
    step,
)
from .extraction import (
    CausalEdgeCandidate,
    ExtractionArtifacts,
    ExtractionConfig,
    HttpProvider,
    LlmRequest,
    LlmResponse,
    NounCandidate,
    RecordingProvider,
    ReplayProvider,
    ScriptedProvider,
    SourceDocument,
    build_fcm,
    document_from_text,
    extract_edges,
    extract_fcm,
    extract_nouns,
    load_corpus_dir,
    normalize_quote,
    refine_nodes,
    request_hash,
    validate_evidence,
)
from .loop import (
    AttractorSummary,
    IterationRecord,
    LocalDirectorySource,
    LoopConfig,
    LoopState,
    agentic_iterate,
    equilibrium_to_query,
    read_journal,
    replay_journal,
    run_loop,
    run_loop_from_dir,
)
from .errors import (
    FcmError,
    FixtureError,
    InputError,
    IoError,
    ParseError,
    PipelineError,
    ProviderError,
    ResourceError,
    SchemaError,
    ShapeError,
    UnsupportedError,
)
from .mixer import MixSpec, align_nodes, canonicalize_label, mix, zero_pad
from .model import (
    CLAMPED_LINEAR,
    FIXED_POINT,
    HARD_THRESHOLD,
    LIMIT_CYCLE,
    LOGISTIC,
    TOOL_VERSION,
    UNRESOLVED,
    ConceptNode,
    EdgeAnnotation,
    EdgeMatrix,
    EquilibriumClassification,
    Fcm,
    Provenance,
    Squasher,
    StateVector,
    nodes_from_labels,
)
from .persistence import (
    canonical_content_bytes,
    content_digest,
    export_trajectory,
    fcm_to_bytes,
    load_fcm,
    save_fcm,
)

__version__ = TOOL_VERSION

__all__ = [
    "__version__",
    "TOOL_VERSION",
    "ConceptNode",
    "EdgeAnnotation",
    "EdgeMatrix",
    "StateVector",
    "Squasher",
    "Provenance",
    "Fcm",
    "EquilibriumClassification",
    "nodes_from_labels",
    "HARD_THRESHOLD",
    "LOGISTIC",
    "CLAMPED_LINEAR",
    "FIXED_POINT",
    "LIMIT_CYCLE",
    "UNRESOLVED",
    "squash",
    "step",
    "run_trajectory",
    "classify_equilibrium",
    "default_max_steps",
    "enumerate_basins",
    "MixSpec",
    "mix",
    "align_nodes",
    "zero_pad",
    "canonicalize_label",
    "save_fcm",
    "load_fcm",
    "fcm_to_bytes",
    "canonical_content_bytes",
    "content_digest",
    "export_trajectory",
    "FcmError",
    "InputError",
    "ShapeError",
    "ResourceError",
    "UnsupportedError",
    "ProviderError",
    "FixtureError",
    "PipelineError",
    "IoError",
    "ParseError",
    "SchemaError",
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
    "AttractorSummary",
    "IterationRecord",
    "LoopConfig",
    "LoopState",
    "LocalDirectorySource",
    "agentic_iterate",
    "equilibrium_to_query",
    "run_loop",
    "run_loop_from_dir",
    "read_journal",
    "replay_journal",
]
