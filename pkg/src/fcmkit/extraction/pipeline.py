"""Three sequential LLM steps turn a document into an evidence-backed FCM.

Step 1 lists noun candidates sentence by sentence with pronouns resolved.
Step 2 keeps the candidates that work as causal variables and labels them.
Step 3 weighs every ordered node pair and quotes the justifying text.

Every step demands a strict record-per-line response; an unparseable
response gets one automatic reformat retry before the stage fails. Edges
whose quotes do not validate against the source text are flagged as
potential hallucinations and excluded from the matrix, never silently
dropped.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import logging
import re
from dataclasses import dataclass, replace
from importlib import resources
from string import Template

import numpy as np

from ..errors import FcmError, InputError, ParseError, PipelineError
from ..model import ConceptNode, EdgeAnnotation, EdgeMatrix, Fcm, Provenance, nodes_from_labels
from .documents import SourceDocument
from .providers import DEFAULT_TEMPERATURE, DEFAULT_TOP_P, LlmRequest, LlmResponse, request_hash

log = logging.getLogger("fcmkit.extraction")

WEIGHT_SCALE = (0.25, 0.5, 0.75, 1.0)
STAGE_NOUNS = "step1-nouns"
STAGE_NODES = "step2-nodes"
STAGE_EDGES = "step3-edges"

_WS_RE = re.compile(r"\s+")
_QUOTE_CHARS = "\"'“”‘’«»‹›`"
_TRAILING_PUNCT = ".,;:!?…"


@dataclass(frozen=True)
class NounCandidate:
    """A noun or noun phrase mention; pronouns carry their original form."""

    surface: str
    sentence_index: int
    resolved_from_pronoun: str | None = None

    def __post_init__(self):
        if not self.surface.strip():
            raise InputError("noun surface must be non-empty")
        if self.sentence_index < 0:
            raise InputError("sentence index must be nonnegative")


@dataclass(frozen=True)
class CausalEdgeCandidate:
    source_label: str
    target_label: str
    sign: str
    weight: float
    evidence_quote: str
    trigger_verb: str

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise InputError(f"sign must be + or -, got {self.sign!r}")
        if not (-1.0 <= self.weight <= 1.0) or self.weight == 0.0:
            raise InputError(f"weight {self.weight} outside [-1, 1] or zero")
        if (self.weight > 0) != (self.sign == "+"):
            raise InputError(f"sign {self.sign} contradicts weight {self.weight}")


@dataclass(frozen=True)
class TranscriptEntry:
    stage: str
    request: LlmRequest
    response: LlmResponse


@dataclass(frozen=True)
class ValidationReport:
    accepted: tuple[CausalEdgeCandidate, ...]
    rejected: tuple[tuple[CausalEdgeCandidate, str], ...]


@dataclass(frozen=True)
class ExtractionArtifacts:
    nouns: tuple[NounCandidate, ...]
    nodes: tuple[ConceptNode, ...]
    edges: tuple[CausalEdgeCandidate, ...]
    accepted_edges: tuple[CausalEdgeCandidate, ...]
    rejected_edges: tuple[tuple[CausalEdgeCandidate, str], ...]
    transcripts: tuple[TranscriptEntry, ...]


@dataclass(frozen=True)
class ExtractionConfig:
    model: str = ""
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    pair_batch_size: int = 20
    allow_self_loops: bool = False
    weight_scale: tuple[float, ...] = WEIGHT_SCALE

    def __post_init__(self):
        if self.pair_batch_size < 1:
            raise InputError("pair batch size must be at least 1")
        if not self.weight_scale or any(not (0 < m <= 1) for m in self.weight_scale):
            raise InputError("weight scale magnitudes must lie in (0, 1]")


def _template(name: str) -> tuple[Template, str]:
    text = resources.files("fcmkit.extraction.prompts").joinpath(name).read_text("utf-8")
    return Template(text), hashlib.sha256(text.encode("utf-8")).hexdigest()


def template_hashes() -> tuple[tuple[str, str], ...]:
    return tuple(
        (name.split(".")[0], _template(name)[1])
        for name in ("step1.txt", "step2.txt", "step3.txt")
    )


def _complete_structured(llm, config, stage, system_text, user_text, parse):
    """One request plus one reformat retry; returns (parsed, transcripts)."""
    transcripts: list[TranscriptEntry] = []
    request = LlmRequest(
        system_instruction=system_text,
        user_content=user_text,
        temperature=config.temperature,
        top_p=config.top_p,
        model=config.model,
    )
    response = llm.complete(request)
    transcripts.append(TranscriptEntry(stage, request, response))
    try:
        return parse(response.content), transcripts
    except ParseError as first_error:
        log.warning("%s: reformat retry after parse failure: %s", stage, first_error)
        retry_request = replace(
            request,
            user_content=(
                user_text
                + "\n\nYour previous answer could not be parsed:\n"
                + response.content
                + "\n\nReformat your previous answer to follow the record format"
                " exactly. Output records only."
            ),
        )
        retry_response = llm.complete(retry_request)
        transcripts.append(TranscriptEntry(stage, retry_request, retry_response))
        try:
            return parse(retry_response.content), transcripts
        except ParseError as exc:
            raise PipelineError(
                f"unparseable response after reformat retry: {exc}",
                stage=stage,
                transcripts=tuple(transcripts),
            ) from exc


def _records(content: str, tag: str):
    """Lines starting with the record tag; other lines are ignored chatter."""
    for line in content.splitlines():
        line = line.rstrip("\r")
        if line.startswith(tag + "\t"):
            yield line.split("\t")


def _parse_nouns(content: str) -> tuple[NounCandidate, ...]:
    nouns = []
    for parts in _records(content, "NOUN"):
        if len(parts) != 4:
            raise ParseError(f"NOUN record needs 4 fields, got {len(parts)}: {parts!r}")
        _, index_text, surface, pronoun = parts
        try:
            index = int(index_text)
        except ValueError as exc:
            raise ParseError(f"bad sentence index {index_text!r}") from exc
        if index < 0 or not surface.strip():
            raise ParseError(f"bad NOUN record: {parts!r}")
        resolved = None if pronoun.strip() in ("", "-") else pronoun.strip()
        nouns.append(
            NounCandidate(
                surface=surface.strip(), sentence_index=index, resolved_from_pronoun=resolved
            )
        )
    if not nouns:
        raise ParseError("no NOUN records found")
    return tuple(nouns)


def extract_nouns(doc: SourceDocument, llm, config: ExtractionConfig | None = None, *,
                  transcript_log: list | None = None) -> tuple[NounCandidate, ...]:
    """Step 1: noun and noun-phrase candidates with pronouns resolved."""
    config = config or ExtractionConfig()
    template, _ = _template("step1.txt")
    nouns, transcripts = _complete_structured(
        llm,
        config,
        STAGE_NOUNS,
        template.template,
        template.substitute(document=doc.text),
        _parse_nouns,
    )
    if transcript_log is not None:
        transcript_log.extend(transcripts)
    return nouns


def _parse_nodes(content: str, surfaces: set[str]):
    def normalize(s: str) -> str:
        return _WS_RE.sub(" ", s.strip())

    normalized_surfaces = {normalize(s) for s in surfaces}
    labeled: list[tuple[str, str]] = []
    seen_labels: set[str] = set()
    for parts in _records(content, "NODE"):
        if len(parts) != 3:
            raise ParseError(f"NODE record needs 3 fields, got {len(parts)}: {parts!r}")
        _, label, source_noun = parts
        label = normalize(label)
        if not label:
            raise ParseError(f"empty NODE label: {parts!r}")
        # Dedup casefolded so downstream label canonicalization stays injective.
        if label.casefold() in seen_labels:
            log.warning("duplicate node label %r; keeping the first", label)
            continue
        if normalize(source_noun) not in normalized_surfaces:
            log.warning("node %r cites unknown source noun %r; dropped", label, source_noun)
            continue
        seen_labels.add(label.casefold())
        labeled.append((label, source_noun.strip()))
    if not labeled:
        raise ParseError("no usable NODE records found")
    return tuple(labeled)


def refine_nodes(nouns, doc: SourceDocument, llm, config: ExtractionConfig | None = None, *,
                 transcript_log: list | None = None) -> tuple[ConceptNode, ...]:
    """Step 2: keep measurable, causally connected concepts; label them."""
    config = config or ExtractionConfig()
    nouns = tuple(nouns)
    if not nouns:
        return ()
    template, _ = _template("step2.txt")
    noun_lines = "\n".join(
        f"- {c.surface}" + (f" (from pronoun {c.resolved_from_pronoun!r})" if c.resolved_from_pronoun else "")
        for c in nouns
    )
    surfaces = {c.surface for c in nouns}
    labeled, transcripts = _complete_structured(
        llm,
        config,
        STAGE_NODES,
        template.template,
        template.substitute(document=doc.text, nouns=noun_lines),
        lambda content: _parse_nodes(content, surfaces),
    )
    if transcript_log is not None:
        transcript_log.extend(transcripts)
    labels = [label for label, _ in labeled]
    evidence = {label: noun for label, noun in labeled}
    return nodes_from_labels(labels, evidence)


def _snap_magnitude(magnitude: float, scale) -> float:
    if magnitude in scale:
        return magnitude
    nearest = min(scale, key=lambda level: (abs(level - magnitude), level))
    log.warning("magnitude %s off scale; snapped to %s", magnitude, nearest)
    return nearest


def _parse_edges(content: str, expected_pairs, config: ExtractionConfig):
    expected = {pair: i for i, pair in enumerate(expected_pairs)}
    covered: set[tuple[str, str]] = set()
    found: list[tuple[int, CausalEdgeCandidate]] = []
    for line in content.splitlines():
        line = line.rstrip("\r")
        if line.startswith("NONE\t"):
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"NONE record needs 3 fields: {parts!r}")
            pair = (parts[1].strip(), parts[2].strip())
            if pair in expected:
                covered.add(pair)
            else:
                log.warning("NONE record for unknown pair %r; dropped", pair)
        elif line.startswith("EDGE\t"):
            parts = line.split("\t")
            if len(parts) != 7:
                raise ParseError(f"EDGE record needs 7 fields, got {len(parts)}: {parts!r}")
            _, source, target, sign, magnitude_text, verb, quote = parts
            pair = (source.strip(), target.strip())
            if pair not in expected:
                log.warning("edge references unknown pair %r; dropped", pair)
                continue
            sign = sign.strip().replace("−", "-")
            if sign not in ("+", "-"):
                raise ParseError(f"bad sign {sign!r} in {parts!r}")
            try:
                magnitude = float(magnitude_text)
            except ValueError as exc:
                raise ParseError(f"bad magnitude {magnitude_text!r}") from exc
            if not (0 < magnitude <= 1):
                raise ParseError(f"magnitude {magnitude} outside (0, 1]")
            if not verb.strip() or not quote.strip():
                raise ParseError(f"EDGE record missing verb or quote: {parts!r}")
            magnitude = _snap_magnitude(magnitude, config.weight_scale)
            covered.add(pair)
            found.append(
                (
                    expected[pair],
                    CausalEdgeCandidate(
                        source_label=pair[0],
                        target_label=pair[1],
                        sign=sign,
                        weight=magnitude if sign == "+" else -magnitude,
                        evidence_quote=quote.strip(),
                        trigger_verb=verb.strip(),
                    ),
                )
            )
    missing = [pair for pair in expected_pairs if pair not in covered]
    if missing:
        raise ParseError(
            f"{len(missing)} pair(s) left uncovered, first: {missing[0]!r}"
        )
    found.sort(key=lambda item: item[0])
    return tuple(edge for _, edge in found)


def ordered_pairs(labels, allow_self_loops: bool = False):
    labels = list(labels)
    return [
        (a, b)
        for a in labels
        for b in labels
        if allow_self_loops or a != b
    ]


def extract_edges(nodes, doc: SourceDocument, llm, config: ExtractionConfig | None = None, *,
                  transcript_log: list | None = None) -> tuple[CausalEdgeCandidate, ...]:
    """Step 3: weigh every ordered node pair, in batches, merged by pair order."""
    config = config or ExtractionConfig()
    nodes = tuple(nodes)
    if not nodes:
        raise InputError("edge extraction needs at least one node")
    labels = [node.label for node in nodes]
    pairs = ordered_pairs(labels, config.allow_self_loops)
    if not pairs:
        return ()
    template, _ = _template("step3.txt")
    batches = [
        pairs[k : k + config.pair_batch_size]
        for k in range(0, len(pairs), config.pair_batch_size)
    ]
    edges: list[CausalEdgeCandidate] = []
    for batch in batches:
        pair_lines = "\n".join(f"- {a} -> {b}" for a, b in batch)
        batch_edges, transcripts = _complete_structured(
            llm,
            config,
            STAGE_EDGES,
            template.template,
            template.substitute(document=doc.text, pairs=pair_lines),
            lambda content, batch=batch: _parse_edges(content, batch, config),
        )
        if transcript_log is not None:
            transcript_log.extend(transcripts)
        edges.extend(batch_edges)
    return tuple(edges)


def normalize_quote(quote: str) -> str:
    """Fixpoint of: trim, strip surrounding quotation marks, collapse
    whitespace, drop trailing punctuation."""
    current = quote
    while True:
        step = _WS_RE.sub(" ", current).strip()
        step = step.strip(_QUOTE_CHARS)
        step = step.rstrip(_TRAILING_PUNCT).rstrip()
        if step == current:
            return current
        current = step


def validate_evidence(edges, doc: SourceDocument) -> ValidationReport:
    """Accept an edge iff its quote is a contiguous substring of the source.

    Comparison collapses whitespace, ignores surrounding quotation marks and
    trailing punctuation, and is case-sensitive. Rejected edges are returned
    with reasons; they are potential hallucinations, not discards.
    """
    haystack = _WS_RE.sub(" ", doc.text)
    accepted: list[CausalEdgeCandidate] = []
    rejected: list[tuple[CausalEdgeCandidate, str]] = []
    for edge in edges:
        needle = normalize_quote(edge.evidence_quote)
        if not needle:
            rejected.append((edge, "empty-quote"))
        elif needle in haystack:
            accepted.append(edge)
        else:
            log.warning(
                "potential hallucination: quote not found for %s -> %s",
                edge.source_label,
                edge.target_label,
            )
            rejected.append((edge, "quote-not-found"))
    return ValidationReport(accepted=tuple(accepted), rejected=tuple(rejected))


def _utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def transcripts_digest(transcripts) -> str:
    hasher = hashlib.sha256()
    for entry in transcripts:
        hasher.update(request_hash(entry.request).encode("ascii"))
        hasher.update(entry.response.content.encode("utf-8"))
    return hasher.hexdigest()


def build_fcm(nodes, accepted_edges, doc: SourceDocument, *,
              transcripts=(), deterministic: bool = True) -> Fcm:
    """Assemble the matrix; duplicate ordered pairs keep the max-|weight| edge."""
    nodes = tuple(nodes)
    index = {node.label: i for i, node in enumerate(nodes)}
    best: dict[tuple[str, str], CausalEdgeCandidate] = {}
    for edge in accepted_edges:
        if edge.source_label not in index or edge.target_label not in index:
            raise FcmError(
                f"edge endpoint not among nodes: {edge.source_label!r} -> {edge.target_label!r}"
            )
        key = (edge.source_label, edge.target_label)
        current = best.get(key)
        if current is None:
            best[key] = edge
        elif abs(edge.weight) > abs(current.weight):
            log.warning("duplicate edge %r: keeping |%s| over |%s|", key, edge.weight, current.weight)
            best[key] = edge
        else:
            log.warning("duplicate edge %r: dropping |%s|", key, edge.weight)

    matrix = np.zeros((len(nodes), len(nodes)), dtype=np.float64)
    annotations: dict[tuple[str, str], EdgeAnnotation] = {}
    for (source_label, target_label), edge in best.items():
        i, j = index[source_label], index[target_label]
        matrix[i, j] = edge.weight
        annotations[(nodes[i].id, nodes[j].id)] = EdgeAnnotation(
            evidence_quote=edge.evidence_quote, trigger_verb=edge.trigger_verb
        )
    provenance = Provenance(
        source=f"extracted from document {doc.doc_id}"
        + (f" ({doc.title})" if doc.title else ""),
        doc_id=doc.doc_id,
        template_hashes=template_hashes(),
        transcript_hash=transcripts_digest(transcripts) if transcripts else None,
        created_at="" if deterministic else _utc_now(),
    )
    return Fcm(
        nodes=nodes,
        edges=EdgeMatrix(matrix),
        provenance=provenance,
        edge_annotations=annotations,
    )


def extract_fcm(doc: SourceDocument, llm, config: ExtractionConfig | None = None
                ) -> tuple[Fcm, ExtractionArtifacts]:
    """Steps 1-3 plus evidence validation; returns the FCM and all artifacts."""
    config = config or ExtractionConfig()
    transcripts: list[TranscriptEntry] = []
    nouns = extract_nouns(doc, llm, config, transcript_log=transcripts)
    nodes = refine_nodes(nouns, doc, llm, config, transcript_log=transcripts)
    edges = extract_edges(nodes, doc, llm, config, transcript_log=transcripts) if nodes else ()
    report = validate_evidence(edges, doc)
    deterministic = bool(getattr(llm, "deterministic", False))
    fcm = build_fcm(
        nodes, report.accepted, doc, transcripts=transcripts, deterministic=deterministic
    )
    artifacts = ExtractionArtifacts(
        nouns=tuple(nouns),
        nodes=tuple(nodes),
        edges=tuple(edges),
        accepted_edges=report.accepted,
        rejected_edges=report.rejected,
        transcripts=tuple(transcripts),
    )
    return fcm, artifacts
