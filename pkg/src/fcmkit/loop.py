"""Feedback loop: the FCM's equilibria choose what text to read next.

Each iteration probes the current FCM from an all-ones init, turns the
attractor's active labels into a query, fetches the best-matching corpus
document, extracts a new FCM from it, and mixes that FCM into the current
one. Every iteration appends one journal record; replaying the journal
against the persisted component FCMs reproduces the final FCM exactly.

A failed extraction never mutates the FCM: the iteration is recorded as
failed and the loop moves on.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .engine import run_trajectory
from .errors import FixtureError, InputError, PipelineError, ProviderError
from .extraction.documents import SourceDocument, load_corpus_dir
from .extraction.pipeline import ExtractionConfig, extract_fcm
from .mixer import MixSpec, mix
from .model import Fcm, Squasher, StateVector
from .persistence import canonical_json_bytes, content_digest, load_fcm, save_fcm

log = logging.getLogger("fcmkit.loop")

_TOKEN_RE = re.compile(r"[a-z0-9]+")

STATUS_OK = "ok"
STATUS_FAILED = "failed"
STATUS_SKIPPED_DUPLICATE = "skipped-duplicate"
STATUS_SKIPPED_EMPTY = "skipped-empty-corpus"

JOURNAL_NAME = "journal.ndjson"
INITIAL_NAME = "initial.json"
FINAL_NAME = "final.json"


@dataclass(frozen=True)
class AttractorSummary:
    """Canonical attractor identity: kind, period, active labels per cycle state."""

    kind: str
    period: int
    signature: tuple[tuple[str, ...], ...]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "period": self.period,
            "signature": [list(group) for group in self.signature],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AttractorSummary":
        return cls(
            kind=raw["kind"],
            period=int(raw["period"]),
            signature=tuple(tuple(group) for group in raw["signature"]),
        )


@dataclass(frozen=True)
class QueryResult:
    text: str
    fallback: bool
    active_labels: tuple[str, ...]


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    status: str
    query: str
    query_fallback: bool
    doc_id: str | None
    doc_title: str | None
    component_file: str | None
    component_digest: str | None
    mix_weight: float | None
    equilibrium_before: AttractorSummary
    equilibrium_after: AttractorSummary
    fcm_digest_after: str
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "status": self.status,
            "query": self.query,
            "query_fallback": self.query_fallback,
            "doc_id": self.doc_id,
            "doc_title": self.doc_title,
            "component_file": self.component_file,
            "component_digest": self.component_digest,
            "mix_weight": self.mix_weight,
            "equilibrium_before": self.equilibrium_before.to_dict(),
            "equilibrium_after": self.equilibrium_after.to_dict(),
            "fcm_digest_after": self.fcm_digest_after,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "IterationRecord":
        mix_weight = raw.get("mix_weight")
        return cls(
            iteration=int(raw["iteration"]),
            status=raw["status"],
            query=raw["query"],
            query_fallback=bool(raw["query_fallback"]),
            doc_id=raw.get("doc_id"),
            doc_title=raw.get("doc_title"),
            component_file=raw.get("component_file"),
            component_digest=raw.get("component_digest"),
            mix_weight=float(mix_weight) if mix_weight is not None else None,
            equilibrium_before=AttractorSummary.from_dict(raw["equilibrium_before"]),
            equilibrium_after=AttractorSummary.from_dict(raw["equilibrium_after"]),
            fcm_digest_after=raw["fcm_digest_after"],
            error=raw.get("error"),
        )


@dataclass(frozen=True)
class LoopState:
    current_fcm: Fcm
    iteration: int = 0
    history: tuple[IterationRecord, ...] = ()

    def __post_init__(self):
        if len(self.history) != self.iteration:
            raise InputError("history length must equal the iteration count")


@dataclass(frozen=True)
class LoopConfig:
    phi: Squasher = field(default_factory=Squasher.hard_threshold)
    mix_weight_new: float = 0.5
    decay_mix_weight: bool = False
    max_iterations: int = 5
    fetch_k: int = 1
    stable_stop: int = 2
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)

    def __post_init__(self):
        if not (0.0 < self.mix_weight_new < 1.0):
            raise InputError("mix weight for the new component must lie in (0, 1)")
        if self.max_iterations < 1:
            raise InputError("at least one iteration required")
        if self.fetch_k < 1:
            raise InputError("fetch_k must be at least 1")

    def mix_weight_at(self, iteration: int) -> float:
        if self.decay_mix_weight:
            return self.mix_weight_new / iteration
        return self.mix_weight_new


class LocalDirectorySource:
    """Corpus of plain-text files ranked by token overlap with the query."""

    kind = "local-directory"

    def __init__(self, directory):
        self.directory = Path(directory)

    def fetch(self, query: str, k: int) -> list[SourceDocument]:
        docs = load_corpus_dir(self.directory)
        query_tokens = set(_TOKEN_RE.findall(query.casefold()))
        scored = []
        for doc in docs:
            doc_tokens = set(_TOKEN_RE.findall(doc.text.casefold()))
            scored.append((-len(query_tokens & doc_tokens), doc.title or "", doc))
        scored.sort(key=lambda item: (item[0], item[1]))
        return [doc for _, _, doc in scored[:k]]


def fetch_documents(query: str, source, k: int) -> list[SourceDocument]:
    """Top-k documents for the query; empty corpus yields an empty list."""
    return list(source.fetch(query, k))


def attractor_summary(classification, labels) -> AttractorSummary:
    """Active-label signature of the attractor, canonicalized by rotation."""
    groups = []
    for state in classification.cycle_states:
        groups.append(
            tuple(label for label, value in zip(labels, state.values) if value > 0.5)
        )
    if groups:
        # Rotate so the lexicographically smallest group list comes first.
        rotations = [tuple(groups[i:] + groups[:i]) for i in range(len(groups))]
        signature = min(rotations)
    else:
        signature = ()
    return AttractorSummary(
        kind=classification.kind, period=classification.period, signature=signature
    )


def equilibrium_to_query(classification, nodes) -> QueryResult:
    """Labels active (> 0.5) in any attractor state, joined in node order.

    A fully inactive (or unresolved) attractor falls back to querying every
    label, flagged so the journal shows the degenerate case.
    """
    labels = [node.label for node in nodes]
    active = [False] * len(labels)
    for state in classification.cycle_states:
        for i, value in enumerate(state.values):
            if value > 0.5:
                active[i] = True
    active_labels = tuple(label for label, flag in zip(labels, active) if flag)
    if active_labels:
        return QueryResult(
            text=" ".join(active_labels), fallback=False, active_labels=active_labels
        )
    return QueryResult(text=" ".join(labels), fallback=True, active_labels=())


def _probe_classification(fcm: Fcm, phi: Squasher):
    probe = StateVector(values=(1.0,) * fcm.n)
    _, classification = run_trajectory(fcm, probe, phi)
    return classification


def agentic_iterate(state: LoopState, source, llm, config: LoopConfig,
                    persist_component=None) -> LoopState:
    """One cycle: classify, query, fetch, extract, mix. Failures leave the FCM as-is.

    persist_component(fcm, iteration) -> file name is called for successfully
    extracted components so the journal can reference the persisted artifact.
    """
    iteration = state.iteration + 1
    fcm = state.current_fcm
    classification = _probe_classification(fcm, config.phi)
    before = attractor_summary(classification, fcm.labels)
    query = equilibrium_to_query(classification, fcm.nodes)

    status = STATUS_OK
    error = None
    doc_id = doc_title = component_file = component_digest = None
    mix_weight = None
    new_fcm = fcm

    docs = fetch_documents(query.text, source, config.fetch_k)
    if not docs:
        status = STATUS_SKIPPED_EMPTY
        log.warning("iteration %d: empty corpus, skipping", iteration)
    else:
        doc = docs[0]
        doc_id, doc_title = doc.doc_id, doc.title
        seen = {record.doc_id for record in state.history if record.doc_id}
        if doc.doc_id in seen:
            status = STATUS_SKIPPED_DUPLICATE
            log.info("iteration %d: document %s already used, skipping", iteration, doc.doc_id)
        else:
            try:
                component, _ = extract_fcm(doc, llm, config.extraction)
                mix_weight = config.mix_weight_at(iteration)
                new_fcm = mix(
                    MixSpec(
                        components=(fcm, component),
                        weights=(1.0 - mix_weight, mix_weight),
                    )
                )
                component_digest = content_digest(component)
                if persist_component is not None:
                    component_file = persist_component(component, iteration)
            except (PipelineError, ProviderError, FixtureError) as exc:
                status = STATUS_FAILED
                error = str(exc)
                new_fcm = fcm
                mix_weight = None
                log.warning("iteration %d failed: %s", iteration, exc)

    after = attractor_summary(_probe_classification(new_fcm, config.phi), new_fcm.labels)
    record = IterationRecord(
        iteration=iteration,
        status=status,
        query=query.text,
        query_fallback=query.fallback,
        doc_id=doc_id,
        doc_title=doc_title,
        component_file=component_file,
        component_digest=component_digest,
        mix_weight=mix_weight,
        equilibrium_before=before,
        equilibrium_after=after,
        fcm_digest_after=content_digest(new_fcm),
        error=error,
    )
    return LoopState(
        current_fcm=new_fcm, iteration=iteration, history=state.history + (record,)
    )


def _is_stable(history, window: int) -> bool:
    if len(history) < window:
        return False
    return all(
        record.equilibrium_after == record.equilibrium_before
        for record in history[-window:]
    )


def run_loop(initial_fcm: Fcm, source, llm, config: LoopConfig, run_dir) -> LoopState:
    """Iterate until max_iterations or the attractor stays put twice in a row.

    Writes initial.json, per-iteration component FCMs, an append-only
    journal.ndjson, and final.json under run_dir.
    """
    run_path = Path(run_dir)
    (run_path / "components").mkdir(parents=True, exist_ok=True)
    save_fcm(initial_fcm, run_path / INITIAL_NAME)
    journal_path = run_path / JOURNAL_NAME
    journal_path.write_text("", encoding="utf-8")

    def persist_component(fcm: Fcm, iteration: int) -> str:
        name = f"components/iteration-{iteration:02d}.json"
        save_fcm(fcm, run_path / name)
        return name

    state = LoopState(current_fcm=initial_fcm)
    for _ in range(config.max_iterations):
        state = agentic_iterate(state, source, llm, config, persist_component)
        with journal_path.open("a", encoding="utf-8") as handle:
            handle.write(canonical_json_bytes(state.history[-1].to_dict()).decode("utf-8"))
        if _is_stable(state.history, config.stable_stop):
            log.info(
                "attractor unchanged for %d consecutive iterations; stopping",
                config.stable_stop,
            )
            break
    save_fcm(state.current_fcm, run_path / FINAL_NAME)
    return state


def read_journal(run_dir) -> list[IterationRecord]:
    journal_path = Path(run_dir) / JOURNAL_NAME
    records = []
    for line in journal_path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(IterationRecord.from_dict(json.loads(line)))
    return records


def replay_journal(run_dir) -> Fcm:
    """Rebuild the final FCM by re-applying every successful mix in order."""
    run_path = Path(run_dir)
    current = load_fcm(run_path / INITIAL_NAME)
    for record in read_journal(run_path):
        if record.status != STATUS_OK or record.component_file is None:
            continue
        component = load_fcm(run_path / record.component_file)
        if record.component_digest and content_digest(component) != record.component_digest:
            raise InputError(
                f"component {record.component_file} digest mismatch; artifacts edited?"
            )
        weight = record.mix_weight if record.mix_weight is not None else 0.5
        current = mix(
            MixSpec(components=(current, component), weights=(1.0 - weight, weight))
        )
    return current


def run_loop_from_dir(initial_fcm: Fcm, corpus_dir, llm, config: LoopConfig, run_dir) -> LoopState:
    return run_loop(initial_fcm, LocalDirectorySource(corpus_dir), llm, config, run_dir)
