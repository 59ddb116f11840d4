"""Durable, versioned, bit-stable serialization of FCMs and trajectories.

Files are canonical JSON: keys sorted, numbers rendered with a fixed
six-decimal format, no insignificant whitespace. Two semantically equal
FCMs therefore serialize to byte-identical files. Writes go through a
temp-file-then-rename step so concurrent readers never observe a partial
file.

Note the canonical number format quantizes to six decimal places. Weights
produced by extraction or by convex mixing with six-decimal mix weights
survive a round trip exactly; arbitrary floats are rounded once, after
which save/load is idempotent.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InputError, IoError, ParseError, SchemaError, ShapeError
from .model import (
    ConceptNode,
    EdgeAnnotation,
    EdgeMatrix,
    EquilibriumClassification,
    Fcm,
    Provenance,
    StateVector,
)

SCHEMA_VERSION = 1
SUPPORTED_SCHEMA_VERSIONS = (1,)


def format_number(x: float) -> str:
    """Fixed six-decimal rendering; negative zero collapses to zero."""
    value = float(x)
    if value == 0.0:
        value = 0.0
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _canonical_fragment(obj, out: list) -> None:
    if obj is None or obj is True or obj is False:
        out.append(json.dumps(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_number(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for k, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise InputError(f"canonical JSON keys must be strings, got {key!r}")
            if k:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _canonical_fragment(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(",")
            _canonical_fragment(item, out)
        out.append("]")
    else:
        raise InputError(f"cannot canonicalize value of type {type(obj).__name__}")


def canonical_json_bytes(obj) -> bytes:
    """Canonical UTF-8 JSON: sorted keys, fixed number format, trailing newline."""
    out: list = []
    _canonical_fragment(obj, out)
    out.append("\n")
    return "".join(out).encode("utf-8")


def atomic_write_bytes(path, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers see whole files."""
    target = Path(path)
    try:
        fd, tmp_name = tempfile.mkstemp(
            dir=target.parent, prefix=target.name + ".", suffix=".tmp"
        )
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, target)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise
    except OSError as exc:
        raise IoError(f"cannot write {target}: {exc}") from exc


def fcm_document(fcm: Fcm) -> dict:
    nodes = [
        {"id": node.id, "label": node.label, "evidence": node.evidence}
        for node in fcm.nodes
    ]
    edges = []
    weights = fcm.edges.weights
    for i in range(fcm.n):
        for j in range(fcm.n):
            w = weights[i, j]
            if w == 0.0:
                continue
            key = (fcm.nodes[i].id, fcm.nodes[j].id)
            note = fcm.edge_annotations.get(key)
            edges.append(
                {
                    "source_id": key[0],
                    "target_id": key[1],
                    "weight": float(w),
                    "evidence_quote": note.evidence_quote if note else None,
                    "trigger_verb": note.trigger_verb if note else None,
                }
            )
    return {
        "schema_version": SCHEMA_VERSION,
        "nodes": nodes,
        "edges": edges,
        "provenance": {
            "source": fcm.provenance.source,
            "doc_id": fcm.provenance.doc_id,
            "template_hashes": [list(pair) for pair in fcm.provenance.template_hashes],
            "transcript_hash": fcm.provenance.transcript_hash,
            "created_at": fcm.provenance.created_at,
            "tool_version": fcm.provenance.tool_version,
        },
    }


def fcm_to_bytes(fcm: Fcm) -> bytes:
    return canonical_json_bytes(fcm_document(fcm))


def canonical_content_bytes(fcm: Fcm) -> bytes:
    """Canonical bytes of nodes, edges, and annotations only.

    Excludes provenance, so it compares what a mixed or re-derived FCM
    computes rather than where it came from.
    """
    doc = fcm_document(fcm)
    return canonical_json_bytes({"nodes": doc["nodes"], "edges": doc["edges"]})


def content_digest(fcm: Fcm) -> str:
    return hashlib.sha256(canonical_content_bytes(fcm)).hexdigest()


def save_fcm(fcm: Fcm, path) -> None:
    atomic_write_bytes(path, fcm_to_bytes(fcm))


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def _parse_provenance(raw) -> Provenance:
    if raw is None:
        return Provenance()
    _require(isinstance(raw, dict), "provenance must be an object")
    template_hashes = raw.get("template_hashes") or []
    _require(
        isinstance(template_hashes, list)
        and all(
            isinstance(pair, (list, tuple))
            and len(pair) == 2
            and all(isinstance(part, str) for part in pair)
            for pair in template_hashes
        ),
        "template_hashes must be a list of [name, hash] pairs",
    )
    for field_name in ("source", "created_at", "tool_version"):
        value = raw.get(field_name, "")
        _require(isinstance(value, str), f"provenance.{field_name} must be a string")
    for field_name in ("doc_id", "transcript_hash"):
        value = raw.get(field_name)
        _require(
            value is None or isinstance(value, str),
            f"provenance.{field_name} must be a string or null",
        )
    return Provenance(
        source=raw.get("source", ""),
        doc_id=raw.get("doc_id"),
        template_hashes=tuple((pair[0], pair[1]) for pair in template_hashes),
        transcript_hash=raw.get("transcript_hash"),
        created_at=raw.get("created_at", ""),
        tool_version=raw.get("tool_version", ""),
    )


def fcm_from_document(doc) -> Fcm:
    """Validate a parsed JSON document and build the Fcm."""
    _require(isinstance(doc, dict), "top-level value must be an object")
    version = doc.get("schema_version")
    if version not in SUPPORTED_SCHEMA_VERSIONS:
        supported = ", ".join(str(v) for v in SUPPORTED_SCHEMA_VERSIONS)
        raise SchemaError(
            f"unsupported schema_version {version!r}; supported versions: {supported}"
        )
    raw_nodes = doc.get("nodes")
    _require(isinstance(raw_nodes, list) and raw_nodes, "nodes must be a non-empty list")
    nodes = []
    for entry in raw_nodes:
        _require(isinstance(entry, dict), "each node must be an object")
        _require(
            isinstance(entry.get("id"), str) and isinstance(entry.get("label"), str),
            "node id and label must be strings",
        )
        evidence = entry.get("evidence")
        _require(
            evidence is None or isinstance(evidence, str),
            "node evidence must be a string or null",
        )
        try:
            nodes.append(ConceptNode(id=entry["id"], label=entry["label"], evidence=evidence))
        except InputError as exc:
            raise SchemaError(str(exc)) from exc

    index: dict[str, int] = {}
    for i, node in enumerate(nodes):
        _require(node.id not in index, f"duplicate node id {node.id!r}")
        index[node.id] = i

    raw_edges = doc.get("edges", [])
    _require(isinstance(raw_edges, list), "edges must be a list")
    matrix = np.zeros((len(nodes), len(nodes)), dtype=np.float64)
    annotations: dict[tuple[str, str], EdgeAnnotation] = {}
    seen_pairs: set[tuple[str, str]] = set()
    for entry in raw_edges:
        _require(isinstance(entry, dict), "each edge must be an object")
        source_id, target_id = entry.get("source_id"), entry.get("target_id")
        _require(
            isinstance(source_id, str) and isinstance(target_id, str),
            "edge endpoints must be node id strings",
        )
        _require(source_id in index, f"edge source {source_id!r} is not a node id")
        _require(target_id in index, f"edge target {target_id!r} is not a node id")
        pair = (source_id, target_id)
        _require(pair not in seen_pairs, f"duplicate edge entry for {pair!r}")
        seen_pairs.add(pair)
        weight = entry.get("weight")
        _require(
            isinstance(weight, (int, float)) and not isinstance(weight, bool),
            "edge weight must be a number",
        )
        matrix[index[source_id], index[target_id]] = float(weight)
        quote, verb = entry.get("evidence_quote"), entry.get("trigger_verb")
        _require(
            (quote is None or isinstance(quote, str))
            and (verb is None or isinstance(verb, str)),
            "edge evidence_quote and trigger_verb must be strings or null",
        )
        if quote is not None or verb is not None:
            annotations[pair] = EdgeAnnotation(evidence_quote=quote, trigger_verb=verb)

    provenance = _parse_provenance(doc.get("provenance"))
    try:
        return Fcm(
            nodes=tuple(nodes),
            edges=EdgeMatrix(matrix),
            provenance=provenance,
            edge_annotations=annotations,
        )
    except (InputError, ShapeError) as exc:
        raise SchemaError(str(exc)) from exc


def load_fcm(path) -> Fcm:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return fcm_from_document(doc)


def export_trajectory(
    states: list[StateVector],
    classification: EquilibriumClassification,
    labels,
    path,
) -> None:
    """CSV of activations (header = node labels) plus a JSON metadata sidecar."""
    if not states:
        raise InputError("cannot export an empty trajectory")
    labels = list(labels)
    if any(len(state) != len(labels) for state in states):
        raise ShapeError("every state must have one value per label")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(labels)
    for state in states:
        writer.writerow(format_number(v) for v in state.values)
    atomic_write_bytes(path, buffer.getvalue().encode("utf-8"))

    sidecar = {
        "kind": classification.kind,
        "period": classification.period,
        "transient_length": classification.transient_length,
        "steps": len(states),
    }
    atomic_write_bytes(str(path) + ".meta.json", canonical_json_bytes(sidecar))
