"""Core value types: concept nodes, edge matrices, states, squashers, FCMs.

All types are immutable once constructed and safe to share across threads.
An FCM is a directed weighted graph: nodes are causal concepts, the edge
matrix entry ``weights[i, j]`` is the signed degree in [-1, 1] to which
node i drives node j, and 0 means no edge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import InputError, ShapeError

TOOL_VERSION = "0.1.0"

HARD_THRESHOLD = "hard-threshold"
LOGISTIC = "logistic"
CLAMPED_LINEAR = "clamped-linear"
SQUASHER_KINDS = (HARD_THRESHOLD, LOGISTIC, CLAMPED_LINEAR)

FIXED_POINT = "fixed-point"
LIMIT_CYCLE = "limit-cycle"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class ConceptNode:
    """A causal variable: a noun phrase with an activation in [0, 1]."""

    id: str
    label: str
    evidence: str | None = None

    def __post_init__(self):
        if not self.id:
            raise InputError("node id must be non-empty")
        if not self.label.strip():
            raise InputError("node label must be non-empty after trimming")


@dataclass(frozen=True)
class EdgeAnnotation:
    """Textual justification attached to one directed edge."""

    evidence_quote: str | None = None
    trigger_verb: str | None = None


class EdgeMatrix:
    """Square matrix of causal weights; row = cause, column = effect.

    The backing array is copied on construction and marked read-only.
    """

    def __init__(self, weights):
        arr = np.array(weights, dtype=np.float64, order="C")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeError(f"edge matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("edge weights must be finite")
        if np.any(arr < -1.0) or np.any(arr > 1.0):
            raise InputError("edge weights must lie in [-1, 1]")
        arr.setflags(write=False)
        self._weights = arr

    @property
    def n(self) -> int:
        return self._weights.shape[0]

    @property
    def weights(self) -> np.ndarray:
        """Read-only (n, n) float64 array."""
        return self._weights

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self._weights))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeMatrix):
            return NotImplemented
        return self._weights.shape == other._weights.shape and bool(
            np.array_equal(self._weights, other._weights)
        )

    def __repr__(self) -> str:
        return f"EdgeMatrix(n={self.n}, nonzero={self.nonzero_count()})"


@dataclass(frozen=True)
class StateVector:
    """Per-node activation in [0, 1] at discrete time step t."""

    values: tuple[float, ...]
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.t < 0:
            raise InputError("time step must be nonnegative")
        for v in self.values:
            if not (0.0 <= v <= 1.0):
                raise InputError(f"state component {v!r} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64)

    def is_binary(self) -> bool:
        return all(v in (0.0, 1.0) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Squasher:
    """Nonlinearity bounding node activations to [0, 1] after the weighted sum.

    hard-threshold outputs exactly 0 or 1 and uses a strict inequality:
    a node with net input equal to the threshold goes inactive.
    """

    kind: str
    threshold: float = 0.0
    steepness: float = 5.0

    def __post_init__(self):
        if self.kind not in SQUASHER_KINDS:
            raise InputError(f"unknown squasher kind {self.kind!r}")
        if not np.isfinite(self.threshold):
            raise InputError("threshold must be finite")
        if self.kind == LOGISTIC and not self.steepness > 0:
            raise InputError("logistic steepness must be positive")

    @classmethod
    def hard_threshold(cls, threshold: float = 0.0) -> "Squasher":
        return cls(HARD_THRESHOLD, threshold=threshold)

    @classmethod
    def logistic(cls, steepness: float = 5.0) -> "Squasher":
        return cls(LOGISTIC, steepness=steepness)

    @classmethod
    def clamped_linear(cls) -> "Squasher":
        return cls(CLAMPED_LINEAR)


@dataclass(frozen=True)
class Provenance:
    """Where an FCM came from. Deterministic producers leave created_at empty."""

    source: str = ""
    doc_id: str | None = None
    template_hashes: tuple[tuple[str, str], ...] = ()
    transcript_hash: str | None = None
    created_at: str = ""
    tool_version: str = TOOL_VERSION


@dataclass(frozen=True, eq=False)
class Fcm:
    """A labeled concept-node list plus its square edge matrix.

    edge_annotations maps (source_id, target_id) to the quote and verb that
    justified the edge; only nonzero edges may carry an annotation.
    """

    nodes: tuple[ConceptNode, ...]
    edges: EdgeMatrix
    provenance: Provenance = field(default_factory=Provenance)
    edge_annotations: dict[tuple[str, str], EdgeAnnotation] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if self.edges.n != len(self.nodes):
            raise ShapeError(
                f"edge matrix is {self.edges.n}x{self.edges.n} but there are {len(self.nodes)} nodes"
            )
        ids = [node.id for node in self.nodes]
        if len(set(ids)) != len(ids):
            raise InputError("node ids must be unique within one FCM")
        index = {node_id: i for i, node_id in enumerate(ids)}
        for source_id, target_id in self.edge_annotations:
            if source_id not in index or target_id not in index:
                raise InputError(
                    f"annotation references unknown edge ({source_id!r}, {target_id!r})"
                )
            if self.edges.weights[index[source_id], index[target_id]] == 0.0:
                raise InputError(
                    f"annotation on zero-weight edge ({source_id!r}, {target_id!r})"
                )
        object.__setattr__(
            self, "edge_annotations", MappingProxyType(dict(self.edge_annotations))
        )

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(node.label for node in self.nodes)

    def label_index(self) -> dict[str, int]:
        return {node.label: i for i, node in enumerate(self.nodes)}

    def node_by_id(self, node_id: str) -> ConceptNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise InputError(f"no node with id {node_id!r}")

    @property
    def is_reproducible(self) -> bool:
        """True when provenance carries a transcript hash linking back to source text."""
        return self.provenance.transcript_hash is not None

    def __repr__(self) -> str:
        return f"Fcm(n={self.n}, edges={self.edges.nonzero_count()})"


@dataclass(frozen=True)
class EquilibriumClassification:
    """Where a trajectory ended up: fixed point, K-step limit cycle, or unresolved.

    For a limit cycle, cycle_states holds the K repeating states in order and
    one update step maps cycle_states[i] to cycle_states[(i+1) % K]. For an
    unresolved run (step budget exhausted before any recurrence) period is 0
    and cycle_states is empty.
    """

    kind: str
    period: int
    cycle_states: tuple[StateVector, ...]
    transient_length: int

    def __post_init__(self):
        object.__setattr__(self, "cycle_states", tuple(self.cycle_states))
        if self.kind == FIXED_POINT and (self.period != 1 or len(self.cycle_states) != 1):
            raise InputError("fixed point requires period 1 and a single cycle state")
        if self.kind == LIMIT_CYCLE and (self.period < 2 or len(self.cycle_states) != self.period):
            raise InputError("limit cycle requires period > 1 matching cycle_states length")
        if self.kind == UNRESOLVED and self.period != 0:
            raise InputError("unresolved classification carries period 0")
        if self.kind not in (FIXED_POINT, LIMIT_CYCLE, UNRESOLVED):
            raise InputError(f"unknown classification kind {self.kind!r}")

    @property
    def resolved(self) -> bool:
        return self.kind != UNRESOLVED

    def describe(self) -> str:
        if self.kind == FIXED_POINT:
            return f"fixed point (transient {self.transient_length})"
        if self.kind == LIMIT_CYCLE:
            return f"limit cycle, period {self.period} (transient {self.transient_length})"
        return "unresolved (step budget exhausted)"


_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(label: str) -> str:
    """Lowercase alphanumeric-and-hyphen identifier derived from a label."""
    slug = _SLUG_RE.sub("-", label.casefold()).strip("-")
    return slug or "node"


def nodes_from_labels(
    labels, evidence: dict[str, str] | None = None
) -> tuple[ConceptNode, ...]:
    """Build nodes with deterministic slug ids; collisions get numeric suffixes."""
    seen: dict[str, int] = {}
    nodes = []
    for label in labels:
        base = slugify(label)
        count = seen.get(base, 0)
        seen[base] = count + 1
        node_id = base if count == 0 else f"{base}-{count + 1}"
        ev = (evidence or {}).get(label)
        nodes.append(ConceptNode(id=node_id, label=label, evidence=ev))
    return tuple(nodes)
