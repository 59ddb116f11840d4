"""Convex mixing of FCMs over the union of their node sets.

Component edge matrices are zero-padded onto the union node set and
combined with convex weights; the result is again a valid FCM because
[-1, 1] is closed under convex combination. Node identity across
components is canonical-label equality (trim, collapse whitespace,
casefold), optionally widened by a caller-supplied alias map.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .model import ConceptNode, EdgeAnnotation, EdgeMatrix, Fcm, Provenance

WEIGHT_SUM_TOLERANCE = 1e-12

_WS_RE = re.compile(r"\s+")


def canonicalize_label(label: str) -> str:
    """Trim, collapse internal whitespace, and casefold."""
    return _WS_RE.sub(" ", label.strip()).casefold()


@dataclass(frozen=True)
class NodeAlignment:
    """Union node set plus, per component, a local-index -> union-index map.

    Union order is first appearance across components in input order; each
    union position keeps the id, label, and evidence of the node that
    introduced it (ids deduplicated with numeric suffixes on collision).
    """

    union_labels: tuple[str, ...]
    union_nodes: tuple[ConceptNode, ...]
    per_component_index_map: tuple[dict[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.union_labels)


@dataclass(frozen=True)
class MixSpec:
    """Component FCMs with convex weights (nonnegative, summing to one)."""

    components: tuple[Fcm, ...]
    weights: tuple[float, ...]
    aliases: dict[str, str] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.components) < 1:
            raise InputError("mixing requires at least one component")
        if len(self.weights) != len(self.components):
            raise InputError(
                f"{len(self.components)} components but {len(self.weights)} weights; "
                "weights are not renormalized"
            )
        if any(w < 0 for w in self.weights):
            raise InputError("mixing weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise InputError(f"mixing weights must sum to 1, got {sum(self.weights)!r}")


def _canonical(label: str, aliases: dict[str, str] | None) -> str:
    canon = canonicalize_label(label)
    if aliases:
        canon = aliases.get(canon, canon)
    return canon


def align_nodes(components, aliases: dict[str, str] | None = None) -> NodeAlignment:
    """Union the component node sets, ordered by first appearance.

    Two nodes are the same concept iff their canonicalized labels match
    (after applying the optional alias map). A duplicate canonical label
    inside a single component is rejected: it would make the local -> union
    mapping ambiguous.
    """
    if aliases is not None:
        aliases = {canonicalize_label(k): canonicalize_label(v) for k, v in aliases.items()}
    union_labels: list[str] = []
    union_nodes: list[ConceptNode] = []
    position: dict[str, int] = {}
    used_ids: set[str] = set()
    maps: list[dict[int, int]] = []
    for k, fcm in enumerate(components):
        local_seen: set[str] = set()
        index_map: dict[int, int] = {}
        for i, node in enumerate(fcm.nodes):
            canon = _canonical(node.label, aliases)
            if canon in local_seen:
                raise InputError(
                    f"component {k} has duplicate canonical label {canon!r}"
                )
            local_seen.add(canon)
            if canon not in position:
                node_id = node.id
                suffix = 2
                while node_id in used_ids:
                    node_id = f"{node.id}-{suffix}"
                    suffix += 1
                used_ids.add(node_id)
                position[canon] = len(union_labels)
                union_labels.append(canon)
                union_nodes.append(
                    ConceptNode(id=node_id, label=node.label, evidence=node.evidence)
                )
            index_map[i] = position[canon]
        maps.append(index_map)
    return NodeAlignment(
        union_labels=tuple(union_labels),
        union_nodes=tuple(union_nodes),
        per_component_index_map=tuple(maps),
    )


def zero_pad(edges: EdgeMatrix, index_map: dict[int, int], n_union: int) -> EdgeMatrix:
    """Embed an edge matrix into the union-sized matrix; absent nodes get zero rows/columns."""
    if n_union < edges.n:
        raise InputError(f"union size {n_union} smaller than component size {edges.n}")
    targets = list(index_map.values())
    if len(set(targets)) != len(targets):
        raise InputError("index map must be injective")
    if any(not (0 <= u < n_union) for u in targets):
        raise InputError("index map target out of range")
    if len(index_map) != edges.n:
        raise InputError(f"index map covers {len(index_map)} of {edges.n} local nodes")

    padded = np.zeros((n_union, n_union), dtype=np.float64)
    local = np.array([index_map[i] for i in range(edges.n)], dtype=np.intp)
    padded[np.ix_(local, local)] = edges.weights
    return EdgeMatrix(padded)


def mix(spec: MixSpec) -> Fcm:
    """Convex combination of zero-padded component edge matrices.

    The result's node order is the union order (first appearance across
    components in input order); dynamics are invariant under consistent
    relabeling, so component input order only affects node positions, not
    behavior.
    """
    alignment = align_nodes(spec.components, spec.aliases)
    n = alignment.size
    combined = np.zeros((n, n), dtype=np.float64)
    for fcm, weight, index_map in zip(
        spec.components, spec.weights, alignment.per_component_index_map
    ):
        combined += weight * zero_pad(fcm.edges, index_map, n).weights
    # Convexity keeps weights in [-1, 1]; clip only float residue at the rim.
    np.clip(combined, -1.0, 1.0, out=combined)

    # Annotations carry over where the mixed edge survives: first component
    # (in input order) with a nonzero local weight and an annotation wins.
    annotations: dict[tuple[str, str], EdgeAnnotation] = {}
    for fcm, index_map in zip(spec.components, alignment.per_component_index_map):
        local_index = {node.id: i for i, node in enumerate(fcm.nodes)}
        for (src_id, dst_id), note in fcm.edge_annotations.items():
            i, j = local_index[src_id], local_index[dst_id]
            key = (
                alignment.union_nodes[index_map[i]].id,
                alignment.union_nodes[index_map[j]].id,
            )
            if combined[index_map[i], index_map[j]] != 0.0 and key not in annotations:
                annotations[key] = note

    weight_desc = ", ".join(f"{w:.6f}" for w in spec.weights)
    component_desc = "; ".join(
        f"{fcm.n} nodes/{fcm.edges.nonzero_count()} edges" for fcm in spec.components
    )
    provenance = Provenance(
        source=f"mix of {len(spec.components)} FCMs ({component_desc}) with weights [{weight_desc}]",
    )
    return Fcm(
        nodes=alignment.union_nodes,
        edges=EdgeMatrix(combined),
        provenance=provenance,
        edge_annotations=annotations,
    )
