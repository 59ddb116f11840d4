#!/usr/bin/env python3
"""Build the committed synthetic FCM fixtures and verify their properties.

Writes, under fixtures/fcms/:
  two-node-swap.json   2 nodes wired to swap activity; 3 attractors.
  concept-15node.json  15 nodes in four firing sets; period-4 cycle from
                       the committed init (first four nodes active).
  concept-20node.json  20 nodes sharing exactly 11 canonical labels with
                       the 15-node fixture; mixing the two yields 24 nodes
                       and 52 nonzero edges.

Run from the repository root:  python3 scripts/build_fixture_fcms.py
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from fcmkit import (  # noqa: E402
    EdgeMatrix,
    Fcm,
    MixSpec,
    Provenance,
    Squasher,
    StateVector,
    mix,
    nodes_from_labels,
    run_trajectory,
    save_fcm,
)
from fcmkit.mixer import canonicalize_label  # noqa: E402

OUT_DIR = ROOT / "fixtures" / "fcms"

FIRING_SETS = [
    ["Generative AI", "Human-AI Interaction", "Automation", "Information Overload"],
    ["Human Knowledge", "Experiential Learning", "Reasoning Depth", "Critical Thinking"],
    ["Trust in Information", "Misinformation on the Internet", "Education Quality",
     "Skill Development"],
    ["Social Cohesion", "Human Understanding", "Civic Engagement"],
]

SET_MAGNITUDES = [
    [0.75, 0.5, 0.5, 0.25],
    [0.75, 0.25, 0.5, 0.5],
    [0.75, 0.25, 0.5, 0.25],
    [0.5, 0.5, 0.75, 0.25],
]

LABELS_20_SHARED = [
    "Human Knowledge", "Experiential Learning", "Reasoning Depth", "Critical Thinking",
    "Trust in Information", "Misinformation on the Internet", "Education Quality",
    "Skill Development", "Generative AI", "Social Cohesion", "Human Understanding",
]
LABELS_20_NEW = [
    "Digital Literacy", "News Consumption", "Attention Span", "Scientific Progress",
    "Economic Productivity", "Job Displacement", "Policy Regulation", "Public Discourse",
    "Privacy Concerns",
]

# Ordered pairs that must appear in both matrices (same sign) or in neither,
# so the mixed nonzero count stays exact.
OVERLAP_EDGES = [
    ("Human Knowledge", "Trust in Information", 0.5),
    ("Experiential Learning", "Misinformation on the Internet", 0.5),
    ("Reasoning Depth", "Education Quality", 0.25),
    ("Critical Thinking", "Skill Development", 0.75),
]


def build_two_node_swap() -> Fcm:
    nodes = nodes_from_labels(["Node A", "Node B"])
    weights = [[0.0, 1.0], [1.0, 0.0]]
    return Fcm(
        nodes=nodes,
        edges=EdgeMatrix(weights),
        provenance=Provenance(source="hand-built fixture: two nodes that swap activity"),
    )


def build_15() -> Fcm:
    labels = [label for group in FIRING_SETS for label in group]
    n = len(labels)
    index = {label: i for i, label in enumerate(labels)}
    weights = np.zeros((n, n))
    for k, sources in enumerate(FIRING_SETS):
        targets = FIRING_SETS[(k + 1) % len(FIRING_SETS)]
        magnitudes = SET_MAGNITUDES[k]
        count = max(len(sources), len(targets))
        for slot in range(count):
            src = sources[slot % len(sources)]
            dst = targets[slot % len(targets)]
            weights[index[src], index[dst]] = magnitudes[slot % len(magnitudes)]
    return Fcm(
        nodes=nodes_from_labels(labels),
        edges=EdgeMatrix(weights),
        provenance=Provenance(
            source="hand-built fixture: four firing sets; committed init activates the"
            " first four nodes and cycles with period 4"
        ),
    )


def build_20(f15: Fcm, seed: int = 20240814) -> Fcm:
    labels = LABELS_20_SHARED + LABELS_20_NEW
    n = len(labels)
    index = {label: i for i, label in enumerate(labels)}
    weights = np.zeros((n, n))

    canon15 = {canonicalize_label(lbl) for lbl in f15.labels}
    shared_canon = {canonicalize_label(lbl) for lbl in LABELS_20_SHARED}
    assert shared_canon <= canon15 and len(shared_canon) == 11

    # Ordered pairs the 15-node fixture wires between shared labels; any of
    # them appearing here (outside the declared overlaps) would change the
    # mixed nonzero count.
    idx15 = {label: i for i, label in enumerate(f15.labels)}
    forbidden = set()
    for a in f15.labels:
        for b in f15.labels:
            if f15.edges.weights[idx15[a], idx15[b]] != 0.0:
                ca, cb = canonicalize_label(a), canonicalize_label(b)
                if ca in shared_canon and cb in shared_canon:
                    forbidden.add((ca, cb))

    used = set()
    for src, dst, magnitude in OVERLAP_EDGES:
        weights[index[src], index[dst]] = magnitude
        used.add((src, dst))
        forbidden.discard((canonicalize_label(src), canonicalize_label(dst)))

    rng = random.Random(seed)
    scale = [0.25, 0.5, 0.75, 1.0]
    while len(used) < 40:
        src, dst = rng.choice(labels), rng.choice(labels)
        if src == dst or (src, dst) in used:
            continue
        if (canonicalize_label(src), canonicalize_label(dst)) in forbidden:
            continue
        weights[index[src], index[dst]] = rng.choice(scale) * rng.choice([1.0, -1.0])
        used.add((src, dst))

    return Fcm(
        nodes=nodes_from_labels(labels),
        edges=EdgeMatrix(weights),
        provenance=Provenance(
            source="hand-built fixture: shares 11 canonical labels with the 15-node fixture"
        ),
    )


def verify(f15: Fcm, f20: Fcm) -> None:
    init = StateVector(values=tuple(1.0 if i < 4 else 0.0 for i in range(15)))
    _, classification = run_trajectory(f15, init, Squasher.hard_threshold())
    assert classification.kind == "limit-cycle", classification.describe()
    assert classification.period == 4, classification.describe()

    shared = {canonicalize_label(a) for a in f15.labels} & {
        canonicalize_label(b) for b in f20.labels
    }
    assert len(shared) == 11, len(shared)
    assert f15.edges.nonzero_count() == 16, f15.edges.nonzero_count()
    assert f20.edges.nonzero_count() == 40, f20.edges.nonzero_count()

    mixed = mix(MixSpec(components=(f15, f20), weights=(0.5, 0.5)))
    assert mixed.n == 24, mixed.n
    assert mixed.edges.nonzero_count() == 52, mixed.edges.nonzero_count()


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    swap = build_two_node_swap()
    f15 = build_15()
    f20 = build_20(f15)
    verify(f15, f20)
    save_fcm(swap, OUT_DIR / "two-node-swap.json")
    save_fcm(f15, OUT_DIR / "concept-15node.json")
    save_fcm(f20, OUT_DIR / "concept-20node.json")
    print("wrote two-node-swap.json, concept-15node.json, concept-20node.json")
    print("15-node: 16 edges, period-4 cycle from the committed init")
    print("20-node: 40 edges; mixed: 24 nodes, 52 edges")


if __name__ == "__main__":
    main()
