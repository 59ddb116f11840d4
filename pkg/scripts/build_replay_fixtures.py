#!/usr/bin/env python3
"""Author the committed extraction and loop fixtures.

Writes:
  fixtures/docs/hallucination.txt        source paragraph for extraction
  fixtures/corpus/*.txt                  three-document loop corpus
  fixtures/transcripts/*.txt             recorded exchanges, replayable by hash
  fixtures/fcms/hallucination-5node.json extraction result (5 nodes, 6 edges)
  fixtures/loop_run/                     committed 3-iteration loop run

The responder below plays the language model: it recognizes which stage is
being asked for, looks the document up by its text, and answers in the strict
record formats. Recording those answers once gives the hash-keyed transcripts
that every test replays afterwards; nothing at test time invents content.

Run from the repository root:  python3 scripts/build_replay_fixtures.py
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from fcmkit import (  # noqa: E402
    LoopConfig,
    RecordingProvider,
    ScriptedProvider,
    document_from_text,
    extract_fcm,
    fcm_to_bytes,
    load_fcm,
    replay_journal,
    run_loop_from_dir,
    save_fcm,
)

DOCS_DIR = ROOT / "fixtures" / "docs"
CORPUS_DIR = ROOT / "fixtures" / "corpus"
TRANSCRIPTS_DIR = ROOT / "fixtures" / "transcripts"
FCMS_DIR = ROOT / "fixtures" / "fcms"
LOOP_RUN_DIR = ROOT / "fixtures" / "loop_run"

HALLUCINATION_TEXT = (
    "Large language models such as ChatGPT often invent facts with total"
    " confidence, a failure known as an AI hallucination. It rarely cites any"
    " source for the claims that it makes. The lack of citations in ChatGPT's"
    " answers makes it difficult to discern truth from misinformation."
    " Hallucinated answers spread misinformation across the internet, and"
    " misinformation on the internet feeds back into training text, so"
    " chatbots come to hallucinate even more. Every fabricated answer deepens"
    " the difficulty of discerning truth, and the spread of misinformation"
    " online deepens it further. Malicious actors exploit the same weakness:"
    " they seed the internet with invented stories dressed up as news.\n"
)

FACT_CHECKING_TEXT = (
    "Professional fact checking cuts down misinformation on the internet. A"
    " rising tide of misinformation on the internet provokes more fact"
    " checking.\n"
)

MEDIA_LITERACY_TEXT = (
    "Media literacy teaches readers to spot the lack of citations in a claim,"
    " to flag malicious actor activity behind planted stories, and to weigh"
    " the truth of those stories. Readers schooled in media literacy struggle"
    " less to tell true claims from planted ones. Readers with strong media"
    " literacy do more verification work of their own, and verification work"
    " in turn spreads media literacy.\n"
)

CURRICULUM_TEXT = (
    "School curricula that fund media literacy programs raise media literacy"
    " across whole communities.\n"
)

# Canned analysis per document: step-1 noun mentions, step-2 node labels with
# their source nouns, and step-3 causal judgements keyed by ordered label pair.
SCRIPTS = {
    "hallucination": {
        "text": HALLUCINATION_TEXT,
        "nouns": [
            (0, "large language models", "-"),
            (0, "ChatGPT", "-"),
            (0, "facts", "-"),
            (0, "AI hallucination", "-"),
            (1, "ChatGPT", "It"),
            (1, "source", "-"),
            (1, "claims", "-"),
            (2, "lack of citations", "-"),
            (2, "ChatGPT's answers", "-"),
            (2, "truth", "-"),
            (2, "misinformation", "-"),
            (3, "hallucinated answers", "-"),
            (3, "misinformation on the internet", "-"),
            (3, "training text", "-"),
            (3, "chatbots", "-"),
            (4, "fabricated answer", "-"),
            (4, "difficulty of discerning truth", "-"),
            (4, "spread of misinformation", "-"),
            (5, "malicious actors", "-"),
            (5, "weakness", "-"),
            (5, "the internet", "-"),
            (5, "invented stories", "-"),
            (5, "news", "-"),
        ],
        "nodes": [
            ("AI Hallucinations", "AI hallucination"),
            ("Lack of Citations", "lack of citations"),
            ("Misinformation on the Internet", "misinformation on the internet"),
            ("Malicious Actor Activity", "malicious actors"),
            ("Difficulty discerning truth", "difficulty of discerning truth"),
        ],
        "edges": {
            ("AI Hallucinations", "Misinformation on the Internet"): (
                "+", "0.75", "spread",
                "Hallucinated answers spread misinformation across the internet",
            ),
            ("AI Hallucinations", "Difficulty discerning truth"): (
                "+", "0.5", "deepens",
                "Every fabricated answer deepens the difficulty of discerning truth",
            ),
            ("Lack of Citations", "Difficulty discerning truth"): (
                "-", "0.75", "makes it difficult",
                "The lack of citations in ChatGPT's answers makes it difficult"
                " to discern truth from misinformation",
            ),
            ("Misinformation on the Internet", "AI Hallucinations"): (
                "+", "0.75", "feeds back",
                "misinformation on the internet feeds back into training text,"
                " so chatbots come to hallucinate even more",
            ),
            ("Misinformation on the Internet", "Difficulty discerning truth"): (
                "+", "0.5", "deepens",
                "the spread of misinformation online deepens it further",
            ),
            ("Malicious Actor Activity", "Misinformation on the Internet"): (
                "+", "0.5", "seed",
                "they seed the internet with invented stories dressed up as news",
            ),
        },
    },
    "fact-checking": {
        "text": FACT_CHECKING_TEXT,
        "nouns": [
            (0, "fact checking", "-"),
            (0, "misinformation on the internet", "-"),
            (1, "misinformation on the internet", "-"),
            (1, "fact checking", "-"),
        ],
        "nodes": [
            ("Fact Checking", "fact checking"),
            ("Misinformation on the Internet", "misinformation on the internet"),
        ],
        "edges": {
            ("Fact Checking", "Misinformation on the Internet"): (
                "-", "1.0", "cuts down",
                "Professional fact checking cuts down misinformation on the internet",
            ),
            ("Misinformation on the Internet", "Fact Checking"): (
                "+", "1.0", "provokes",
                "A rising tide of misinformation on the internet provokes more"
                " fact checking",
            ),
        },
    },
    "media-literacy": {
        "text": MEDIA_LITERACY_TEXT,
        "nouns": [
            (0, "media literacy", "-"),
            (0, "readers", "-"),
            (0, "lack of citations", "-"),
            (0, "malicious actor activity", "-"),
            (0, "planted stories", "-"),
            (1, "struggle", "-"),
            (2, "verification work", "-"),
        ],
        "nodes": [
            ("Media Literacy", "media literacy"),
            ("Fact Checking", "verification work"),
            ("Difficulty discerning truth", "struggle"),
        ],
        "edges": {
            ("Media Literacy", "Fact Checking"): (
                "+", "1.0", "do more",
                "Readers with strong media literacy do more verification work"
                " of their own",
            ),
            ("Fact Checking", "Media Literacy"): (
                "+", "1.0", "spreads",
                "verification work in turn spreads media literacy",
            ),
            ("Media Literacy", "Difficulty discerning truth"): (
                "-", "0.75", "struggle less",
                "Readers schooled in media literacy struggle less to tell true"
                " claims from planted ones",
            ),
        },
    },
    "curriculum": {
        "text": CURRICULUM_TEXT,
        "nouns": [
            (0, "school curricula", "-"),
            (0, "media literacy", "-"),
            (0, "communities", "-"),
        ],
        "nodes": [
            ("School Curricula", "school curricula"),
            ("Media Literacy", "media literacy"),
        ],
        "edges": {
            ("School Curricula", "Media Literacy"): (
                "+", "0.75", "raise",
                "School curricula that fund media literacy programs raise"
                " media literacy across whole communities",
            ),
        },
    },
}


def respond(request) -> str:
    """Play the language model for the documents above."""
    script = None
    for candidate in SCRIPTS.values():
        if candidate["text"].strip() in request.user_content:
            script = candidate
            break
    if script is None:
        raise AssertionError("request does not mention any scripted document")

    system = request.system_instruction
    if system.startswith("You read one document"):
        return "\n".join(
            f"NOUN\t{index}\t{surface}\t{pronoun}"
            for index, surface, pronoun in script["nouns"]
        )
    if system.startswith("You decide which of the listed noun candidates"):
        return "\n".join(
            f"NODE\t{label}\t{noun}" for label, noun in script["nodes"]
        )
    if system.startswith("You decide, for each ordered pair"):
        lines = []
        for pair in _pairs_in_request(request.user_content):
            judgement = script["edges"].get(pair)
            if judgement is None:
                lines.append(f"NONE\t{pair[0]}\t{pair[1]}")
            else:
                sign, magnitude, verb, quote = judgement
                lines.append(
                    f"EDGE\t{pair[0]}\t{pair[1]}\t{sign}\t{magnitude}\t{verb}\t{quote}"
                )
        return "\n".join(lines)
    raise AssertionError(f"unrecognized stage instructions: {system[:60]!r}")


def _pairs_in_request(user_content: str) -> list[tuple[str, str]]:
    pairs = []
    in_pairs = False
    for line in user_content.splitlines():
        if line.strip() == "Pairs:":
            in_pairs = True
            continue
        if in_pairs:
            if not line.startswith("- "):
                break
            source, _, target = line[2:].partition(" -> ")
            pairs.append((source, target))
    if not pairs:
        raise AssertionError("no pair list found in request")
    return pairs


def write_documents() -> None:
    DOCS_DIR.mkdir(parents=True, exist_ok=True)
    CORPUS_DIR.mkdir(parents=True, exist_ok=True)
    (DOCS_DIR / "hallucination.txt").write_text(HALLUCINATION_TEXT, encoding="utf-8")
    (CORPUS_DIR / "fact-checking.txt").write_text(FACT_CHECKING_TEXT, encoding="utf-8")
    (CORPUS_DIR / "media-literacy.txt").write_text(MEDIA_LITERACY_TEXT, encoding="utf-8")
    (CORPUS_DIR / "curriculum.txt").write_text(CURRICULUM_TEXT, encoding="utf-8")


def build_extraction_fixture(llm) -> None:
    doc = document_from_text(
        (DOCS_DIR / "hallucination.txt").read_text(encoding="utf-8"),
        title="hallucination.txt",
    )
    fcm, artifacts = extract_fcm(doc, llm)
    assert fcm.n == 5, fcm.labels
    assert fcm.edges.nonzero_count() == 6
    assert "Malicious Actor Activity" in fcm.labels
    assert not artifacts.rejected_edges, artifacts.rejected_edges
    assert any(c.resolved_from_pronoun == "It" for c in artifacts.nouns)
    index = {label: i for i, label in enumerate(fcm.labels)}
    weight = fcm.edges.weights[
        index["Lack of Citations"], index["Difficulty discerning truth"]
    ]
    assert weight == -0.75, weight
    FCMS_DIR.mkdir(parents=True, exist_ok=True)
    save_fcm(fcm, FCMS_DIR / "hallucination-5node.json")
    print(f"hallucination-5node.json: {fcm.n} nodes, {fcm.edges.nonzero_count()} edges")


def build_loop_fixture(llm) -> None:
    if LOOP_RUN_DIR.exists():
        shutil.rmtree(LOOP_RUN_DIR)
    initial = load_fcm(FCMS_DIR / "hallucination-5node.json")
    config = LoopConfig(max_iterations=3)
    state = run_loop_from_dir(initial, CORPUS_DIR, llm, config, LOOP_RUN_DIR)

    statuses = [record.status for record in state.history]
    titles = [record.doc_title for record in state.history]
    assert statuses == ["ok", "ok", "ok"], statuses
    assert titles == ["fact-checking.txt", "media-literacy.txt", "curriculum.txt"], titles
    assert state.history[1].query_fallback, "iteration 2 should hit the fallback query"
    assert state.current_fcm.n == 8, state.current_fcm.labels

    replayed = replay_journal(LOOP_RUN_DIR)
    committed = (LOOP_RUN_DIR / "final.json").read_bytes()
    assert fcm_to_bytes(replayed) == committed, "journal replay drifted"
    for record in state.history:
        print(
            f"iteration {record.iteration}: {record.status} {record.doc_title}"
            f" fallback={record.query_fallback}"
        )
    print(f"final FCM: {state.current_fcm.n} nodes; journal replay byte-identical")


def main() -> None:
    write_documents()
    if TRANSCRIPTS_DIR.exists():
        shutil.rmtree(TRANSCRIPTS_DIR)
    llm = RecordingProvider(ScriptedProvider(respond), TRANSCRIPTS_DIR)
    build_extraction_fixture(llm)
    build_loop_fixture(llm)
    count = len(list(TRANSCRIPTS_DIR.glob("*.txt")))
    print(f"recorded {count} transcripts")


if __name__ == "__main__":
    main()
