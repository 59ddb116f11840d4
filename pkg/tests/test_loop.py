import json
import shutil

import pytest

from fcmkit import (
    AttractorSummary,
    EdgeMatrix,
    EquilibriumClassification,
    Fcm,
    InputError,
    IterationRecord,
    LocalDirectorySource,
    LoopConfig,
    LoopState,
    ReplayProvider,
    ScriptedProvider,
    StateVector,
    content_digest,
    equilibrium_to_query,
    fcm_to_bytes,
    load_fcm,
    nodes_from_labels,
    read_journal,
    replay_journal,
    run_loop_from_dir,
)
from fcmkit.loop import attractor_summary

from test_extraction import pairs_in


def classification(kind, states, transient=0):
    period = len(states) if kind != "unresolved" else 0
    return EquilibriumClassification(
        kind=kind,
        period=period,
        cycle_states=tuple(StateVector(values=tuple(s)) for s in states),
        transient_length=transient,
    )


# ---------------------------------------------------------------- queries


def test_query_joins_active_labels_in_node_order():
    nodes = nodes_from_labels(["Alpha", "Beta", "Gamma"])
    # Gamma active in one cycle state, Alpha in the other: node order wins.
    result = equilibrium_to_query(
        classification("limit-cycle", [(0.0, 0.0, 1.0), (1.0, 0.0, 0.0)]), nodes
    )
    assert result.text == "Alpha Gamma"
    assert result.active_labels == ("Alpha", "Gamma")
    assert not result.fallback


def test_query_threshold_is_strictly_above_half():
    nodes = nodes_from_labels(["Low", "High"])
    result = equilibrium_to_query(classification("fixed-point", [(0.5, 0.51)]), nodes)
    assert result.text == "High"


def test_query_falls_back_when_nothing_is_active():
    nodes = nodes_from_labels(["Alpha", "Beta"])
    result = equilibrium_to_query(classification("fixed-point", [(0.0, 0.0)]), nodes)
    assert result.fallback
    assert result.text == "Alpha Beta"
    assert result.active_labels == ()


def test_query_falls_back_when_unresolved():
    nodes = nodes_from_labels(["Alpha", "Beta"])
    result = equilibrium_to_query(classification("unresolved", []), nodes)
    assert result.fallback and result.text == "Alpha Beta"


def test_attractor_summary_is_rotation_invariant():
    labels = ["A", "B"]
    one = attractor_summary(classification("limit-cycle", [(0, 1), (1, 0)]), labels)
    two = attractor_summary(classification("limit-cycle", [(1, 0), (0, 1)]), labels)
    assert one == two
    assert one.signature == (("A",), ("B",))
    assert AttractorSummary.from_dict(one.to_dict()) == one


# ---------------------------------------------------------------- corpus


def write_corpus(root, files):
    root.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (root / name).write_text(text, encoding="utf-8")


def test_local_source_ranks_by_token_overlap(tmp_path):
    write_corpus(
        tmp_path,
        {
            "b.txt": "apple banana",
            "a.txt": "apple banana cherry",
            "c.txt": "unrelated words entirely",
        },
    )
    source = LocalDirectorySource(tmp_path)
    assert [d.title for d in source.fetch("apple banana cherry", 3)] == [
        "a.txt",
        "b.txt",
        "c.txt",
    ]
    assert [d.title for d in source.fetch("apple banana cherry", 2)] == ["a.txt", "b.txt"]
    # overlap tie between a.txt and b.txt: filename decides
    assert source.fetch("apple", 1)[0].title == "a.txt"


def test_local_source_matching_is_case_insensitive(tmp_path):
    write_corpus(tmp_path, {"a.txt": "APPLE pie", "b.txt": "nothing shared"})
    assert LocalDirectorySource(tmp_path).fetch("apple", 1)[0].title == "a.txt"


# ---------------------------------------------------------------- config


def test_loop_config_validation():
    with pytest.raises(InputError):
        LoopConfig(mix_weight_new=0.0)
    with pytest.raises(InputError):
        LoopConfig(mix_weight_new=1.0)
    with pytest.raises(InputError):
        LoopConfig(max_iterations=0)
    with pytest.raises(InputError):
        LoopConfig(fetch_k=0)


def test_mix_weight_decay_schedule():
    flat = LoopConfig(mix_weight_new=0.5)
    assert [flat.mix_weight_at(i) for i in (1, 2, 4)] == [0.5, 0.5, 0.5]
    decayed = LoopConfig(mix_weight_new=0.5, decay_mix_weight=True)
    assert [decayed.mix_weight_at(i) for i in (1, 2, 4)] == [0.5, 0.25, 0.125]


def test_loop_state_invariant():
    fcm = Fcm(nodes=nodes_from_labels(["A"]), edges=EdgeMatrix([[0.0]]))
    with pytest.raises(InputError):
        LoopState(current_fcm=fcm, iteration=2, history=())


# ---------------------------------------------------------------- live loop


RAIN_TEXT = "Rain feeds the rivers. The rivers feed more rain."


def rain_responder(request):
    system = request.system_instruction
    if system.startswith("You read one document"):
        return (
            "NOUN\t0\tRain\t-\n"
            "NOUN\t0\trivers\t-\n"
            "NOUN\t1\trivers\t-\n"
            "NOUN\t1\train\t-"
        )
    if system.startswith("You decide which of the listed noun candidates"):
        return "NODE\tRain\tRain\nNODE\tRivers\trivers"
    answers = {
        ("Rain", "Rivers"): "EDGE\tRain\tRivers\t+\t1.0\tfeeds\tRain feeds the rivers",
        ("Rivers", "Rain"): "EDGE\tRivers\tRain\t+\t1.0\tfeed\tThe rivers feed more rain",
    }
    return "\n".join(answers[pair] for pair in pairs_in(request))


def seed_fcm():
    return Fcm(
        nodes=nodes_from_labels(["Seed One", "Seed Two"]),
        edges=EdgeMatrix([[0.0, 1.0], [1.0, 0.0]]),
    )


def test_duplicate_documents_are_skipped_and_stop_the_loop(tmp_path):
    corpus = tmp_path / "corpus"
    write_corpus(corpus, {"rain.txt": RAIN_TEXT})
    state = run_loop_from_dir(
        seed_fcm(),
        corpus,
        ScriptedProvider(rain_responder),
        LoopConfig(max_iterations=5),
        tmp_path / "run",
    )
    assert [r.status for r in state.history] == ["ok", "skipped-duplicate", "skipped-duplicate"]
    first, second, third = state.history

    assert first.doc_title == "rain.txt"
    assert first.mix_weight == 0.5
    assert first.component_file == "components/iteration-01.json"
    assert first.equilibrium_before.signature == (("Seed One", "Seed Two"),)
    assert first.equilibrium_after.signature == (
        ("Seed One", "Seed Two", "Rain", "Rivers"),
    )
    assert state.current_fcm.labels == ("Seed One", "Seed Two", "Rain", "Rivers")

    # the duplicate skips leave the model untouched and trip the stability stop
    assert second.doc_id == first.doc_id
    assert second.component_file is None and second.mix_weight is None
    assert second.fcm_digest_after == first.fcm_digest_after
    assert third.fcm_digest_after == first.fcm_digest_after
    assert second.equilibrium_before == second.equilibrium_after

    run_dir = tmp_path / "run"
    assert (run_dir / "components" / "iteration-01.json").is_file()
    assert not (run_dir / "components" / "iteration-02.json").exists()
    assert len(read_journal(run_dir)) == 3
    assert content_digest(replay_journal(run_dir)) == first.fcm_digest_after
    assert content_digest(load_fcm(run_dir / "final.json")) == first.fcm_digest_after


def test_empty_corpus_records_skips_without_mutation(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    state = run_loop_from_dir(
        seed_fcm(),
        corpus,
        ScriptedProvider(rain_responder),
        LoopConfig(max_iterations=5),
        tmp_path / "run",
    )
    # stable after two unchanged iterations, well before max_iterations
    assert [r.status for r in state.history] == [
        "skipped-empty-corpus",
        "skipped-empty-corpus",
    ]
    assert all(r.doc_id is None for r in state.history)
    assert content_digest(state.current_fcm) == content_digest(seed_fcm())


def test_extraction_failure_leaves_fcm_unchanged(tmp_path):
    corpus = tmp_path / "corpus"
    write_corpus(corpus, {"rain.txt": RAIN_TEXT})
    empty_transcripts = tmp_path / "transcripts"
    empty_transcripts.mkdir()
    before_digest = content_digest(seed_fcm())
    state = run_loop_from_dir(
        seed_fcm(),
        corpus,
        ReplayProvider(empty_transcripts),
        LoopConfig(max_iterations=4),
        tmp_path / "run",
    )
    first = state.history[0]
    assert first.status == "failed"
    assert "no recorded transcript" in first.error
    assert first.doc_title == "rain.txt"  # the fetch happened, the mutation did not
    assert first.mix_weight is None and first.component_file is None
    assert first.fcm_digest_after == before_digest
    # a failed document is still remembered, so the next pass skips it
    assert state.history[1].status == "skipped-duplicate"
    assert content_digest(state.current_fcm) == before_digest


# ---------------------------------------------------------------- journal


def test_journal_round_trip_matches_history(tmp_path):
    corpus = tmp_path / "corpus"
    write_corpus(corpus, {"rain.txt": RAIN_TEXT})
    state = run_loop_from_dir(
        seed_fcm(),
        corpus,
        ScriptedProvider(rain_responder),
        LoopConfig(max_iterations=2),
        tmp_path / "run",
    )
    records = read_journal(tmp_path / "run")
    assert tuple(records) == state.history
    assert all(isinstance(r, IterationRecord) for r in records)


def test_replay_detects_edited_components(tmp_path, loop_run_dir):
    run_dir = tmp_path / "run"
    shutil.copytree(loop_run_dir, run_dir)
    component_path = run_dir / "components" / "iteration-01.json"
    doc = json.loads(component_path.read_text(encoding="utf-8"))
    doc["edges"][0]["weight"] = -doc["edges"][0]["weight"]
    component_path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(InputError, match="artifacts edited"):
        replay_journal(run_dir)


def test_committed_run_replays_and_reruns_byte_identically(
    tmp_path, loop_run_dir, corpus_dir, transcripts_dir
):
    committed_final = (loop_run_dir / "final.json").read_bytes()
    assert fcm_to_bytes(replay_journal(loop_run_dir)) == committed_final

    # re-run the whole loop from the committed inputs: every artifact matches
    state = run_loop_from_dir(
        load_fcm(loop_run_dir / "initial.json"),
        corpus_dir,
        ReplayProvider(transcripts_dir),
        LoopConfig(max_iterations=3),
        tmp_path / "run",
    )
    assert [r.status for r in state.history] == ["ok", "ok", "ok"]
    assert [r.doc_title for r in state.history] == [
        "fact-checking.txt",
        "media-literacy.txt",
        "curriculum.txt",
    ]
    assert [r.query_fallback for r in state.history] == [False, True, False]
    assert (tmp_path / "run" / "final.json").read_bytes() == committed_final
    assert (tmp_path / "run" / "journal.ndjson").read_bytes() == (
        loop_run_dir / "journal.ndjson"
    ).read_bytes()
