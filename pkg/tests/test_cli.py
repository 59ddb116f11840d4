import json
import shutil

import pytest
from click.testing import CliRunner

from fcmkit import TOOL_VERSION
from fcmkit.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert TOOL_VERSION in result.output


def test_extract_replays_recorded_transcripts(
    runner, tmp_path, hallucination_doc_path, transcripts_dir, fcm_5node_path
):
    text_file = tmp_path / hallucination_doc_path.name
    shutil.copyfile(hallucination_doc_path, text_file)
    out = tmp_path / "out.json"
    result = runner.invoke(
        main,
        ["extract", str(text_file), "--replay-dir", str(transcripts_dir), "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "5 nodes, 6 edges" in result.output
    assert f"wrote {out}" in result.output
    committed = json.loads(fcm_5node_path.read_text(encoding="utf-8"))
    produced = json.loads(out.read_text(encoding="utf-8"))
    assert produced["nodes"] == committed["nodes"]
    assert produced["edges"] == committed["edges"]


def test_extract_replay_miss_exits_with_error(runner, tmp_path):
    text_file = tmp_path / "doc.txt"
    text_file.write_text("Rain raises rivers.", encoding="utf-8")
    empty = tmp_path / "transcripts"
    empty.mkdir()
    result = runner.invoke(main, ["extract", str(text_file), "--replay-dir", str(empty)])
    assert result.exit_code == 1
    assert "no recorded transcript" in result.output


def test_run_reports_cycle_and_exports(runner, tmp_path, fcm_5node_path):
    csv_path = tmp_path / "states.csv"
    result = runner.invoke(
        main,
        ["run", str(fcm_5node_path), "--init", "1,1,0,1,0", "--export", str(csv_path)],
    )
    assert result.exit_code == 0, result.output
    assert "limit cycle, period 2 (transient 2)" in result.output
    assert "cycle state:" in result.output
    assert csv_path.is_file()
    meta = json.loads((tmp_path / "states.csv.meta.json").read_text(encoding="utf-8"))
    assert meta["kind"] == "limit-cycle" and meta["period"] == 2
    header = csv_path.read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",")[0] == "AI Hallucinations"


def test_run_rejects_malformed_init(runner, fcm_5node_path):
    wrong_arity = runner.invoke(main, ["run", str(fcm_5node_path), "--init", "1,0"])
    assert wrong_arity.exit_code == 2
    assert "5 nodes" in wrong_arity.output
    not_numbers = runner.invoke(main, ["run", str(fcm_5node_path), "--init", "a,b,c,d,e"])
    assert not_numbers.exit_code == 2


def test_equilibria_enumerates_binary_basins(runner, fixtures_dir):
    swap = fixtures_dir / "fcms" / "two-node-swap.json"
    result = runner.invoke(main, ["equilibria", str(swap), "--enumerate-binary"])
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0] == "3 attractors, basin sizes 1, 1, 2"
    assert "  fixed point [00]: basin 1" in lines
    assert "  fixed point [11]: basin 1" in lines
    assert "  2-step cycle [01 -> 10]: basin 2" in lines


def test_equilibria_without_enumeration_probes_all_ones(runner, fcm_5node_path):
    result = runner.invoke(main, ["equilibria", str(fcm_5node_path)])
    assert result.exit_code == 0
    assert result.output.startswith("from the all-ones init:")


def test_mix_writes_union_model(runner, tmp_path, fixtures_dir):
    a = fixtures_dir / "fcms" / "concept-15node.json"
    b = fixtures_dir / "fcms" / "concept-20node.json"
    out = tmp_path / "mixed.json"
    result = runner.invoke(
        main, ["mix", str(a), str(b), "--weights", "0.5,0.5", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "mixed 2 FCMs -> 24 nodes, 52 edges" in result.output
    assert out.is_file()


def test_mix_rejects_nonconvex_weights(runner, fixtures_dir):
    a = fixtures_dir / "fcms" / "concept-15node.json"
    b = fixtures_dir / "fcms" / "concept-20node.json"
    result = runner.invoke(main, ["mix", str(a), str(b), "--weights", "0.9,0.4"])
    assert result.exit_code == 2
    assert "sum to 1" in result.output


def test_agentic_reproduces_committed_run(
    runner, tmp_path, loop_run_dir, corpus_dir, transcripts_dir
):
    run_dir = tmp_path / "run"
    result = runner.invoke(
        main,
        [
            "agentic",
            "--fcm", str(loop_run_dir / "initial.json"),
            "--corpus", str(corpus_dir),
            "--iterations", "3",
            "--out", str(run_dir),
            "--replay-dir", str(transcripts_dir),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "iteration 1: ok (fact-checking.txt)" in result.output
    assert "iteration 2: ok (media-literacy.txt)" in result.output
    assert "iteration 3: ok (curriculum.txt)" in result.output
    assert "final FCM: 8 nodes" in result.output
    assert (run_dir / "final.json").read_bytes() == (loop_run_dir / "final.json").read_bytes()


def test_missing_input_file_fails_cleanly(runner, tmp_path):
    result = runner.invoke(main, ["run", str(tmp_path / "ghost.json"), "--init", "1"])
    assert result.exit_code == 2  # click path validation
    result = runner.invoke(main, ["equilibria", str(tmp_path / "ghost.json")])
    assert result.exit_code == 2


def test_corrupt_fcm_file_exits_one(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    result = runner.invoke(main, ["run", str(bad), "--init", "1"])
    assert result.exit_code == 1
    assert "not valid JSON" in result.output
