import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcmkit import (
    ConceptNode,
    EdgeAnnotation,
    EdgeMatrix,
    EquilibriumClassification,
    Fcm,
    IoError,
    ParseError,
    Provenance,
    SchemaError,
    StateVector,
    canonical_content_bytes,
    content_digest,
    export_trajectory,
    fcm_to_bytes,
    load_fcm,
    nodes_from_labels,
    save_fcm,
)
from fcmkit.persistence import atomic_write_bytes, canonical_json_bytes, format_number

# The canonical form prints six decimal places, so round-trip identity is
# exercised on weights that the format can represent exactly.
GRID6 = [round(k / 4, 6) for k in range(-4, 5)]


def make_fcm(labels, weights, **kwargs) -> Fcm:
    return Fcm(nodes=nodes_from_labels(labels), edges=EdgeMatrix(weights), **kwargs)


def test_format_number_fixed_point():
    assert format_number(0.5) == "0.500000"
    assert format_number(-1) == "-1.000000"
    assert format_number(1 / 3) == "0.333333"
    assert format_number(-0.0) == "0.000000"
    assert format_number(0.0000004) == "0.000000"


def test_canonical_json_bytes_shape():
    blob = canonical_json_bytes({"b": 1.0, "a": [True, False, None, "x"]})
    assert blob == b'{"a":[true,false,null,"x"],"b":1.000000}\n'
    assert canonical_json_bytes({"label": "Straße"}).decode("utf-8") == '{"label":"Straße"}\n'
    assert canonical_json_bytes(3) == b"3\n"


def test_canonical_json_bytes_rejects_unknown_types():
    from fcmkit import InputError

    with pytest.raises(InputError, match="cannot canonicalize"):
        canonical_json_bytes({"x": object()})
    with pytest.raises(InputError, match="keys must be strings"):
        canonical_json_bytes({3: "x"})


def test_atomic_write_leaves_no_droppings(tmp_path):
    target = tmp_path / "out.json"
    atomic_write_bytes(target, b"hello")
    assert target.read_bytes() == b"hello"
    atomic_write_bytes(target, b"world")
    assert target.read_bytes() == b"world"
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_atomic_write_failure_is_io_error(tmp_path):
    missing_dir = tmp_path / "nope" / "out.json"
    with pytest.raises(IoError):
        atomic_write_bytes(missing_dir, b"x")


def test_save_load_round_trip(tmp_path):
    note = EdgeAnnotation(evidence_quote="A drives B", trigger_verb="drives")
    fcm = make_fcm(
        ["Alpha", "Beta"],
        [[0.0, 0.75], [-0.25, 0.0]],
        provenance=Provenance(source="unit test"),
        edge_annotations={("alpha", "beta"): note},
    )
    path = tmp_path / "model.json"
    save_fcm(fcm, path)
    loaded = load_fcm(path)
    assert loaded.labels == fcm.labels
    assert np.array_equal(loaded.edges.weights, fcm.edges.weights)
    assert loaded.edge_annotations[("alpha", "beta")] == note
    assert loaded.provenance == fcm.provenance
    # idempotent: re-saving the loaded model reproduces the bytes
    save_fcm(loaded, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_serialized_document_layout(tmp_path):
    fcm = make_fcm(["A", "B"], [[0.0, 0.5], [0.0, 0.0]])
    path = tmp_path / "m.json"
    save_fcm(fcm, path)
    raw = path.read_bytes()
    assert raw.endswith(b"\n")
    doc = json.loads(raw)
    assert doc["schema_version"] == 1
    assert [n["id"] for n in doc["nodes"]] == ["a", "b"]
    assert doc["edges"] == [
        {
            "source_id": "a",
            "target_id": "b",
            "weight": 0.5,
            "evidence_quote": None,
            "trigger_verb": None,
        }
    ]
    assert doc["provenance"]["tool_version"]


def test_zero_weight_edges_are_omitted(tmp_path):
    fcm = make_fcm(["A", "B"], np.zeros((2, 2)))
    save_fcm(fcm, tmp_path / "z.json")
    assert json.loads((tmp_path / "z.json").read_bytes())["edges"] == []


def test_negative_zero_is_collapsed(tmp_path):
    fcm = make_fcm(["A", "B"], [[0.0, -0.0], [0.25, 0.0]])
    save_fcm(fcm, tmp_path / "nz.json")
    assert b"-0.000000" not in (tmp_path / "nz.json").read_bytes()


def test_load_rejects_bad_documents(tmp_path):
    path = tmp_path / "bad.json"

    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_fcm(path)

    def reject(doc, match):
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(SchemaError, match=match):
            load_fcm(path)

    nodes = [{"id": "a", "label": "A", "evidence": None}]
    reject({"schema_version": 99, "nodes": nodes, "edges": []}, "unsupported schema_version")
    reject({"schema_version": 1, "nodes": [], "edges": []}, "non-empty")
    reject(
        {"schema_version": 1, "nodes": nodes + nodes, "edges": []},
        "duplicate node id",
    )
    reject(
        {
            "schema_version": 1,
            "nodes": nodes,
            "edges": [{"source_id": "a", "target_id": "ghost", "weight": 0.5}],
        },
        "not a node id",
    )
    reject(
        {
            "schema_version": 1,
            "nodes": nodes,
            "edges": [
                {"source_id": "a", "target_id": "a", "weight": 0.5},
                {"source_id": "a", "target_id": "a", "weight": 0.25},
            ],
        },
        "duplicate edge",
    )
    reject(
        {
            "schema_version": 1,
            "nodes": nodes,
            "edges": [{"source_id": "a", "target_id": "a", "weight": 1.5}],
        },
        r"\[-1, 1\]",
    )
    reject(
        {
            "schema_version": 1,
            "nodes": nodes,
            "edges": [{"source_id": "a", "target_id": "a", "weight": True}],
        },
        "number",
    )


def test_load_missing_file_is_io_error(tmp_path):
    with pytest.raises(IoError):
        load_fcm(tmp_path / "absent.json")


def test_content_digest_ignores_provenance():
    a = make_fcm(["A", "B"], [[0.0, 0.5], [0.0, 0.0]], provenance=Provenance(source="one"))
    b = make_fcm(["A", "B"], [[0.0, 0.5], [0.0, 0.0]], provenance=Provenance(source="two"))
    assert content_digest(a) == content_digest(b)
    assert fcm_to_bytes(a) != fcm_to_bytes(b)
    c = make_fcm(["A", "B"], [[0.0, 0.25], [0.0, 0.0]])
    assert content_digest(a) != content_digest(c)


def test_semantically_equal_fcms_serialize_identically():
    # same content assembled differently: list vs array weights, -0.0 vs 0.0,
    # annotation insertion order, float32 vs float64
    n1 = EdgeAnnotation(evidence_quote="q1")
    n2 = EdgeAnnotation(evidence_quote="q2")
    a = Fcm(
        nodes=nodes_from_labels(["A", "B"]),
        edges=EdgeMatrix([[0.0, 0.5], [-0.25, -0.0]]),
        edge_annotations={("a", "b"): n1, ("b", "a"): n2},
    )
    b = Fcm(
        nodes=tuple(nodes_from_labels(["A", "B"])),
        edges=EdgeMatrix(np.array([[0.0, 0.5], [-0.25, 0.0]], dtype=np.float32)),
        edge_annotations={("b", "a"): n2, ("a", "b"): n1},
    )
    assert fcm_to_bytes(a) == fcm_to_bytes(b)


def test_export_trajectory(tmp_path):
    states = [StateVector(values=(1.0, 0.0)), StateVector(values=(0.0, 1.0), t=1)]
    classification = EquilibriumClassification(
        kind="limit-cycle", period=2, cycle_states=tuple(states), transient_length=0
    )
    out = tmp_path / "run.csv"
    export_trajectory(states, classification, ["A", "B"], out)
    assert out.read_text(encoding="utf-8") == "A,B\n1.000000,0.000000\n0.000000,1.000000\n"
    meta = json.loads((tmp_path / "run.csv.meta.json").read_text(encoding="utf-8"))
    assert meta == {"kind": "limit-cycle", "period": 2, "steps": 2, "transient_length": 0}


def test_export_trajectory_validations(tmp_path):
    from fcmkit import InputError, ShapeError

    classification = EquilibriumClassification(
        kind="fixed-point",
        period=1,
        cycle_states=(StateVector(values=(0.0,)),),
        transient_length=0,
    )
    with pytest.raises(InputError):
        export_trajectory([], classification, ["A"], tmp_path / "x.csv")
    with pytest.raises(ShapeError):
        export_trajectory(
            [StateVector(values=(0.0, 1.0))], classification, ["A"], tmp_path / "x.csv"
        )


@st.composite
def grid_fcms(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    labels = [f"Concept {i}" for i in range(n)]
    weights = draw(
        st.lists(
            st.lists(st.sampled_from(GRID6), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )
    return make_fcm(labels, weights)


@settings(max_examples=80)
@given(grid_fcms())
def test_round_trip_stability_on_grid_weights(tmp_path_factory, fcm):
    path = tmp_path_factory.mktemp("rt") / "m.json"
    save_fcm(fcm, path)
    first = path.read_bytes()
    loaded = load_fcm(path)
    assert np.array_equal(loaded.edges.weights, fcm.edges.weights)
    save_fcm(loaded, path)
    assert path.read_bytes() == first
