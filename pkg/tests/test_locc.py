import copy
import json
import math

import numpy as np
import pytest

from qrubik import (
    ProtocolError,
    apply_measurement,
    build_snoes,
    check_orthogonality_preservation,
    parse_protocol,
    run_protocol,
    teleport,
)
from qrubik.locc import _initial_state
from qrubik.protocols import (
    SNAKE_3,
    bell_state_set,
    example1_protocol,
    prop1_protocol,
    prop2_protocol,
)

from reference_data import GRID39_PAIRS


def _minimal_doc():
    return {
        "name": "toy",
        "registers": [
            {"name": "A", "owner": "Alice", "dim": 2},
            {"name": "B", "owner": "Bob", "dim": 2},
        ],
        "resources": [],
        "root": {
            "type": "measure",
            "party": "Alice",
            "operators": [
                {"name": "P0", "proj": [{"regs": ["A"], "levels": [[0]]}]},
                {"name": "P1", "complement": True},
            ],
            "branches": {
                "P0": {"type": "leaf", "answer": "x"},
                "P1": {"type": "leaf", "answer": "y"},
            },
        },
    }


def test_parse_minimal_protocol():
    spec = parse_protocol(_minimal_doc())
    assert [r.name for r in spec.principal_registers] == ["A", "B"]
    assert spec.root.party == "Alice"


def test_parse_prop2_shape():
    spec = parse_protocol(prop2_protocol())
    assert len(spec.resources) == 5
    ancillas = {r for res in spec.resources for r in res.registers}
    assert len(ancillas) == 10
    assert [r.name for r in spec.principal_registers] == ["A", "B", "C"]
    # the five top-level stages appear as operator name prefixes
    stages = set()

    def walk(node):
        if hasattr(node, "operators"):
            for op in node.operators:
                if op.name.startswith("M") and op.name[1].isdigit():
                    stages.add(int(op.name[1]))
            for child in node.branches.values():
                walk(child)
        elif hasattr(node, "then"):
            walk(node.then)

    walk(spec.root)
    assert stages == {1, 2, 3, 4, 5}


def test_parse_rejects_incomplete_measurement():
    doc = _minimal_doc()
    doc["root"]["operators"] = [
        {"name": "P0", "proj": [{"regs": ["A"], "levels": [[0]]}]}
    ]
    doc["root"]["branches"] = {"P0": {"type": "leaf", "answer": "x"}}
    with pytest.raises(ProtocolError, match="completeness"):
        parse_protocol(doc)


def test_parse_rejects_foreign_register():
    doc = _minimal_doc()
    doc["root"]["operators"][0]["proj"][0]["regs"] = ["B"]
    doc["root"]["operators"][0]["proj"][0]["levels"] = [[0]]
    with pytest.raises(ProtocolError, match="owned by"):
        parse_protocol(doc)


def test_parse_rejects_unknown_register():
    doc = _minimal_doc()
    doc["root"]["operators"][0]["proj"][0]["regs"] = ["Z"]
    with pytest.raises(ProtocolError, match="unknown register"):
        parse_protocol(doc)


def test_parse_rejects_resource_reuse_and_dim_mismatch():
    base = {
        "name": "toy",
        "registers": [
            {"name": "A", "owner": "Alice", "dim": 2},
            {"name": "B", "owner": "Bob", "dim": 2},
            {"name": "a", "owner": "Alice", "dim": 2},
            {"name": "b", "owner": "Bob", "dim": 2},
        ],
        "resources": [
            {"name": "r", "pair": ["Alice", "Bob"], "dim": 2, "registers": ["a", "b"]}
        ],
    }
    doc = dict(base)
    doc["root"] = {
        "type": "teleport",
        "source": "A",
        "resource": "r",
        "to": "Bob",
        "then": {
            "type": "teleport",
            "source": "B",
            "resource": "r",
            "to": "Bob",
            "then": {"type": "leaf", "answer": "x"},
        },
    }
    with pytest.raises(ProtocolError, match="twice"):
        parse_protocol(doc)

    doc = dict(base)
    doc["registers"] = [
        {"name": "A", "owner": "Alice", "dim": 3},
        {"name": "B", "owner": "Bob", "dim": 3},
        {"name": "a", "owner": "Alice", "dim": 2},
        {"name": "b", "owner": "Bob", "dim": 2},
    ]
    doc["root"] = {
        "type": "teleport",
        "source": "A",
        "resource": "r",
        "to": "Bob",
        "then": {"type": "leaf", "answer": "x"},
    }
    with pytest.raises(ProtocolError, match="dim"):
        parse_protocol(doc)


def test_apply_measurement_born_rule():
    spec = parse_protocol(example1_protocol())
    bell = bell_state_set()
    sim = _initial_state(spec, bell[0])  # |00>+|11> with the shared pair
    n1 = spec.root.operators[0]
    post, prob = apply_measurement(sim, n1)
    assert prob == pytest.approx(0.5)
    # surviving components are |0,0,0,0> and |1,1,1,1> on (A, B, a, b)
    nz = {tuple(int(x) for x in idx) for idx in np.argwhere(np.abs(post.vector) > 1e-12)}
    assert nz == {(0, 0, 0, 0), (1, 1, 1, 1)}

    ident = type(n1)(name="I", regs=("A",), matrix=np.eye(2, dtype=complex))
    same, prob = apply_measurement(sim, ident)
    assert prob == pytest.approx(1.0)
    assert np.allclose(same.vector, sim.vector)

    nothing = type(n1)(
        name="Z", regs=("A", "a"), matrix=np.zeros((4, 4), dtype=complex)
    )
    _, prob = apply_measurement(sim, nothing)
    assert prob == 0.0


def test_teleport_moves_ownership_and_consumes():
    spec = parse_protocol(prop1_protocol())
    b3 = build_snoes(3)
    sim = _initial_state(spec, b3[0])
    res = spec.resource("phi3_bc")
    moved = teleport(sim, "C", res, "Bob")
    assert moved.owners["C"] == "Bob"
    assert "phi3_bc" in moved.consumed
    assert "b0" not in moved.live and "c0" not in moved.live
    # amplitudes unchanged: norm matches the input state times remaining pairs
    assert np.vdot(moved.vector, moved.vector).real == pytest.approx(2 * 2 * 2)
    with pytest.raises(ValueError, match="consumed"):
        teleport(moved, "C", res, "Charlie")


def test_teleport_grid_mapping_matches_reference_bipartite_set():
    spec = parse_protocol(prop1_protocol())
    b3 = build_snoes(3)
    res = spec.resource("phi3_bc")
    for k, s in enumerate(b3.states):
        sim = teleport(_initial_state(spec, s), "C", res, "Bob")
        # project out the untouched dim-2 pairs and read the (A, B, C) part
        axes = [sim.live.index(r) for r in ("A", "B", "C")]
        vec = sim.vector
        keep = np.argwhere(np.abs(vec) > 1e-12)
        cells = set()
        for full_idx in keep:
            a = int(full_idx[axes[0]])
            bc = SNAKE_3[(int(full_idx[axes[1]]), int(full_idx[axes[2]]))]
            cells.add((a, bc))
        expected = set(GRID39_PAIRS[k // 2])
        assert cells == expected, s.label


def test_teleport_to_current_owner_is_noop_but_consumes():
    doc = {
        "name": "toy",
        "registers": [
            {"name": "A", "owner": "Alice", "dim": 2},
            {"name": "B", "owner": "Bob", "dim": 2},
            {"name": "a", "owner": "Alice", "dim": 2},
            {"name": "b", "owner": "Bob", "dim": 2},
        ],
        "resources": [
            {"name": "r", "pair": ["Alice", "Bob"], "dim": 2, "registers": ["a", "b"]}
        ],
        "root": {
            "type": "teleport",
            "source": "B",
            "resource": "r",
            "to": "Bob",
            "then": {
                "type": "measure",
                "party": "Bob",
                "operators": [
                    {"name": "P0", "proj": [{"regs": ["B"], "levels": [[0]]}]},
                    {"name": "P1", "complement": True},
                ],
                "branches": {
                    "P0": {"type": "leaf", "answer": "x"},
                    "P1": {"type": "leaf", "answer": "y"},
                },
            },
        },
    }
    spec = parse_protocol(doc)
    from qrubik import PartyLayout, PureState, StateSet

    layout = PartyLayout(("A", "B"), (2, 2))
    sset = StateSet(
        layout,
        (
            PureState(layout, [((0, 0), 1)], "x"),
            PureState(layout, [((0, 1), 1)], "y"),
        ),
    )
    report = run_protocol(spec, sset)
    assert report.correct
    assert report.usage[0].expected_copies == pytest.approx(1.0)


def test_example1_report():
    spec = parse_protocol(example1_protocol())
    bell = bell_state_set()
    report = run_protocol(spec, bell)
    assert report.correct
    for o in report.outcomes:
        assert o.probability_total == pytest.approx(1.0, abs=1e-9)
    assert len(report.usage) == 1
    assert report.usage[0].expected_copies == pytest.approx(1.0, abs=1e-9)
    assert report.total_ebits == pytest.approx(1.0, abs=1e-9)
    assert check_orthogonality_preservation(spec, bell)


def test_prop1_report_matches_reference_costs():
    spec = parse_protocol(prop1_protocol())
    b3 = build_snoes(3)
    report = run_protocol(spec, b3)
    assert report.correct
    for o in report.outcomes:
        assert o.probability_total == pytest.approx(1.0, abs=1e-9)
    pair = {(u.pair, u.dim): u.expected_copies for u in report.pair_usage}
    assert pair[(("Alice", "Bob"), 2)] == pytest.approx(4 / 3, abs=1e-9)
    assert pair[(("Bob", "Charlie"), 3)] == pytest.approx(1.0, abs=1e-9)
    assert ("Alice", "Charlie") not in {p for p, _ in pair}
    assert report.total_ebits == pytest.approx(4 / 3 + math.log2(3), abs=1e-9)
    assert report.total_ebits < 2 * math.log2(3)
    assert spec.notes  # the resource-pair discrepancy is flagged
    assert check_orthogonality_preservation(spec, b3)


def test_prop2_report_matches_reference_costs():
    spec = parse_protocol(prop2_protocol())
    b3 = build_snoes(3)
    report = run_protocol(spec, b3)
    assert report.correct
    for o in report.outcomes:
        assert o.probability_total == pytest.approx(1.0, abs=1e-9)
    pair = {(u.pair, u.dim): u.expected_copies for u in report.pair_usage}
    assert pair[(("Alice", "Bob"), 2)] == pytest.approx(7 / 6, abs=1e-9)
    assert pair[(("Alice", "Charlie"), 2)] == pytest.approx(7 / 6, abs=1e-9)
    assert pair[(("Bob", "Charlie"), 2)] == pytest.approx(1 / 6, abs=1e-9)
    assert report.total_ebits == pytest.approx(2.5, abs=1e-9)
    assert report.total_ebits < 2 * math.log2(3)
    assert check_orthogonality_preservation(spec, b3)


def test_discrimination_failure_is_reported_not_raised():
    doc = copy.deepcopy(example1_protocol())

    def swap_answers(node):
        if node.get("type") == "leaf":
            if node["answer"] == "psi1":
                node["answer"] = "psi2"
            elif node["answer"] == "psi2":
                node["answer"] = "psi1"
            return
        if node.get("type") == "measure":
            for child in node["branches"].values():
                swap_answers(child)
        elif node.get("type") == "teleport":
            swap_answers(node["then"])

    swap_answers(doc["root"])
    report = run_protocol(parse_protocol(doc), bell_state_set())
    assert not report.correct
    flags = {o.label: o.correct for o in report.outcomes}
    assert not flags["psi1"] and not flags["psi2"]
    assert flags["psi3"] and flags["psi4"]


def test_state_set_must_fit_principal_registers():
    spec = parse_protocol(example1_protocol())
    with pytest.raises(ProtocolError, match="principal"):
        run_protocol(spec, build_snoes(3))


def test_shipped_documents_round_trip():
    from qrubik.make_data import write_data
    import tempfile, os

    with tempfile.TemporaryDirectory() as tmp:
        paths = write_data(tmp)
        assert sorted(os.path.basename(p) for p in paths) == [
            "b3.json",
            "b4.json",
            "bell.json",
            "example1.json",
            "prop1.json",
            "prop2.json",
        ]
        with open(os.path.join(tmp, "prop1.json")) as fh:
            doc = json.load(fh)
        spec = parse_protocol(doc)
        assert spec.name == "prop1"


def test_identity_factor_detection_drives_touching():
    from qrubik.locc import RegisterTable, Register, _acts_nontrivially

    table = RegisterTable(
        (Register("A", "Alice", 2), Register("a", "Alice", 2))
    )
    correlated = np.zeros((4, 4), dtype=complex)
    for a_level, anc in ((0, 0), (1, 1)):
        correlated[a_level * 2 + anc, a_level * 2 + anc] = 1.0
    assert _acts_nontrivially(correlated, ("A", "a"), "a", table, 1e-9)

    factored = np.kron(np.array([[0, 1], [1, 0]], dtype=complex), 3 * np.eye(2))
    assert not _acts_nontrivially(factored, ("A", "a"), "a", table, 1e-9)
    assert _acts_nontrivially(factored, ("A", "a"), "A", table, 1e-9)
