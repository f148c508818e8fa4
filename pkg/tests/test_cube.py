import itertools

import numpy as np
import pytest

from qrubik import (
    build_snoeb,
    build_snoes,
    completion_states,
    decompose_layer,
    ghz_like_states,
    layer_sizes,
    root_of_unity,
    tripartite_layout,
    validate_set,
)

from reference_data import (
    BLOCKS3,
    BLOCKS4,
    completion3_states,
    completion4_states,
    set3_states,
    set4_states,
)


def _assert_states_equal(got, expected, atol):
    assert len(got) == len(expected)
    for g, e in zip(got, expected):
        assert g.support == e.support, (g.label, e.label)
        for (gi, ga), (ei, ea) in zip(g.terms, e.terms):
            assert gi == ei
            assert abs(ga - ea) <= atol, (g.label, gi, ga, ea)


def test_root_of_unity_exact_quarter_turns():
    assert root_of_unity(2, 1) == -1
    assert root_of_unity(2, 2) == 1
    assert root_of_unity(4, 1) == 1j
    assert root_of_unity(4, 3) == -1j
    assert root_of_unity(6, 3) == -1
    assert abs(root_of_unity(3, 1) - complex(-0.5, np.sqrt(3) / 2)) < 1e-15


def test_decompose_layer_d3_matches_reference_blocks():
    layer = decompose_layer(3)
    extents = [tuple(tuple(r) for r in sub.ranges) for sub in layer.block_extents]
    assert extents == BLOCKS3
    assert layer.corner_cells == ((0, 0, 0), (2, 2, 2))
    assert layer.inner.cells() == ((1, 1, 1),)
    # run layout of the first block: (j+1, 0, j+t mod 2)
    assert layer.face_blocks[0][0] == ((1, 0, 0), (2, 0, 1))
    assert layer.face_blocks[0][1] == ((1, 0, 1), (2, 0, 0))


def test_decompose_layer_d4_matches_reference_blocks():
    layer = decompose_layer(4)
    extents = [tuple(tuple(r) for r in sub.ranges) for sub in layer.block_extents]
    assert extents == BLOCKS4
    assert layer.corner_cells == ((0, 0, 0), (3, 3, 3))
    assert set(layer.inner.cells()) == set(itertools.product((1, 2), repeat=3))


def test_decompose_layer_rejects_small_d():
    with pytest.raises(ValueError):
        decompose_layer(2)


@pytest.mark.parametrize("d", range(3, 10))
def test_cell_count_identity(d):
    assert 6 * (d - 1) ** 2 + 2 + (d - 2) ** 3 == d**3
    layer = decompose_layer(d)
    block_cells = [c for fam in layer.face_blocks for run in fam for c in run]
    assert len(block_cells) == 6 * (d - 1) ** 2
    covered = set(block_cells) | set(layer.corner_cells) | set(layer.inner.cells())
    assert len(block_cells) + 2 + layer.inner.size == d**3
    assert covered == set(itertools.product(range(d), repeat=3))


@pytest.mark.parametrize("d", range(3, 8))
def test_layer_runs_disjoint_within_block(d):
    layer = decompose_layer(d)
    for fam in layer.face_blocks:
        cells = [c for run in fam for c in run]
        assert len(cells) == len(set(cells))
        for run in fam:
            assert len(run) == d - 1


def test_ghz_like_pairs_and_triples():
    layout = tripartite_layout(3)
    pair = ghz_like_states(layout, [(1, 0, 0), (2, 0, 1)])
    assert pair[0].terms == (((1, 0, 0), 1 + 0j), ((2, 0, 1), 1 + 0j))
    assert pair[1].terms == (((1, 0, 0), 1 + 0j), ((2, 0, 1), -1 + 0j))

    triple = ghz_like_states(layout, [(0, 0, 0), (1, 1, 1), (2, 2, 2)])
    w3 = root_of_unity(3, 1)
    expect = [((0, 0, 0), 1 + 0j), ((1, 1, 1), w3), ((2, 2, 2), w3 * w3)]
    got = dict(triple[1].terms)
    for idx, amp in expect:
        assert abs(got[idx] - amp) < 1e-15

    single = ghz_like_states(layout, [(2, 1, 0)])
    assert len(single) == 1 and single[0].terms == (((2, 1, 0), 1 + 0j),)

    with pytest.raises(ValueError):
        ghz_like_states(layout, [(0, 0, 0), (0, 0, 0)])
    with pytest.raises(ValueError):
        ghz_like_states(layout, [])


def test_build_snoes_3_matches_reference_set_exactly():
    got = build_snoes(3)
    expected = set3_states()
    assert got.labels == expected.labels
    for g, e in zip(got.states, expected.states):
        assert g.terms == e.terms  # amplitudes are exact +/-1


def test_build_snoes_4_matches_reference_set():
    _assert_states_equal(build_snoes(4).states, set4_states().states, atol=1e-15)


def test_build_snoeb_3_adds_reference_completions():
    basis = build_snoeb(3)
    assert len(basis) == 27
    assert basis.states[:24] == build_snoes(3).states
    _assert_states_equal(basis.states[24:], completion3_states(), atol=1e-15)


def test_build_snoeb_4_adds_reference_completions():
    basis = build_snoeb(4)
    assert len(basis) == 64
    _assert_states_equal(basis.states[54:], completion4_states(), atol=1e-15)


@pytest.mark.parametrize("d", range(3, 8))
def test_size_formulas(d):
    sset = build_snoes(d)
    expected = d**3 - d if d % 2 else d**3 - d - 6
    assert len(sset) == expected
    assert len(build_snoeb(d)) == d**3


@pytest.mark.parametrize("d", range(3, 7))
def test_sets_orthogonal_with_full_basis_rank(d):
    report = validate_set(build_snoes(d))
    assert report.pairwise_orthogonal
    breport = validate_set(build_snoeb(d))
    assert breport.pairwise_orthogonal
    assert breport.span_rank == d**3


@pytest.mark.parametrize("d", range(3, 7))
def test_supports_partition_cube(d):
    basis = build_snoeb(d)
    runs = {}
    for s in basis.states:
        runs.setdefault(frozenset(s.support), []).append(s.label)
    seen = {}
    for run, labels in runs.items():
        # a run of n cells carries exactly n states
        assert len(labels) == len(run)
        for cell in run:
            assert cell not in seen, f"cell {cell} covered twice"
            seen[cell] = labels
    assert set(seen) == set(itertools.product(range(d), repeat=3))


@pytest.mark.parametrize("d", range(3, 7))
def test_snoes_states_live_on_layer_runs(d):
    emitted = set()
    for size in layer_sizes(d):
        offset = (d - size) // 2
        layer = decompose_layer(size)
        for fam in layer.face_blocks:
            for run in fam:
                emitted.add(
                    frozenset((a + offset, b + offset, c + offset) for a, b, c in run)
                )
    for s in build_snoes(d):
        assert frozenset(s.support) in emitted


def test_snoes_prefix_of_snoeb():
    for d in (3, 4, 5):
        sset = build_snoes(d)
        basis = build_snoeb(d)
        assert basis.states[: len(sset)] == sset.states


def test_completion_supports_on_diagonal():
    for d in (3, 5, 7):
        for s in completion_states(d):
            assert all(len(set(idx)) == 1 for idx in s.support)
    for d in (4, 6):
        states = completion_states(d)
        assert len(states) == d + 6
        m = d // 2
        for s in states[d:]:
            assert all(set(idx) <= {m - 1, m} for idx in s.support)


def test_build_snoes_rejects_small_d():
    with pytest.raises(ValueError):
        build_snoes(2)
    with pytest.raises(ValueError):
        build_snoeb(1)
