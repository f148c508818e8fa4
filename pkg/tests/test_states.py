import cmath
import json
import math

import numpy as np
import pytest

from qrubik import (
    Bipartition,
    PartyLayout,
    PureState,
    StateSet,
    embed_shift,
    flatten,
    inner_product,
    norm,
    state_set_from_dict,
    state_set_to_dict,
    validate_set,
)

from reference_data import completion3_states, set3_states


def _layout3():
    return PartyLayout.uniform(("A", "B", "C"), 3)


def _random_state(layout, rng, label=None, max_terms=5):
    n_terms = rng.integers(1, min(max_terms, layout.total_dim) + 1)
    cells = set()
    while len(cells) < n_terms:
        cells.add(tuple(int(rng.integers(0, d)) for d in layout.dims))
    terms = [(c, complex(rng.normal(), rng.normal())) for c in cells]
    return PureState(layout, terms, label)


def test_layout_validation():
    with pytest.raises(ValueError):
        PartyLayout(("A", "A"), (2, 2))
    with pytest.raises(ValueError):
        PartyLayout(("A",), (0,))
    with pytest.raises(ValueError):
        PartyLayout((), ())
    layout = PartyLayout(("A", "B"), (2, 3))
    assert layout.total_dim == 6
    assert layout.axis("B") == 1
    with pytest.raises(KeyError):
        layout.axis("Z")


def test_state_canonicalization():
    layout = _layout3()
    s = PureState(layout, [((2, 0, 1), 1), ((1, 0, 0), 1), ((2, 0, 1), -1)])
    assert s.terms == (((1, 0, 0), (1 + 0j)),)
    with pytest.raises(ValueError):
        PureState(layout, [((3, 0, 0), 1)])
    with pytest.raises(ValueError):
        PureState(layout, [((0, 0), 1)])


def test_inner_product_disjoint_pair_is_zero():
    layout = _layout3()
    psi1 = PureState(layout, [((1, 0, 0), 1), ((2, 0, 1), 1)])
    psi2 = PureState(layout, [((1, 0, 0), 1), ((2, 0, 1), -1)])
    assert inner_product(psi1, psi2) == 0
    assert inner_product(psi1, psi1) == 2


def test_inner_product_cube_roots_cancel():
    w3 = cmath.exp(2j * math.pi / 3)
    assert abs(1 + w3 + w3**2) < 1e-15
    psi25, psi26 = completion3_states()[:2]
    assert abs(inner_product(psi25, psi26)) < 1e-15


def test_inner_product_layout_mismatch():
    a = PureState(_layout3(), [((0, 0, 0), 1)])
    b = PureState(PartyLayout.uniform(("A", "B", "C"), 4), [((0, 0, 0), 1)])
    with pytest.raises(ValueError):
        inner_product(a, b)


def test_inner_product_conjugate_symmetry():
    rng = np.random.default_rng(7)
    layout = _layout3()
    for _ in range(50):
        a = _random_state(layout, rng)
        b = _random_state(layout, rng)
        assert inner_product(a, b) == pytest.approx(
            inner_product(b, a).conjugate(), abs=1e-12
        )


def test_flatten_positions_and_ranks():
    layout = _layout3()
    psi1 = PureState(layout, [((1, 0, 0), 1), ((2, 0, 1), 1)])
    cut_b = Bipartition.of(layout, ["B"])
    mat = flatten(psi1, cut_b)
    assert mat.shape == (3, 9)
    # both terms sit in row b=0; columns are (a, c) lexicographic
    assert mat[0, 1 * 3 + 0] == 1
    assert mat[0, 2 * 3 + 1] == 1
    assert np.count_nonzero(mat) == 2
    assert np.linalg.matrix_rank(mat) == 1

    cut_a = Bipartition.of(layout, ["A"])
    mat_a = flatten(psi1, cut_a)
    assert mat_a[1, 0 * 3 + 0] == 1
    assert mat_a[2, 0 * 3 + 1] == 1
    assert np.linalg.matrix_rank(mat_a) == 2


def test_flatten_zero_state():
    layout = _layout3()
    zero = PureState(layout, [])
    mat = flatten(zero, Bipartition.of(layout, ["A"]))
    assert np.count_nonzero(mat) == 0


def test_flatten_rank_invariant_under_local_permutations():
    rng = np.random.default_rng(11)
    layout = _layout3()
    cut = Bipartition.of(layout, ["A"])
    for _ in range(20):
        s = _random_state(layout, rng)
        perms = [rng.permutation(d) for d in layout.dims]
        permuted = PureState(
            layout,
            [
                (tuple(int(p[i]) for p, i in zip(perms, idx)), amp)
                for idx, amp in s.terms
            ],
        )
        r1 = np.linalg.matrix_rank(flatten(s, cut))
        r2 = np.linalg.matrix_rank(flatten(permuted, cut))
        assert r1 == r2


def test_validate_set_on_reference_families():
    s24 = set3_states()
    report = validate_set(s24)
    assert (report.size, report.pairwise_orthogonal, report.span_rank) == (24, True, 24)

    layout = s24.layout
    s27 = StateSet(layout, s24.states + tuple(completion3_states()))
    report = validate_set(s27)
    assert (report.size, report.pairwise_orthogonal, report.span_rank) == (27, True, 27)


def test_validate_set_detects_duplicates():
    layout = _layout3()
    dup = PureState(layout, [((0, 0, 0), 1)], "a")
    dup2 = PureState(layout, [((0, 0, 0), 1)], "b")
    report = validate_set(StateSet(layout, (dup, dup2)))
    assert not report.pairwise_orthogonal


def test_span_rank_bound():
    rng = np.random.default_rng(3)
    layout = PartyLayout.uniform(("A", "B"), 2)
    states = tuple(
        _random_state(layout, rng, label=f"s{i}") for i in range(7)
    )
    report = validate_set(StateSet(layout, states))
    assert report.span_rank <= min(7, layout.total_dim)


def test_embed_shift_preserves_inner_products_exactly():
    rng = np.random.default_rng(5)
    layout = _layout3()
    states = tuple(_random_state(layout, rng, label=f"s{i}") for i in range(6))
    sset = StateSet(layout, states)
    shifted = embed_shift(sset, (1, 2, 0), dims=(5, 6, 4))
    for i in range(6):
        for j in range(6):
            assert inner_product(sset[i], sset[j]) == inner_product(
                shifted[i], shifted[j]
            )


def test_embed_shift_identity_and_errors():
    s24 = set3_states()
    same = embed_shift(s24, (0, 0, 0))
    assert same.states == s24.states
    with pytest.raises(ValueError):
        embed_shift(s24, (1, 0, 0))  # index 2 -> 3 escapes dim 3
    core = embed_shift(s24, (1, 1, 1), dims=(5, 5, 5))
    levels = {c for s in core.states for idx in s.support for c in idx}
    assert levels == {1, 2, 3}


def test_json_round_trip_byte_identical():
    s24 = set3_states()
    doc = state_set_to_dict(s24)
    text = json.dumps(doc, indent=1)
    again = state_set_from_dict(json.loads(text))
    assert again == s24
    assert json.dumps(state_set_to_dict(again), indent=1) == text


def test_state_set_label_uniqueness():
    layout = _layout3()
    a = PureState(layout, [((0, 0, 0), 1)], "x")
    b = PureState(layout, [((1, 1, 1), 1)], "x")
    with pytest.raises(ValueError):
        StateSet(layout, (a, b))


def test_norm_unnormalized_convention():
    layout = _layout3()
    s = PureState(layout, [((0, 0, 0), 1), ((1, 1, 1), 1)])
    assert norm(s) == pytest.approx(math.sqrt(2))
