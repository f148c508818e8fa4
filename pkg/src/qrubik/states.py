"""Sparse multiparty pure states: layouts, inner products, flattening, set validation.

States are kept unnormalized throughout; probabilities are always computed as
Born-rule ratios, so normalization only ever happens inside the simulator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_TOL = 1e-9

Index = tuple[int, ...]


@dataclass(frozen=True)
class PartyLayout:
    """Ordered parties with local dimensions, the tensor factors of the joint space."""

    parties: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parties", tuple(self.parties))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.parties:
            raise ValueError("layout needs at least one party")
        if len(self.parties) != len(self.dims):
            raise ValueError("parties and dims must have equal length")
        if len(set(self.parties)) != len(self.parties):
            raise ValueError("party labels must be distinct")
        if any(d < 1 for d in self.dims):
            raise ValueError("every local dimension must be >= 1")

    @classmethod
    def uniform(cls, parties: Sequence[str], dim: int) -> "PartyLayout":
        return cls(tuple(parties), tuple(dim for _ in parties))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def axis(self, label: str) -> int:
        try:
            return self.parties.index(label)
        except ValueError:
            raise KeyError(f"unknown party {label!r}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.axis(label)]


@dataclass(frozen=True)
class Bipartition:
    """A split of the parties into two nonempty complementary groups."""

    left: tuple[str, ...]
    right: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        if not self.left or not self.right:
            raise ValueError("both sides of a bipartition must be nonempty")
        if set(self.left) & set(self.right):
            raise ValueError("bipartition sides must be disjoint")

    @classmethod
    def of(cls, layout: PartyLayout, left: Iterable[str]) -> "Bipartition":
        """Bipartition with the given left side; both sides keep layout order."""
        left_set = set(left)
        unknown = left_set - set(layout.parties)
        if unknown:
            raise ValueError(f"unknown parties {sorted(unknown)} in bipartition")
        l = tuple(p for p in layout.parties if p in left_set)
        r = tuple(p for p in layout.parties if p not in left_set)
        return cls(l, r)

    def validate_for(self, layout: PartyLayout) -> None:
        if set(self.left) | set(self.right) != set(layout.parties):
            raise ValueError(
                f"bipartition {self.name} does not cover layout parties {layout.parties}"
            )

    @property
    def name(self) -> str:
        return "".join(self.left) + "|" + "".join(self.right)


def _canonical_terms(
    layout: PartyLayout, terms: Iterable[tuple[Sequence[int], complex]]
) -> tuple[tuple[Index, complex], ...]:
    merged: dict[Index, complex] = {}
    for idx, amp in terms:
        key = tuple(int(i) for i in idx)
        if len(key) != len(layout.parties):
            raise ValueError(f"index {key} has wrong arity for layout {layout.parties}")
        for component, d in zip(key, layout.dims):
            if not 0 <= component < d:
                raise ValueError(f"index {key} out of range for dims {layout.dims}")
        merged[key] = merged.get(key, 0j) + complex(amp)
    return tuple(sorted((k, v) for k, v in merged.items() if v != 0))


@dataclass(frozen=True)
class PureState:
    """Unnormalized pure state as a sparse list of (multi-index, amplitude) terms.

    Terms are canonicalized on construction: duplicate indices merged, zero
    amplitudes dropped, and the list sorted lexicographically by multi-index,
    which fixes serialization byte-for-byte.
    """

    layout: PartyLayout
    terms: tuple[tuple[Index, complex], ...]
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _canonical_terms(self.layout, self.terms))

    @property
    def support(self) -> tuple[Index, ...]:
        return tuple(idx for idx, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self.layout, [(i, a * factor) for i, a in self.terms], self.label)

    def relabeled(self, label: str) -> "PureState":
        return PureState(self.layout, self.terms, label)

    def to_vector(self) -> np.ndarray:
        """Dense coefficient vector over the full Hilbert space, lexicographic order."""
        vec = np.zeros(self.layout.total_dim, dtype=complex)
        strides = _strides(self.layout.dims)
        for idx, amp in self.terms:
            vec[int(np.dot(idx, strides))] = amp
        return vec


def _strides(dims: Sequence[int]) -> np.ndarray:
    strides = np.ones(len(dims), dtype=np.int64)
    for i in range(len(dims) - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    return strides


def inner_product(a: PureState, b: PureState) -> complex:
    """Hermitian inner product <a|b> = sum conj(amp_a) * amp_b over matching indices."""
    if a.layout != b.layout:
        raise ValueError("states live on different layouts")
    if len(a.terms) > len(b.terms):
        return complex(inner_product(b, a)).conjugate()
    b_map = dict(b.terms)
    total = 0j
    for idx, amp in a.terms:
        other = b_map.get(idx)
        if other is not None:
            total += amp.conjugate() * other
    return total


def norm(s: PureState) -> float:
    return math.sqrt(inner_product(s, s).real)


def flatten(s: PureState, cut: Bipartition) -> np.ndarray:
    """Coefficient matrix of a state across a bipartition.

    Rows enumerate the left-side basis and columns the right-side basis, both
    in lexicographic order of the parties as they appear in the layout.
    """
    cut.validate_for(s.layout)
    left_axes = [s.layout.axis(p) for p in cut.left]
    right_axes = [s.layout.axis(p) for p in cut.right]
    left_dims = [s.layout.dims[i] for i in left_axes]
    right_dims = [s.layout.dims[i] for i in right_axes]
    l_strides = _strides(left_dims)
    r_strides = _strides(right_dims)
    mat = np.zeros((int(np.prod(left_dims)), int(np.prod(right_dims))), dtype=complex)
    for idx, amp in s.terms:
        row = int(sum(idx[ax] * st for ax, st in zip(left_axes, l_strides)))
        col = int(sum(idx[ax] * st for ax, st in zip(right_axes, r_strides)))
        mat[row, col] = amp
    return mat


@dataclass(frozen=True)
class StateSet:
    """An ordered collection of states sharing one layout, with unique labels."""

    layout: PartyLayout
    states: tuple[PureState, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        labels = []
        for i, s in enumerate(self.states):
            if s.layout != self.layout:
                raise ValueError(f"state {i} does not share the set layout")
            if s.label is None:
                raise ValueError(f"state {i} has no label")
            labels.append(s.label)
        if len(set(labels)) != len(labels):
            raise ValueError("state labels must be unique")

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, key: int) -> PureState:
        return self.states[key]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.states)

    def by_label(self, label: str) -> PureState:
        for s in self.states:
            if s.label == label:
                return s
        raise KeyError(f"no state labeled {label!r}")

    def subset(self, count: int) -> "StateSet":
        return StateSet(self.layout, self.states[:count])


@dataclass(frozen=True)
class SetReport:
    """Orthogonality and span diagnostics for one state set."""

    size: int
    pairwise_orthogonal: bool
    span_rank: int


def validate_set(sset: StateSet, tol: float = DEFAULT_TOL) -> SetReport:
    """Check pairwise orthogonality (relative tolerance) and the numerical span rank."""
    states = sset.states
    norms = [norm(s) for s in states]
    orthogonal = True
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            bound = tol * norms[i] * norms[j]
            if abs(inner_product(states[i], states[j])) > bound:
                orthogonal = False
                break
        if not orthogonal:
            break
    if states:
        stacked = np.array([s.to_vector() for s in states])
        svals = np.linalg.svd(stacked, compute_uv=False)
        rank = int(np.sum(svals > tol * svals[0])) if svals[0] > 0 else 0
    else:
        rank = 0
    return SetReport(size=len(states), pairwise_orthogonal=orthogonal, span_rank=rank)


def embed_shift(
    sset: StateSet,
    offsets: Mapping[str, int] | Sequence[int],
    dims: Sequence[int] | None = None,
) -> StateSet:
    """Shift every index component by a per-party offset, optionally enlarging dims.

    Amplitudes are untouched, so all pairwise inner products are preserved
    exactly.  Raises if any shifted index falls outside the target dimensions.
    """
    layout = sset.layout
    if isinstance(offsets, Mapping):
        offs = tuple(int(offsets.get(p, 0)) for p in layout.parties)
    else:
        offs = tuple(int(o) for o in offsets)
        if len(offs) != len(layout.parties):
            raise ValueError("one offset per party required")
    new_dims = tuple(int(d) for d in (dims if dims is not None else layout.dims))
    target = PartyLayout(layout.parties, new_dims)
    shifted = []
    for s in sset.states:
        terms = []
        for idx, amp in s.terms:
            new_idx = tuple(i + o for i, o in zip(idx, offs))
            for component, d in zip(new_idx, new_dims):
                if not 0 <= component < d:
                    raise ValueError(
                        f"shifted index {new_idx} escapes target dims {new_dims}"
                    )
            terms.append((new_idx, amp))
        shifted.append(PureState(target, terms, s.label))
    return StateSet(target, tuple(shifted))


def state_set_to_dict(sset: StateSet) -> dict:
    """JSON-ready document: dims, parties, and per-state sparse terms as [re, im]."""
    return {
        "dims": list(sset.layout.dims),
        "parties": list(sset.layout.parties),
        "states": [
            {
                "label": s.label,
                "terms": [
                    {"idx": list(idx), "amp": [amp.real, amp.imag]}
                    for idx, amp in s.terms
                ],
            }
            for s in sset.states
        ],
    }


def state_set_from_dict(doc: Mapping) -> StateSet:
    try:
        layout = PartyLayout(tuple(doc["parties"]), tuple(doc["dims"]))
        states = []
        for entry in doc["states"]:
            terms = [
                (tuple(t["idx"]), complex(t["amp"][0], t["amp"][1]))
                for t in entry["terms"]
            ]
            states.append(PureState(layout, terms, entry["label"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed state-set document: {exc}") from exc
    return StateSet(layout, tuple(states))


def save_state_set(sset: StateSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_set_to_dict(sset), fh, indent=1)
        fh.write("\n")


def load_state_set(path: str) -> StateSet:
    with open(path, "r", encoding="utf-8") as fh:
        return state_set_from_dict(json.load(fh))
