"""Certification of local irreducibility via orthogonality-preserving POVMs.

For a mutually orthogonal set, a measurement element E acting on one side of a
bipartition preserves orthogonality iff <psi_i| (E x I) |psi_j> = 0 for every
state pair.  These are linear constraints on E; restricting E to the real
vector space of Hermitian matrices and computing the constraint nullspace
decides whether every orthogonality-preserving element is proportional to the
identity (the "trivial" case).

Triviality of all such measurements on every side of every bipartition is a
sufficient criterion for strong nonlocality; a nontrivial solution is reported
as a witness, never as a proof of reducibility.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

from .states import DEFAULT_TOL, Bipartition, StateSet, inner_product, norm

_SQRT2 = math.sqrt(2.0)

# Rows whose largest coefficient falls below this (relative to the product of
# the two state norms) carry no constraint beyond roundoff and are dropped.
_ROW_DROP = 1e-12


def _pair_slot(m: int, k: int, l: int) -> int:
    """Coordinate offset of the (k, l) upper-triangle pair, k < l."""
    return m + 2 * (k * m - k * (k + 1) // 2 + (l - k - 1))


def hermitian_from_coords(v: Sequence[float], m: int) -> np.ndarray:
    """Inverse of :func:`coords_from_hermitian`."""
    v = np.asarray(v, dtype=float)
    mat = np.zeros((m, m), dtype=complex)
    for k in range(m):
        mat[k, k] = v[k]
    pos = m
    for k in range(m):
        for l in range(k + 1, m):
            x = v[pos] / _SQRT2
            y = v[pos + 1] / _SQRT2
            mat[k, l] = x + 1j * y
            mat[l, k] = x - 1j * y
            pos += 2
    return mat


def coords_from_hermitian(mat: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix: m diagonal entries, then
    sqrt(2)-scaled (re, im) per upper-triangle entry.

    The scaling makes the coordinate 2-norm equal the Frobenius norm, so an
    orthonormal coordinate basis maps to Frobenius-orthonormal matrices.
    """
    mat = np.asarray(mat, dtype=complex)
    m = mat.shape[0]
    if mat.shape != (m, m) or not np.allclose(mat, mat.conj().T):
        raise ValueError("expected a Hermitian matrix")
    v = np.zeros(m * m)
    v[:m] = mat.diagonal().real
    pos = m
    for k in range(m):
        for l in range(k + 1, m):
            v[pos] = mat[k, l].real * _SQRT2
            v[pos + 1] = mat[k, l].imag * _SQRT2
            pos += 2
    return v


def identity_coords(m: int) -> np.ndarray:
    v = np.zeros(m * m)
    v[:m] = 1.0
    return v


@dataclass(frozen=True)
class ConstraintSystem:
    """Real linear constraints on the actor-side Hermitian element.

    Each state pair with nonvanishing coupling contributes a real and an
    imaginary row; identically zero rows are dropped.  ``provenance`` records
    the generating pair labels per row.
    """

    m: int
    rows: scipy.sparse.csr_matrix
    provenance: tuple[tuple[str, str], ...]
    n_pairs: int
    n_coupled_pairs: int


@dataclass(frozen=True)
class TrivialityVerdict:
    """Outcome of one (bipartition, actor) check.

    ``trivial`` iff the solution space is spanned by the identity.  When
    nontrivial, ``witness`` is a traceless unit-norm Hermitian solution: for
    any such W, E = (W + lam*I)/c with lam > max|eig(W)| and c normalizing is
    a positive nontrivial element, and {E, I - E} is a valid measurement that
    preserves all pairwise orthogonalities.
    """

    trivial: bool
    solution_dim: int
    witness: np.ndarray | None

    @property
    def verdict(self) -> str:
        return "Trivial" if self.trivial else "Nontrivial"


@dataclass(frozen=True)
class CheckResult:
    cut: str
    actor: str
    verdict: TrivialityVerdict


@dataclass(frozen=True)
class NonlocalityReport:
    """All six (bipartition, actor) verdicts of a tripartite set."""

    checks: tuple[CheckResult, ...]
    strongly_nonlocal: bool

    def first_witness(self) -> tuple[CheckResult, np.ndarray] | None:
        for c in self.checks:
            if not c.verdict.trivial and c.verdict.witness is not None:
                return c, c.verdict.witness
        return None


def _resolve_actor(
    sset: StateSet, cut: Bipartition, actor: Sequence[str] | str
) -> tuple[str, ...]:
    if isinstance(actor, str):
        actor_set = {actor} if actor in sset.layout.parties else set(actor)
    else:
        actor_set = set(actor)
    if actor_set == set(cut.left):
        return cut.left
    if actor_set == set(cut.right):
        return cut.right
    raise ValueError(f"actor {actor!r} is not a side of bipartition {cut.name}")


def assemble_constraints(
    sset: StateSet,
    cut: Bipartition,
    actor: Sequence[str] | str,
    tol: float = DEFAULT_TOL,
) -> ConstraintSystem:
    """Build the orthogonality-preservation constraint rows for one actor side.

    The unknown is an m x m Hermitian element on the actor side (m = product
    of the actor dims).  Terms of a state pair couple only where the non-actor
    index components agree, so rows are assembled sparsely.
    """
    cut.validate_for(sset.layout)
    actor_parties = _resolve_actor(sset, cut, actor)
    layout = sset.layout
    norms = [norm(s) for s in sset.states]
    for i in range(len(sset)):
        for j in range(i + 1, len(sset)):
            if abs(inner_product(sset[i], sset[j])) > tol * norms[i] * norms[j]:
                raise ValueError(
                    f"input set is not mutually orthogonal "
                    f"({sset[i].label}, {sset[j].label})"
                )

    actor_axes = [layout.axis(p) for p in actor_parties]
    other_axes = [a for a in range(len(layout.parties)) if a not in actor_axes]
    actor_dims = [layout.dims[a] for a in actor_axes]
    m = int(np.prod(actor_dims)) if actor_dims else 1
    strides = []
    acc = 1
    for d in reversed(actor_dims):
        strides.append(acc)
        acc *= d
    strides = list(reversed(strides))

    grouped = []
    for s in sset.states:
        groups: dict[tuple[int, ...], list[tuple[int, complex]]] = {}
        for idx, amp in s.terms:
            u = sum(idx[ax] * st for ax, st in zip(actor_axes, strides))
            v = tuple(idx[ax] for ax in other_axes)
            groups.setdefault(v, []).append((u, amp))
        grouped.append(groups)

    data: list[float] = []
    indices: list[int] = []
    indptr: list[int] = [0]
    provenance: list[tuple[str, str]] = []
    n_coupled = 0

    for i in range(len(sset)):
        gi = grouped[i]
        for j in range(i + 1, len(sset)):
            gj = grouped[j]
            small, big, swap = (gi, gj, False) if len(gi) <= len(gj) else (gj, gi, True)
            couplings: dict[tuple[int, int], complex] = {}
            for v, terms_small in small.items():
                terms_big = big.get(v)
                if terms_big is None:
                    continue
                ti, tj = (terms_small, terms_big) if not swap else (terms_big, terms_small)
                for (u_i, a_i) in ti:
                    conj_ai = a_i.conjugate()
                    for (u_j, a_j) in tj:
                        key = (u_i, u_j)
                        couplings[key] = couplings.get(key, 0j) + conj_ai * a_j
            scale = _ROW_DROP * norms[i] * norms[j]
            if not any(abs(c) > scale for c in couplings.values()):
                continue
            re_row: dict[int, float] = {}
            im_row: dict[int, float] = {}
            folded: set[tuple[int, int]] = set()
            for (u, w), c in couplings.items():
                if u == w:
                    re_row[u] = re_row.get(u, 0.0) + c.real
                    im_row[u] = im_row.get(u, 0.0) + c.imag
                    continue
                k, l = (u, w) if u < w else (w, u)
                if (k, l) in folded:
                    continue
                folded.add((k, l))
                c_kl = couplings.get((k, l), 0j)
                c_lk = couplings.get((l, k), 0j)
                s_sum = c_kl + c_lk
                s_dif = c_kl - c_lk
                slot = _pair_slot(m, k, l)
                re_row[slot] = re_row.get(slot, 0.0) + s_sum.real / _SQRT2
                re_row[slot + 1] = re_row.get(slot + 1, 0.0) - s_dif.imag / _SQRT2
                im_row[slot] = im_row.get(slot, 0.0) + s_sum.imag / _SQRT2
                im_row[slot + 1] = im_row.get(slot + 1, 0.0) + s_dif.real / _SQRT2
            n_coupled += 1
            pair = (sset[i].label, sset[j].label)
            for row in (re_row, im_row):
                entries = [(col, val) for col, val in sorted(row.items()) if abs(val) > scale]
                if not entries:
                    continue
                for col, val in entries:
                    indices.append(col)
                    data.append(val)
                indptr.append(len(data))
                provenance.append(pair)

    rows = scipy.sparse.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(indptr) - 1, m * m),
    )
    n_pairs = len(sset) * (len(sset) - 1) // 2
    return ConstraintSystem(
        m=m,
        rows=rows,
        provenance=tuple(provenance),
        n_pairs=n_pairs,
        n_coupled_pairs=n_coupled,
    )


def _dedup_rows(rows: scipy.sparse.csr_matrix) -> scipy.sparse.csr_matrix:
    """Drop rows that duplicate another up to scale (direction-level dedup)."""
    seen = set()
    keep = []
    indptr, indices, data = rows.indptr, rows.indices, rows.data
    for r in range(rows.shape[0]):
        lo, hi = indptr[r], indptr[r + 1]
        cols = indices[lo:hi]
        vals = data[lo:hi]
        peak = np.max(np.abs(vals))
        scaled = vals / peak
        if scaled[0] < 0:
            scaled = -scaled
        key = (tuple(cols.tolist()), tuple(np.round(scaled, 12).tolist()))
        if key not in seen:
            seen.add(key)
            keep.append(r)
    if len(keep) == rows.shape[0]:
        return rows
    return rows[keep]


def _nullspace(rows: scipy.sparse.csr_matrix, dim: int, tol: float) -> np.ndarray:
    """Orthonormal nullspace basis (columns) of a tall sparse row matrix.

    Large systems are first compacted blockwise with QR, which preserves the
    singular values exactly, keeping the final SVD at dim x dim.
    """
    n_rows = rows.shape[0]
    if n_rows == 0:
        return np.eye(dim)
    if n_rows <= 3 * dim:
        dense = rows.toarray()
    else:
        block = 3 * dim
        acc: np.ndarray | None = None
        for start in range(0, n_rows, block):
            chunk = rows[start : start + block].toarray()
            stacked = chunk if acc is None else np.vstack([acc, chunk])
            r = scipy.linalg.qr(stacked, mode="r", check_finite=False)[0]
            acc = r[: min(dim, r.shape[0])]
        dense = acc
    svals, vt = np.linalg.svd(dense, full_matrices=True)[1:]
    if svals.size == 0 or svals[0] == 0:
        return np.eye(dim)
    rank = int(np.sum(svals > tol * svals[0]))
    return vt[rank:].T


def solution_space(cs: ConstraintSystem, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Frobenius-orthonormal Hermitian basis of the constraint nullspace."""
    basis = _nullspace(_dedup_rows(cs.rows), cs.m * cs.m, tol)
    return [hermitian_from_coords(basis[:, k], cs.m) for k in range(basis.shape[1])]


def certify_triviality(
    sset: StateSet,
    cut: Bipartition,
    actor: Sequence[str] | str,
    tol: float = DEFAULT_TOL,
) -> TrivialityVerdict:
    """Decide whether every orthogonality-preserving element on ``actor`` is trivial.

    The verdict is Trivial exactly when the Hermitian solution space is
    one-dimensional (the identity direction, which is always a solution for a
    mutually orthogonal input set).  When nontrivial, the witness is the first
    nullspace basis element with the identity direction projected out,
    normalized to unit Frobenius norm; see :class:`TrivialityVerdict` for why
    a witness always yields a valid nontrivial measurement.
    """
    cs = assemble_constraints(sset, cut, actor, tol)
    basis = _nullspace(_dedup_rows(cs.rows), cs.m * cs.m, tol)
    dim = basis.shape[1]
    if dim == 1:
        return TrivialityVerdict(trivial=True, solution_dim=1, witness=None)
    ident = identity_coords(cs.m) / math.sqrt(cs.m)
    witness = None
    for k in range(dim):
        v = basis[:, k]
        v = v - np.dot(ident, v) * ident
        nrm = np.linalg.norm(v)
        if nrm > 1e-6:
            witness = hermitian_from_coords(v / nrm, cs.m)
            break
    return TrivialityVerdict(trivial=False, solution_dim=int(dim), witness=witness)


def standard_checks(layout) -> list[tuple[Bipartition, tuple[str, ...]]]:
    """The six (bipartition, actor) checks of a tripartite layout."""
    if len(layout.parties) != 3:
        raise ValueError("strong nonlocality checks are defined for three parties")
    checks = []
    for p in layout.parties:
        cut = Bipartition.of(layout, [p])
        checks.append((cut, cut.left))
        checks.append((cut, cut.right))
    return checks


def verify_strong_nonlocality(
    sset: StateSet, tol: float = DEFAULT_TOL, workers: int = 1
) -> NonlocalityReport:
    """Run all six checks; strongly nonlocal iff every verdict is Trivial.

    Triviality everywhere is a sufficient criterion: the report should be read
    as "certified" vs "not certified (nontrivial witness found)".
    """
    checks = standard_checks(sset.layout)

    def run(check: tuple[Bipartition, tuple[str, ...]]) -> CheckResult:
        cut, actor = check
        verdict = certify_triviality(sset, cut, actor, tol)
        return CheckResult(cut=cut.name, actor="".join(actor), verdict=verdict)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, checks))
    else:
        results = [run(c) for c in checks]
    return NonlocalityReport(
        checks=tuple(results),
        strongly_nonlocal=all(r.verdict.trivial for r in results),
    )
