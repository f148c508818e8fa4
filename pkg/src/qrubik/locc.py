"""Entanglement-assisted discrimination protocols: trees, playback, resource audit.

A protocol is a finite tree over party-owned registers.  Nodes are local
measurements (branching on outcomes), ideal teleports (register ownership
moves, one shared pair consumed), and answer leaves.  Execution traverses the
tree for each candidate state, tracking branch probabilities and which
declared resources each path consumes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .states import DEFAULT_TOL, StateSet

_PRUNE = 1e-12


class ProtocolError(ValueError):
    """Malformed or physically inconsistent protocol document."""


@dataclass(frozen=True)
class Register:
    name: str
    owner: str
    dim: int


@dataclass(frozen=True)
class RegisterTable:
    registers: tuple[Register, ...]

    def __post_init__(self) -> None:
        names = [r.name for r in self.registers]
        if len(set(names)) != len(names):
            raise ProtocolError("register names must be unique")
        if any(r.dim < 1 for r in self.registers):
            raise ProtocolError("register dims must be >= 1")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers)

    def get(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise ProtocolError(f"unknown register {name!r}")

    def dims(self, names: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.get(n).dim for n in names)


@dataclass(frozen=True)
class ResourceDecl:
    """A shared maximally entangled pair sum_k |k,k> of local dimension ``dim``."""

    name: str
    pair: tuple[str, str]
    dim: int
    registers: tuple[str, str]

    @property
    def ebits(self) -> float:
        return math.log2(self.dim)


@dataclass(frozen=True)
class MeasurementOperator:
    """One outcome operator, stored dense on the ordered register tuple ``regs``."""

    name: str
    regs: tuple[str, ...]
    matrix: np.ndarray
    touches: frozenset[str] = field(default=frozenset())


@dataclass(frozen=True)
class MeasurementStep:
    party: str
    operators: tuple[MeasurementOperator, ...]
    branches: Mapping[str, object]


@dataclass(frozen=True)
class Teleport:
    source: str
    resource: str
    to: str
    then: object


@dataclass(frozen=True)
class Leaf:
    answer: str


@dataclass(frozen=True)
class ProtocolSpec:
    name: str
    table: RegisterTable
    resources: tuple[ResourceDecl, ...]
    root: object
    notes: tuple[str, ...] = ()

    @property
    def principal_registers(self) -> tuple[Register, ...]:
        claimed = {r for res in self.resources for r in res.registers}
        return tuple(r for r in self.table.registers if r.name not in claimed)

    def resource(self, name: str) -> ResourceDecl:
        for res in self.resources:
            if res.name == name:
                return res
        raise ProtocolError(f"unknown resource {name!r}")


def _matrix_from_json(entry: Sequence) -> np.ndarray:
    rows = []
    for row in entry:
        rows.append([complex(cell[0], cell[1]) for cell in row])
    return np.array(rows, dtype=complex)


def matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(c.real), float(c.imag)] for c in row] for row in np.asarray(mat)]


def _extend_operator(
    mat: np.ndarray,
    regs: Sequence[str],
    target: Sequence[str],
    table: RegisterTable,
) -> np.ndarray:
    """Embed an operator into the ordered register tuple ``target`` (identity elsewhere)."""
    if tuple(regs) == tuple(target):
        return mat
    dims = table.dims(regs)
    tensor = mat.reshape(dims + dims)
    n = len(regs)
    extra = [r for r in target if r not in regs]
    for r in extra:
        d = table.get(r).dim
        tensor = np.tensordot(tensor, np.eye(d), axes=0)
        # new axes arrive as (..., out_r, in_r); collect positions later
    # axis layout now: out(regs), in(regs), then (out, in) pairs per extra reg
    out_axes = {r: i for i, r in enumerate(regs)}
    in_axes = {r: n + i for i, r in enumerate(regs)}
    base = 2 * n
    for k, r in enumerate(extra):
        out_axes[r] = base + 2 * k
        in_axes[r] = base + 2 * k + 1
    order = [out_axes[r] for r in target] + [in_axes[r] for r in target]
    tensor = np.transpose(tensor, order)
    full = int(np.prod(table.dims(target)))
    return tensor.reshape(full, full)


def _acts_nontrivially(
    mat: np.ndarray, regs: Sequence[str], reg: str, table: RegisterTable, tol: float
) -> bool:
    """True unless the operator factors as N (x) I on ``reg``."""
    if reg not in regs:
        return False
    dims = table.dims(regs)
    axis = list(regs).index(reg)
    d = dims[axis]
    rest = int(np.prod(dims)) // d
    tensor = mat.reshape(dims + dims)
    # move reg's out/in axes last
    n = len(regs)
    order = [i for i in range(n) if i != axis] + [i for i in range(n, 2 * n) if i != n + axis]
    order += [axis, n + axis]
    t = np.transpose(tensor, order).reshape(rest, rest, d, d)
    candidate = t[:, :, 0, 0]
    recomposed = candidate[:, :, None, None] * np.eye(d)[None, None, :, :]
    scale = max(np.max(np.abs(mat)), 1.0)
    return bool(np.max(np.abs(t - recomposed)) > tol * scale)


def _parse_operator_docs(
    docs: Sequence[Mapping], table: RegisterTable, tol: float
) -> tuple[MeasurementOperator, ...]:
    plain: list[tuple[str, tuple[str, ...], np.ndarray]] = []
    complements: list[str] = []
    order: list[str] = []
    for doc in docs:
        name = doc.get("name")
        if not name:
            raise ProtocolError("measurement operator without a name")
        order.append(name)
        if doc.get("complement"):
            complements.append(name)
            continue
        if "proj" in doc:
            item_regs: list[str] = []
            for item in doc["proj"]:
                for r in item["regs"]:
                    if r not in item_regs:
                        item_regs.append(r)
            regs = tuple(r for r in table.names if r in item_regs)
            dims = table.dims(regs)
            full = int(np.prod(dims))
            mat = np.zeros((full, full), dtype=complex)
            for item in doc["proj"]:
                iregs = tuple(item["regs"])
                proj = np.zeros(
                    (int(np.prod(table.dims(iregs))),) * 2, dtype=complex
                )
                strides = _strides_for(table.dims(iregs))
                for level in item["levels"]:
                    if len(level) != len(iregs):
                        raise ProtocolError(
                            f"level {level} arity mismatch for regs {iregs}"
                        )
                    flat = int(sum(l * s for l, s in zip(level, strides)))
                    proj[flat, flat] += 1.0
                mat = mat + _extend_operator(proj, iregs, regs, table)
        elif "matrix" in doc:
            regs = tuple(doc["regs"])
            if len(set(regs)) != len(regs):
                raise ProtocolError(f"operator {name!r} lists a register twice")
            mat = _matrix_from_json(doc["matrix"])
            full = int(np.prod(table.dims(regs)))
            if mat.shape != (full, full):
                raise ProtocolError(
                    f"operator {name!r} matrix shape {mat.shape} does not match regs {regs}"
                )
        else:
            raise ProtocolError(f"operator {name!r} needs 'proj', 'matrix' or 'complement'")
        plain.append((name, regs, mat))

    if len(order) != len(set(order)):
        raise ProtocolError("operator names within a step must be unique")
    if len(complements) > 1:
        raise ProtocolError("at most one complement operator per step")
    union: list[str] = []
    for _, regs, _ in plain:
        for r in regs:
            if r not in union:
                union.append(r)
    union_t = tuple(r for r in table.names if r in union)
    if not union_t:
        raise ProtocolError("measurement step acts on no registers")
    full = int(np.prod(table.dims(union_t)))
    extended = {
        name: _extend_operator(mat, regs, union_t, table) for name, regs, mat in plain
    }
    if complements:
        total = sum(extended.values()) if extended else np.zeros((full, full))
        extended[complements[0]] = np.eye(full) - total
    ops = []
    for name in order:
        ops.append(MeasurementOperator(name=name, regs=union_t, matrix=extended[name]))
    completeness = sum(op.matrix.conj().T @ op.matrix for op in ops)
    if np.max(np.abs(completeness - np.eye(full))) > tol:
        raise ProtocolError("measurement operators do not satisfy completeness")
    return tuple(ops)


def _strides_for(dims: Sequence[int]) -> list[int]:
    strides = [1] * len(dims)
    for i in range(len(dims) - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    return strides


def parse_protocol(doc: Mapping, tol: float = DEFAULT_TOL) -> ProtocolSpec:
    """Validate and compile a protocol document.

    Checks register uniqueness, resource wiring, measurement completeness,
    measurement locality (a party may only act on registers it owns at that
    point of the tree), and single-use of every teleport resource.
    """
    try:
        table = RegisterTable(
            tuple(Register(r["name"], r["owner"], int(r["dim"])) for r in doc["registers"])
        )
        resource_docs = doc.get("resources", [])
        root_doc = doc["root"]
    except (KeyError, TypeError) as exc:
        raise ProtocolError(f"malformed protocol document: {exc}") from exc

    resources = []
    seen = set()
    for r in resource_docs:
        res = ResourceDecl(
            name=r["name"],
            pair=tuple(r["pair"]),
            dim=int(r["dim"]),
            registers=tuple(r["registers"]),
        )
        if res.name in seen:
            raise ProtocolError(f"duplicate resource {res.name!r}")
        seen.add(res.name)
        if len(res.pair) != 2 or res.pair[0] == res.pair[1]:
            raise ProtocolError(f"resource {res.name!r} must join two distinct parties")
        owners = {table.get(n).owner for n in res.registers}
        if owners != set(res.pair):
            raise ProtocolError(
                f"resource {res.name!r} registers are not held by its party pair"
            )
        for n in res.registers:
            if table.get(n).dim != res.dim:
                raise ProtocolError(
                    f"resource {res.name!r} register {n!r} dim mismatch"
                )
        resources.append(res)
    resources = tuple(resources)
    by_reg = {}
    for res in resources:
        for n in res.registers:
            if n in by_reg:
                raise ProtocolError(f"register {n!r} claimed by two resources")
            by_reg[n] = res

    parties = {r.owner for r in table.registers}
    teleports_used: set[str] = set()

    def parse_node(node: Mapping, owners: dict[str, str]) -> object:
        kind = node.get("type")
        if kind == "leaf":
            answer = node.get("answer")
            if not isinstance(answer, str) or not answer:
                raise ProtocolError("leaf without an answer")
            return Leaf(answer=answer)
        if kind == "teleport":
            src = node["source"]
            res = None
            for candidate in resources:
                if candidate.name == node["resource"]:
                    res = candidate
            if res is None:
                raise ProtocolError(f"teleport references unknown resource {node['resource']!r}")
            if res.name in teleports_used:
                raise ProtocolError(f"resource {res.name!r} teleported twice")
            teleports_used.add(res.name)
            dest = node["to"]
            if dest not in parties:
                raise ProtocolError(f"teleport destination {dest!r} is not a party")
            if table.get(src).dim != res.dim:
                raise ProtocolError(
                    f"teleport of {src!r} (dim {table.get(src).dim}) over a "
                    f"dim-{res.dim} resource"
                )
            if owners[src] not in res.pair or dest not in res.pair:
                raise ProtocolError(
                    f"teleport {src!r}->{dest!r} does not ride resource {res.name!r}"
                )
            new_owners = dict(owners)
            new_owners[src] = dest
            return Teleport(source=src, resource=res.name, to=dest, then=parse_node(node["then"], new_owners))
        if kind == "measure":
            party = node["party"]
            if party not in parties:
                raise ProtocolError(f"unknown measuring party {party!r}")
            ops = _parse_operator_docs(node["operators"], table, tol)
            for op in ops:
                for reg in op.regs:
                    if owners[reg] != party:
                        raise ProtocolError(
                            f"party {party!r} measures register {reg!r} "
                            f"owned by {owners[reg]!r}"
                        )
            touching = []
            for op in ops:
                touched = frozenset(
                    res.name
                    for res in resources
                    if any(
                        _acts_nontrivially(op.matrix, op.regs, reg, table, tol)
                        for reg in res.registers
                        if reg in op.regs
                    )
                )
                touching.append(
                    MeasurementOperator(op.name, op.regs, op.matrix, touched)
                )
            branch_docs = node.get("branches", {})
            names = {op.name for op in ops}
            if set(branch_docs) != names:
                raise ProtocolError(
                    f"branches {sorted(branch_docs)} do not match outcomes {sorted(names)}"
                )
            branches = {
                name: parse_node(branch_docs[name], owners) for name in branch_docs
            }
            return MeasurementStep(party=party, operators=tuple(touching), branches=branches)
        raise ProtocolError(f"unknown node type {kind!r}")

    owners0 = {r.name: r.owner for r in table.registers}
    root = parse_node(root_doc, owners0)
    return ProtocolSpec(
        name=doc.get("name", "protocol"),
        table=table,
        resources=resources,
        root=root,
        notes=tuple(doc.get("notes", [])),
    )


@dataclass(frozen=True)
class SimState:
    """Interpreter state: live register axes, vector, ownership, consumed set."""

    table: RegisterTable
    live: tuple[str, ...]
    vector: np.ndarray
    owners: Mapping[str, str]
    consumed: frozenset[str]


def apply_measurement(
    sim: SimState, op: MeasurementOperator
) -> tuple[SimState, float]:
    """Apply one outcome operator; returns the unnormalized post-state and the
    Born probability |M psi|^2 / |psi|^2."""
    axes = [sim.live.index(r) for r in op.regs]
    dims = sim.vector.shape
    q = int(np.prod([dims[a] for a in axes]))
    moved = np.moveaxis(sim.vector, axes, range(len(axes)))
    flat = moved.reshape(q, -1)
    before = float(np.vdot(flat, flat).real)
    if before == 0.0:
        raise ValueError("cannot measure the zero state")
    post = op.matrix @ flat
    prob = float(np.vdot(post, post).real) / before
    post_tensor = np.moveaxis(post.reshape(moved.shape), range(len(axes)), axes)
    return (
        SimState(sim.table, sim.live, post_tensor, sim.owners, sim.consumed),
        prob,
    )


def teleport(
    sim: SimState, source: str, resource: ResourceDecl, to: str, tol: float = DEFAULT_TOL
) -> SimState:
    """Ideal teleport: reassign ``source`` to ``to`` and consume the resource.

    Outcome corrections are local unitaries and are modeled away, so the
    amplitudes are unchanged.  The resource pair must still be in its initial
    entangled state; it is factored out of the live vector.
    """
    if resource.name in sim.consumed:
        raise ValueError(f"resource {resource.name!r} already consumed")
    if sim.table.get(source).dim != resource.dim:
        raise ValueError(
            f"teleport of {source!r} needs a dim-{sim.table.get(source).dim} resource"
        )
    r1, r2 = resource.registers
    axes = [sim.live.index(r1), sim.live.index(r2)]
    d = resource.dim
    moved = np.moveaxis(sim.vector, axes, (-2, -1))
    rest_shape = moved.shape[:-2]
    mat = moved.reshape(-1, d * d)
    mes = np.eye(d, dtype=complex).reshape(-1)
    v = mat @ mes.conj() / d
    residual = mat - np.outer(v, mes)
    if np.linalg.norm(residual) > tol * max(np.linalg.norm(mat), 1e-30):
        raise ValueError(
            f"resource {resource.name!r} is no longer in its initial entangled state"
        )
    live = tuple(n for n in sim.live if n not in (r1, r2))
    owners = dict(sim.owners)
    owners[source] = to
    return SimState(
        sim.table,
        live,
        v.reshape(rest_shape),
        owners,
        sim.consumed | {resource.name},
    )


@dataclass(frozen=True)
class BranchOutcome:
    answer: str
    probability: float
    resources: tuple[str, ...]


@dataclass(frozen=True)
class StateOutcome:
    label: str
    branches: tuple[BranchOutcome, ...]
    probability_total: float
    correct: bool


@dataclass(frozen=True)
class ResourceUsage:
    resource: str
    pair: tuple[str, str]
    dim: int
    expected_copies: float

    @property
    def ebits(self) -> float:
        return self.expected_copies * math.log2(self.dim)


@dataclass(frozen=True)
class PairUsage:
    pair: tuple[str, str]
    dim: int
    expected_copies: float

    @property
    def ebits(self) -> float:
        return self.expected_copies * math.log2(self.dim)


@dataclass(frozen=True)
class ExecutionReport:
    """Per-state discrimination outcomes and expected resource consumption.

    Expectations are taken over a uniform prior on the candidate set; a
    resource counts as consumed on a path when a teleport rides it or any
    measurement along the path acts non-proportionally-to-identity on one of
    its registers.
    """

    outcomes: tuple[StateOutcome, ...]
    correct: bool
    usage: tuple[ResourceUsage, ...]
    pair_usage: tuple[PairUsage, ...]
    total_ebits: float


def _initial_state(spec: ProtocolSpec, state) -> SimState:
    table = spec.table
    names = table.names
    dims = tuple(r.dim for r in table.registers)
    principal = [r.name for r in spec.principal_registers]
    vector = np.zeros(dims, dtype=complex)
    res_regs = [(res, res.registers) for res in spec.resources]
    ranges = [range(res.dim) for res, _ in res_regs]
    pos = {n: i for i, n in enumerate(names)}
    for idx, amp in state.terms:
        base = [0] * len(names)
        for comp, reg in zip(idx, principal):
            base[pos[reg]] = comp
        for combo in itertools.product(*ranges) if ranges else [()]:
            full = list(base)
            for (res, (ra, rb)), level in zip(res_regs, combo):
                full[pos[ra]] = level
                full[pos[rb]] = level
            vector[tuple(full)] = amp
    owners = {r.name: r.owner for r in table.registers}
    return SimState(table, names, vector, owners, frozenset())


def run_protocol(
    spec: ProtocolSpec, sset: StateSet, tol: float = DEFAULT_TOL
) -> ExecutionReport:
    """Traverse the tree for every candidate state and account the resources."""
    principal = spec.principal_registers
    if len(principal) != len(sset.layout.parties):
        raise ProtocolError(
            f"state set has {len(sset.layout.parties)} parties but the protocol "
            f"exposes {len(principal)} principal registers"
        )
    for reg, d in zip(principal, sset.layout.dims):
        if reg.dim != d:
            raise ProtocolError(
                f"principal register {reg.name!r} has dim {reg.dim}, states need {d}"
            )

    outcomes = []
    copies = {res.name: 0.0 for res in spec.resources}
    weight = 1.0 / len(sset) if len(sset) else 0.0
    for state in sset.states:
        sim0 = _initial_state(spec, state)
        branches: list[BranchOutcome] = []

        def walk(node, sim: SimState, prob: float) -> None:
            if isinstance(node, Leaf):
                branches.append(
                    BranchOutcome(
                        answer=node.answer,
                        probability=prob,
                        resources=tuple(sorted(sim.consumed)),
                    )
                )
                return
            if isinstance(node, Teleport):
                walk(
                    node.then,
                    teleport(sim, node.source, spec.resource(node.resource), node.to, tol),
                    prob,
                )
                return
            for op in node.operators:
                post, p = apply_measurement(sim, op)
                if p <= _PRUNE:
                    continue
                next_sim = SimState(
                    post.table,
                    post.live,
                    post.vector,
                    post.owners,
                    post.consumed | op.touches,
                )
                walk(node.branches[op.name], next_sim, prob * p)

        walk(spec.root, sim0, 1.0)
        total = sum(b.probability for b in branches)
        correct = bool(branches) and all(b.answer == state.label for b in branches)
        for b in branches:
            for name in b.resources:
                copies[name] += weight * b.probability
        outcomes.append(
            StateOutcome(
                label=state.label,
                branches=tuple(branches),
                probability_total=total,
                correct=correct,
            )
        )

    usage = tuple(
        ResourceUsage(
            resource=res.name,
            pair=res.pair,
            dim=res.dim,
            expected_copies=copies[res.name],
        )
        for res in spec.resources
    )
    pair_map: dict[tuple[tuple[str, str], int], float] = {}
    for u in usage:
        key = (tuple(sorted(u.pair)), u.dim)
        pair_map[key] = pair_map.get(key, 0.0) + u.expected_copies
    pair_usage = tuple(
        PairUsage(pair=pair, dim=dim, expected_copies=c)
        for (pair, dim), c in sorted(pair_map.items())
    )
    total_ebits = sum(u.ebits for u in usage)
    return ExecutionReport(
        outcomes=tuple(outcomes),
        correct=all(o.correct for o in outcomes),
        usage=usage,
        pair_usage=pair_usage,
        total_ebits=total_ebits,
    )


def check_orthogonality_preservation(
    spec: ProtocolSpec, sset: StateSet, tol: float = DEFAULT_TOL
) -> bool:
    """True iff after every step the surviving candidates stay mutually orthogonal."""
    sims = [_initial_state(spec, s) for s in sset.states]

    def ortho(group: list[SimState]) -> bool:
        vecs = [g.vector.reshape(-1) for g in group]
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                bound = tol * np.linalg.norm(vecs[i]) * np.linalg.norm(vecs[j])
                if abs(np.vdot(vecs[i], vecs[j])) > bound:
                    return False
        return True

    def walk(node, group: list[SimState]) -> bool:
        if isinstance(node, Leaf) or not group:
            return True
        if isinstance(node, Teleport):
            res = spec.resource(node.resource)
            moved = [teleport(g, node.source, res, node.to, tol) for g in group]
            return ortho(moved) and walk(node.then, moved)
        for op in node.operators:
            survivors = []
            for g in group:
                post, p = apply_measurement(g, op)
                if p > _PRUNE:
                    survivors.append(post)
            if not ortho(survivors):
                return False
            if not walk(node.branches[op.name], survivors):
                return False
        return True

    return ortho(sims) and walk(spec.root, sims)
