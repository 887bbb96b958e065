"""Finite control groups modulo global phase: closure, Cayley graph, Euler cycle.

Generators are unitaries produced by bounded-strength pulses.  The closure
identifies matrices equal up to a global phase, builds the multiplication
table and per-generator permutations, and extracts a deterministic Eulerian
cycle on the Cayley graph (edges g -> gamma g).  The group-conjugation
average and a commutant-dimension diagnostic live here too.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .pauli import (
    OperatorSum,
    is_unitary,
    matrix_exp,
    num_qubits,
    single_pauli_word_of,
    to_dense,
)

PHASE_CANON_TOL = 1e-8
DEFAULT_MAX_ORDER = 256


class ClosureError(ValueError):
    """Group closure failed (non-finite set, bad generators, or overflow)."""


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """One control generator: its unitary, pulse axis, and total pulse area.

    The pulse drives exp(-i theta * axis) with theta ramping from 0 to
    target_angle, so the end-of-ramp propagator must equal `unitary` up to a
    global phase.
    """

    label: str
    unitary: np.ndarray
    control_axis: OperatorSum
    target_angle: float

    def __post_init__(self):
        if not is_unitary(self.unitary):
            raise ClosureError(f"generator {self.label!r} is not unitary")
        end = matrix_exp(to_dense(self.control_axis), self.target_angle)
        if not _equal_up_to_phase(end, self.unitary, 1e-10):
            raise ClosureError(
                f"generator {self.label!r}: exp(-i*angle*axis) does not match "
                "the declared unitary up to phase"
            )

    @property
    def n_qubits(self) -> int:
        return num_qubits(self.unitary)


def canonical_phase(u: np.ndarray, tol: float = PHASE_CANON_TOL) -> np.ndarray:
    """Rotate the first entry of largest modulus to the positive real axis."""
    flat = np.abs(u).ravel()
    top = flat.max()
    pivot = int(np.argmax(flat >= top - tol))
    z = u.ravel()[pivot]
    return u * (z.conjugate() / abs(z))


def _equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return bool(
        np.allclose(canonical_phase(a), canonical_phase(b), atol=tol, rtol=0.0)
    )


class _CanonicalIndex:
    """Lookup table for phase-canonicalized matrices with tolerance."""

    def __init__(self, tol: float = PHASE_CANON_TOL):
        self.tol = tol
        self.matrices: list[np.ndarray] = []
        self._by_key: dict[bytes, int] = {}

    @staticmethod
    def _key(canon: np.ndarray) -> bytes:
        return np.round(canon, 8).tobytes()

    def find(self, u: np.ndarray) -> int | None:
        canon = canonical_phase(u, self.tol)
        hit = self._by_key.get(self._key(canon))
        if hit is not None:
            return hit
        # rounding can split values straddling a decimal boundary; fall back
        # to a linear scan before declaring the element new
        for i, m in enumerate(self.matrices):
            if np.allclose(m, canon, atol=self.tol, rtol=0.0):
                return i
        return None

    def add(self, u: np.ndarray) -> int:
        canon = canonical_phase(u, self.tol)
        idx = len(self.matrices)
        self.matrices.append(canon)
        self._by_key[self._key(canon)] = idx
        return idx


@dataclass(eq=False)
class GroupClosure:
    """Finite group of unitaries modulo phase, with its Cayley structure.

    elements[i] are phase-canonicalized; mult_table[i, j] is the index of
    elements[i] @ elements[j] modulo phase; generator_edges[label][i] is the
    index of U_label @ elements[i] (the Cayley edge i -> gamma i).
    """

    elements: list[np.ndarray]
    identity_index: int
    mult_table: np.ndarray
    generator_edges: dict[str, np.ndarray]
    generators: tuple[GeneratorSpec, ...]
    element_labels: list[str] = field(default_factory=list)
    name: str | None = None
    _index: "_CanonicalIndex | None" = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def generator_labels(self) -> list[str]:
        return [g.label for g in self.generators]

    @property
    def n_qubits(self) -> int:
        return num_qubits(self.elements[0])

    def index_of(self, u: np.ndarray) -> int:
        """Index of a unitary equal to some element up to phase."""
        if self._index is None:
            index = _CanonicalIndex()
            for m in self.elements:
                index.add(m)
            self._index = index
        found = self._index.find(u)
        if found is None:
            raise KeyError("matrix is not an element of this closure")
        return found


def close_group(
    generators: list[GeneratorSpec],
    max_order: int = DEFAULT_MAX_ORDER,
    name: str | None = None,
) -> GroupClosure:
    """Breadth-first closure of the generators under multiplication mod phase."""
    if not generators:
        raise ClosureError("at least one generator required")
    dims = {g.unitary.shape for g in generators}
    if len(dims) != 1:
        raise ClosureError("generators act on different dimensions")
    dim = generators[0].unitary.shape[0]

    index = _CanonicalIndex()
    index.add(np.eye(dim, dtype=complex))
    words: list[tuple[str, ...]] = [()]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for gen in generators:
            prod = gen.unitary @ index.matrices[i]
            j = index.find(prod)
            if j is None:
                if len(index.matrices) >= max_order:
                    raise ClosureError(
                        f"closure exceeded max_order={max_order}; generators may "
                        "not define a finite projective group"
                    )
                j = index.add(prod)
                words.append((gen.label,) + words[i])
                queue.append(j)

    elements = index.matrices
    order = len(elements)
    mult_table = np.empty((order, order), dtype=int)
    for i in range(order):
        for j in range(order):
            k = index.find(elements[i] @ elements[j])
            if k is None:
                raise ClosureError("closure is not multiplication-complete")
            mult_table[i, j] = k

    generator_edges = {}
    for gen in generators:
        gi = index.find(gen.unitary)
        generator_edges[gen.label] = mult_table[gi, :].copy()

    labels = _element_labels(elements, words)
    return GroupClosure(
        elements=elements,
        identity_index=0,
        mult_table=mult_table,
        generator_edges=generator_edges,
        generators=tuple(generators),
        element_labels=labels,
        name=name,
        _index=index,
    )


def _element_labels(elements, words) -> list[str]:
    """Stable human-readable labels: the Pauli word when the element is one
    (up to phase), else the generator word discovered during closure."""
    labels = []
    for mat, word in zip(elements, words):
        pw = single_pauli_word_of(mat)
        if pw is not None:
            labels.append(pw.label())
        else:
            labels.append("*".join(word) if word else "I")
    if len(set(labels)) != len(labels):
        labels = [f"{lab}#{i}" for i, lab in enumerate(labels)]
    return labels


@dataclass(frozen=True)
class CayleyGraph:
    """Directed labeled multigraph of a closure: edges g -> gamma g."""

    order: int
    edges: tuple[tuple[str, int, int], ...]
    identity_index: int

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class EulerCycle:
    """Closed walk traversing each Cayley edge exactly once."""

    edge_sequence: tuple[tuple[str, int, int], ...]
    group: GroupClosure

    @property
    def length(self) -> int:
        return len(self.edge_sequence)

    def generator_sequence(self) -> list[str]:
        return [lab for lab, _, _ in self.edge_sequence]


def build_cayley_graph(g: GroupClosure) -> CayleyGraph:
    edges = []
    for i in range(g.order):
        for gen in g.generators:
            edges.append((gen.label, i, int(g.generator_edges[gen.label][i])))
    return CayleyGraph(
        order=g.order, edges=tuple(edges), identity_index=g.identity_index
    )


def eulerian_cycle(graph: CayleyGraph, g: GroupClosure) -> EulerCycle:
    """Hierholzer traversal from the identity vertex.

    Out-edges are consumed in declared generator order, which makes the
    resulting schedule reproducible across runs.
    """
    out: dict[int, deque] = {i: deque() for i in range(graph.order)}
    for lab, u, v in graph.edges:
        out[u].append((lab, v))

    start = graph.identity_index
    stack: list[tuple[int, tuple[str, int, int] | None]] = [(start, None)]
    path: list[tuple[str, int, int]] = []
    while stack:
        v, arriving = stack[-1]
        if out[v]:
            lab, w = out[v].popleft()
            stack.append((w, (lab, v, w)))
        else:
            stack.pop()
            if arriving is not None:
                path.append(arriving)
    path.reverse()

    if len(path) != graph.edge_count:
        raise AssertionError(
            "Cayley graph is disconnected; generators do not generate the group"
        )
    return EulerCycle(edge_sequence=tuple(path), group=g)


def group_average(a: np.ndarray, g: GroupClosure) -> np.ndarray:
    """Uniform conjugation average (1/|G|) sum_g U_g^dag a U_g.

    Projects onto the commutant of the representation; idempotent and
    trace-preserving.
    """
    if a.shape != g.elements[0].shape:
        raise ValueError("dimension mismatch")
    acc = np.zeros_like(a, dtype=complex)
    for u in g.elements:
        acc += u.conj().T @ a @ u
    return acc / g.order


def commutant_dimension(g: GroupClosure) -> int:
    """Dimension of {A : [A, U_g] = 0 for all g}; 1 iff irreducible.

    Commuting with every generator suffices.  The constraint A U - U A = 0 is
    vectorized as (U^T kron I - I kron U) vec(A) = 0 and the null space is
    counted by SVD.
    """
    dim = g.elements[0].shape[0]
    eye = np.eye(dim)
    blocks = []
    for gen in g.generators:
        u = g.elements[g.index_of(gen.unitary)]
        blocks.append(np.kron(u.T, eye) - np.kron(eye, u))
    m = np.vstack(blocks)
    svals = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(svals < 1e-8))
