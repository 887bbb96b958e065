"""Hamiltonians, control-group presets, and lattices for the worked examples.

Covers Heisenberg chains with XYZ/dipolar targets, the single-qubit and
collective Z2 x Z2 control groups, the composed open-system groups, and the
honeycomb-lattice construction that turns Ising couplings into the Kitaev
model with a 48-element group.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .dynamics import OpenSystemModel
from .groups import GeneratorSpec, GroupClosure, close_group
from .pauli import OperatorSum, matrix_exp, to_dense
from .reachability import WeightAssignment

GROUP_PRESETS = ("g1", "g_odd", "g_gl", "g_dephasing", "pauli2", "honeycomb")

EDGE_KINDS = ("forward_slash", "back_slash", "vertical")


def heisenberg_chain(n: int, j: float = 1.0) -> OperatorSum:
    """Nearest-neighbor isotropic Heisenberg chain, open boundary."""
    if n < 2:
        raise ValueError("chain needs at least two qubits")
    if n % 2:
        warnings.warn("odd chain length; the odd-qubit group presets assume even n")
    terms = []
    for i in range(n - 1):
        for s in ("X", "Y", "Z"):
            terms.append((j, {i: s, i + 1: s}))
    return OperatorSum.from_label_terms(terms, n)


def xyz_target(jx: float, jy: float, jz: float) -> OperatorSum:
    """Two-qubit XYZ Hamiltonian Jx XX + Jy YY + Jz ZZ."""
    return OperatorSum.from_label_terms(
        [(jx, {0: "X", 1: "X"}), (jy, {0: "Y", 1: "Y"}), (jz, {0: "Z", 1: "Z"})], 2
    )


def dipolar_target(j: float = 1.0) -> OperatorSum:
    """Dipolar two-qubit Hamiltonian -J(XX + YY - 2 ZZ)."""
    return xyz_target(-j, -j, 2 * j)


def axis_generator(
    label: str, axis_terms, n: int, angle: float = np.pi / 2
) -> GeneratorSpec:
    """Generator whose unitary is exp(-i * angle * axis)."""
    axis = OperatorSum.from_label_terms(axis_terms, n)
    return GeneratorSpec(label, matrix_exp(to_dense(axis), angle), axis, angle)


def _odd_site_terms(letter: str, n: int):
    # "odd qubits" in 1-based labeling = even 0-based indices
    return [(1.0, {i: letter}) for i in range(0, n, 2)]


def _all_site_terms(letter: str, n: int):
    return [(1.0, {i: letter}) for i in range(n)]


def group_preset(name: str, n: int | None = None):
    """Named control group: returns (closure, generator list).

    g1          single-qubit {I, X0, Y0, Z0}, generators X0, Z0
    g_odd       same group acting on every second qubit of a chain
    g_gl        collective {I, X_all, Y_all, Z_all} (general linear decoupling)
    g_dephasing 8-element composition of {I, Z_all} with the odd-qubit group
    pauli2      16-element composition of g_gl with the odd-qubit group
                (the full Pauli group on two qubits when n = 2)
    honeycomb   48-element group of the single-plaquette Kitaev scheme
    """
    if name == "honeycomb":
        lat = HoneycombLattice.plaquette()
        if n is not None and n != lat.n_vertices:
            raise ValueError("honeycomb preset is the 6-qubit single plaquette")
        gens = honeycomb_group_generators(lat)
        return close_group(gens, name=name), gens
    if n is None:
        n = 2
    if name == "g1":
        gens = [
            axis_generator("x0", [(1.0, {0: "X"})], n),
            axis_generator("z0", [(1.0, {0: "Z"})], n),
        ]
    elif name == "g_odd":
        gens = [
            axis_generator("x_odd", _odd_site_terms("X", n), n),
            axis_generator("z_odd", _odd_site_terms("Z", n), n),
        ]
    elif name == "g_gl":
        gens = [
            axis_generator("x_all", _all_site_terms("X", n), n),
            axis_generator("z_all", _all_site_terms("Z", n), n),
        ]
    elif name == "g_dephasing":
        gens = [
            axis_generator("x_odd", _odd_site_terms("X", n), n),
            axis_generator("z_odd", _odd_site_terms("Z", n), n),
            axis_generator("z_all", _all_site_terms("Z", n), n),
        ]
    elif name == "pauli2":
        gens = [
            axis_generator("x_all", _all_site_terms("X", n), n),
            axis_generator("z_all", _all_site_terms("Z", n), n),
            axis_generator("x_odd", _odd_site_terms("X", n), n),
            axis_generator("z_odd", _odd_site_terms("Z", n), n),
        ]
    else:
        raise ValueError(f"unknown group preset {name!r}; choose from {GROUP_PRESETS}")
    return close_group(gens, name=name), gens


@dataclass(frozen=True)
class HoneycombLattice:
    """Brick-wall honeycomb patch: vertices on a grid, edges typed by kind.

    Row edges alternate forward_slash / back_slash with position parity;
    vertical edges attach at every second column, offset per row, so each
    vertex touches at most one edge of each kind.
    """

    rows: int
    cols: int
    vertices: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int, str], ...]
    single_plaquette: bool = False

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @classmethod
    def brick_wall(cls, rows: int, cols: int) -> "HoneycombLattice":
        if rows < 1 or cols < 1:
            raise ValueError("need at least one unit cell")
        width = 2 * cols + 1
        verts = [(x, y) for y in range(rows + 1) for x in range(width)]
        idx = {v: i for i, v in enumerate(verts)}
        edges = []
        for y in range(rows + 1):
            for x in range(width - 1):
                kind = "forward_slash" if (x + y) % 2 == 0 else "back_slash"
                edges.append((idx[(x, y)], idx[(x + 1, y)], kind))
        for y in range(rows):
            for x in range(width):
                if (x + y) % 2 == 0:
                    edges.append((idx[(x, y)], idx[(x, y + 1)], "vertical"))
        return cls(
            rows=rows,
            cols=cols,
            vertices=tuple(verts),
            edges=tuple(edges),
            single_plaquette=(rows == 1 and cols == 1),
        )

    @classmethod
    def plaquette(cls) -> "HoneycombLattice":
        """The desk-scale default: one hexagon, 6 vertices, 6 edges."""
        return cls.brick_wall(1, 1)

    def edges_of_kind(self, kind: str) -> list[tuple[int, int]]:
        return [(k, l) for k, l, kk in self.edges if kk == kind]

    def sublattice_parity(self) -> tuple[int, ...]:
        """Bipartition color per vertex (honeycomb graphs are bipartite)."""
        return tuple((x + y) % 2 for x, y in self.vertices)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "vertices": [list(v) for v in self.vertices],
            "edges": [[k, l, kind] for k, l, kind in self.edges],
        }


def honeycomb_hamiltonians(lat: HoneycombLattice, j: float = 1.0):
    """(ising_input, kitaev_target): ZZ everywhere vs XX/YY/ZZ by edge kind."""
    n = lat.n_vertices
    ising = OperatorSum.from_label_terms(
        [(j, {k: "Z", l: "Z"}) for k, l, _ in lat.edges], n
    )
    letter = {"forward_slash": "X", "back_slash": "Y", "vertical": "Z"}
    kitaev = OperatorSum.from_label_terms(
        [(j, {k: letter[kind], l: letter[kind]}) for k, l, kind in lat.edges], n
    )
    return ising, kitaev


def _slash_coloring(lat: HoneycombLattice, kind: str) -> frozenset[int]:
    """Vertex set S with: edges of `kind` join same-side vertices, every other
    edge joins opposite sides.  This is the alternating pattern that lets
    (1/2)(H + X_S H X_S) keep exactly the `kind` couplings of an Ising H.
    """
    color: dict[int, bool] = {}
    adj: dict[int, list[tuple[int, bool]]] = {i: [] for i in range(lat.n_vertices)}
    for k, l, kk in lat.edges:
        same = kk == kind
        adj[k].append((l, same))
        adj[l].append((k, same))
    for root in range(lat.n_vertices):
        if root in color:
            continue
        color[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, same in adj[v]:
                want = color[v] if same else not color[v]
                if w not in color:
                    color[w] = want
                    queue.append(w)
                elif color[w] != want:
                    raise ValueError(
                        "lattice does not admit the alternating "
                        f"{kind} pattern (odd constraint cycle)"
                    )
    return frozenset(v for v, c in color.items() if c)


def honeycomb_group_generators(lat: HoneycombLattice) -> list[GeneratorSpec]:
    """The three control generators rho_x, tau_x, r_all of the Kitaev scheme.

    rho_x / tau_x put X on the alternating forward-slash / back-slash vertex
    sets; r_all rotates every vertex by 4pi/3 about (1,1,1)/sqrt(3), which
    cyclically permutes X -> Y -> Z under conjugation.
    """
    n = lat.n_vertices
    s_rho = _slash_coloring(lat, "forward_slash")
    s_tau = _slash_coloring(lat, "back_slash")
    inv = 1.0 / np.sqrt(3.0)
    r_axis_terms = []
    for k in range(n):
        r_axis_terms += [(inv, {k: "X"}), (inv, {k: "Y"}), (inv, {k: "Z"})]
    return [
        axis_generator("rho_x", [(1.0, {k: "X"}) for k in sorted(s_rho)], n),
        axis_generator("tau_x", [(1.0, {k: "X"}) for k in sorted(s_tau)], n),
        axis_generator("r_all", r_axis_terms, n, angle=2 * np.pi / 3),
    ]


def honeycomb_weights(g: GroupClosure) -> WeightAssignment:
    """Weight 1/2 on the six conjugating elements of the Kitaev decomposition.

    The three pair-sums isolate the forward-slash, back-slash, and vertical
    couplings respectively; their union realizes the full target with W = 3.
    """
    by_label = {gen.label: gen.unitary for gen in g.generators}
    try:
        rho, tau, r = by_label["rho_x"], by_label["tau_x"], by_label["r_all"]
    except KeyError as exc:
        raise KeyError("closure lacks the honeycomb generators") from exc
    eye = np.eye(rho.shape[0], dtype=complex)
    members = [r, rho @ r, r @ r, tau @ r @ r, eye, rho @ tau]
    w = np.zeros(g.order)
    for m in members:
        w[g.index_of(m)] += 0.5
    return WeightAssignment(w, g)


def open_chain_model(
    n_s: int,
    coupling_axes=("x", "y", "z"),
    j: float = 1.0,
    coupling_norm: float = 0.1,
    bath_field_norm: float = 0.1,
    seed: int = 7,
) -> OpenSystemModel:
    """Heisenberg chain coupled to a single bath qubit along the given axes.

    Each (site, axis) pair gets its own random traceless bath operator of
    spectral norm coupling_norm; the bath field is drawn the same way.  The
    seed is part of the model definition so reports are reproducible.
    """
    rng = np.random.default_rng(seed)

    def random_bath_op(norm: float) -> OperatorSum:
        vec = rng.normal(size=3)
        vec *= norm / np.linalg.norm(vec)
        return OperatorSum.from_label_terms(
            [(vec[0], {0: "X"}), (vec[1], {0: "Y"}), (vec[2], {0: "Z"})], 1
        )

    system = heisenberg_chain(n_s, j)
    bath = random_bath_op(bath_field_norm)
    couplings = []
    for i in range(n_s):
        for axis in coupling_axes:
            s_op = OperatorSum.from_label_terms([(1.0, {i: axis.upper()})], n_s)
            couplings.append((s_op, random_bath_op(coupling_norm)))
    return OpenSystemModel(system=system, bath=bath, couplings=tuple(couplings))
