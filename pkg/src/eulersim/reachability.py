"""Nonnegative weights expressing a target Hamiltonian as a unitary mixture.

Reachability means sum_g w_g U_g^dag H U_g = H_target with w_g >= 0.  The
system is exact in the Pauli-coefficient basis restricted to words that
actually appear, and is solved as a linear program minimizing the total
weight W (the simulation time overhead).  The open-system variant stacks the
same equalities for the system Hamiltonian and a zero target for each error
generator, sharing one weight vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, nnls

from .groups import GroupClosure, canonical_phase
from .pauli import OperatorSum, PauliWord, pauli_coefficients, to_dense

WEIGHT_CLIP = 1e-12
RESIDUAL_TOL = 1e-9


class InfeasibleTargetError(ValueError):
    """Target not reachable from the input under the given group."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (least-squares residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class WeightAssignment:
    """Nonnegative weight per group element; values in [-1e-12, 0] clip to 0."""

    weights: np.ndarray
    group: GroupClosure

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if w.shape != (self.group.order,):
            raise ValueError("weight vector length must equal the group order")
        near_zero = (w > -WEIGHT_CLIP) & (w < 0)
        w[near_zero] = 0.0
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        w[np.abs(w) < WEIGHT_CLIP] = 0.0
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def nonzero_items(self) -> list[tuple[int, float]]:
        return [(int(i), float(w)) for i, w in enumerate(self.weights) if w > 0]

    def by_label(self) -> dict[str, float]:
        return {
            self.group.element_labels[i]: float(w)
            for i, w in enumerate(self.weights)
        }

    @classmethod
    def zero(cls, group: GroupClosure) -> "WeightAssignment":
        return cls(np.zeros(group.order), group)

    @classmethod
    def uniform(cls, group: GroupClosure) -> "WeightAssignment":
        return cls(np.full(group.order, 1.0 / group.order), group)

    @classmethod
    def from_label_map(cls, values: dict[str, float], group: GroupClosure):
        w = np.zeros(group.order)
        labels = {lab: i for i, lab in enumerate(group.element_labels)}
        for lab, val in values.items():
            w[labels[lab]] = val
        return cls(w, group)


def _coefficient_system(
    operators: list[OperatorSum], targets: list[OperatorSum], g: GroupClosure
):
    """Stacked equality system A w = b over the union of appearing Pauli words.

    One block per (operator, target) pair; rows are Pauli words, columns are
    group elements, A[row, j] = coefficient of the word in U_j^dag op U_j.
    """
    blocks_a = []
    blocks_b = []
    for op, target in zip(operators, targets):
        conjugated = []
        for u in g.elements:
            conjugated.append(pauli_coefficients(u.conj().T @ to_dense(op) @ u))
        words: list[PauliWord] = sorted(
            {w for cs in conjugated for _, w in cs.terms}
            | {w for _, w in target.terms},
            key=lambda w: w.letters,
        )
        row_of = {w: r for r, w in enumerate(words)}
        a = np.zeros((len(words), g.order))
        for j, cs in enumerate(conjugated):
            for c, w in cs.terms:
                a[row_of[w], j] = c
        b = np.zeros(len(words))
        for c, w in target.terms:
            b[row_of[w]] = c
        blocks_a.append(a)
        blocks_b.append(b)
    return np.vstack(blocks_a), np.concatenate(blocks_b)


def _solve_min_weight(a: np.ndarray, b: np.ndarray, g: GroupClosure,
                      context: str) -> WeightAssignment:
    res = linprog(
        c=np.ones(g.order),
        A_eq=a,
        b_eq=b,
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        w_ls, rnorm = nnls(a, b)
        raise InfeasibleTargetError(context, rnorm)
    w = WeightAssignment(res.x, g)
    residual = np.max(np.abs(a @ w.weights - b)) if b.size else 0.0
    if residual > RESIDUAL_TOL:
        raise InfeasibleTargetError(
            f"{context}: solver residual above tolerance", float(residual)
        )
    return w


def solve_weights(
    h: OperatorSum, target: OperatorSum, g: GroupClosure
) -> WeightAssignment:
    """Minimum-W weights with sum_g w_g U_g^dag h U_g = target."""
    if h.n_qubits != target.n_qubits:
        raise ValueError("input and target must share n_qubits")
    if h.is_zero:
        raise ValueError("input Hamiltonian is zero")
    a, b = _coefficient_system([h], [target], g)
    return _solve_min_weight(a, b, g, "target not reachable under this group")


def solve_weights_open(
    h_s: OperatorSum,
    errors: list[OperatorSum],
    target_s: OperatorSum,
    g: GroupClosure,
) -> WeightAssignment:
    """One weight vector realizing the system target and zeroing every error.

    Infeasibility signals that simultaneous decoupling and simulation fail
    for this group (the conditions must hold for the same weights).
    """
    if h_s.is_zero:
        raise ValueError("system Hamiltonian is zero")
    ops = [h_s] + list(errors)
    targets = [target_s] + [OperatorSum.zero(e.n_qubits) for e in errors]
    if any(op.n_qubits != h_s.n_qubits for op in ops + [target_s]):
        raise ValueError("all operators must share n_qubits")
    a, b = _coefficient_system(ops, targets, g)
    return _solve_min_weight(
        a, b, g, "simultaneous simulation and decoupling infeasible"
    )


def compose_schemes(
    first: WeightAssignment,
    second: WeightAssignment,
    product_group: GroupClosure,
) -> WeightAssignment:
    """Weights of the composed map A -> Phi_second[Phi_first(A)].

    The composed conjugation element is U_first @ U_second, accumulated after
    phase canonicalization into the supplied product closure; totals multiply.
    """
    dim = first.group.elements[0].shape[0]
    if second.group.elements[0].shape[0] != dim:
        raise ValueError("schemes act on different dimensions")
    w = np.zeros(product_group.order)
    for i, wi in first.nonzero_items():
        ui = first.group.elements[i]
        for j, wj in second.nonzero_items():
            prod = ui @ second.group.elements[j]
            try:
                k = product_group.index_of(canonical_phase(prod))
            except KeyError:
                raise KeyError(
                    "product element missing from the supplied closure"
                ) from None
            w[k] += wi * wj
    return WeightAssignment(w, product_group)


def mixture_residual(
    h: OperatorSum, target: OperatorSum, w: WeightAssignment
) -> float:
    """Dense Frobenius residual of the mixture identity (independent check)."""
    hd = to_dense(h)
    acc = np.zeros_like(hd)
    for i, wi in w.nonzero_items():
        u = w.group.elements[i]
        acc += wi * (u.conj().T @ hd @ u)
    return float(np.linalg.norm(acc - to_dense(target), "fro"))
