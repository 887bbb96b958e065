"""Exact time-ordered evolution under schedules and open-system diagnostics.

Coasting segments integrate exactly via the matrix exponential; ramping
segments use a fourth-order commutator-free two-exponential scheme with
substep doubling until the segment propagator is stable.  Both preserve
unitarity structurally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import (
    OperatorSum,
    frobenius_norm,
    matrix_exp,
    num_qubits,
    to_dense,
)
from .scheduler import Schedule

_SQRT3 = np.sqrt(3.0)
_C1, _C2 = 0.5 - _SQRT3 / 6.0, 0.5 + _SQRT3 / 6.0
_A1, _A2 = 0.25 - _SQRT3 / 6.0, 0.25 + _SQRT3 / 6.0

RAMP_TOL = 1e-10
MAX_DOUBLINGS = 16


class IntegrationError(RuntimeError):
    """Substep doubling failed to converge."""


@dataclass(frozen=True)
class OpenSystemModel:
    """System qubits coupled to bath qubits: H_S + H_B + sum S_a x B_a."""

    system: OperatorSum
    bath: OperatorSum
    couplings: tuple[tuple[OperatorSum, OperatorSum], ...]

    @property
    def n_system(self) -> int:
        return self.system.n_qubits

    @property
    def n_bath(self) -> int:
        return self.bath.n_qubits

    @property
    def n_total(self) -> int:
        return self.n_system + self.n_bath

    def total_hamiltonian(self) -> OperatorSum:
        total = embed(self.system, self.n_total, 0) + embed(
            self.bath, self.n_total, self.n_system
        )
        for s_op, b_op in self.couplings:
            total = total + tensor_operators(s_op, b_op)
        return total

    def coupling_hamiltonian(self) -> OperatorSum:
        acc = OperatorSum.zero(self.n_total)
        for s_op, b_op in self.couplings:
            acc = acc + tensor_operators(s_op, b_op)
        return acc

    def target_hamiltonian(self, target_s: OperatorSum) -> OperatorSum:
        """Ideal corrected evolution: target on the system, bare bath field."""
        return embed(target_s, self.n_total, 0) + embed(
            self.bath, self.n_total, self.n_system
        )


def embed(op: OperatorSum, n_total: int, offset: int) -> OperatorSum:
    """Place an operator on qubits [offset, offset + n) of a larger register."""
    from .pauli import PauliWord

    terms = [
        (c, PauliWord({q + offset: s for q, s in w.letters}, n_total))
        for c, w in op.terms
    ]
    return OperatorSum(terms, n_qubits=n_total)


def tensor_operators(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """Kronecker product a (left register) otimes b (right register)."""
    from .pauli import PauliWord

    n = a.n_qubits + b.n_qubits
    terms = []
    for ca, wa in a.terms:
        for cb, wb in b.terms:
            letters = dict(wa.letters)
            letters.update({q + a.n_qubits: s for q, s in wb.letters})
            terms.append((ca * cb, PauliWord(letters, n)))
    return OperatorSum(terms, n_qubits=n)


@dataclass(eq=False)
class SimulationReport:
    final_propagator: np.ndarray
    target_propagator: np.ndarray
    infidelity: float
    per_cycle_error: list[float]
    scaling_fit: tuple[float, float, float] | None = None

    def to_dict(self) -> dict:
        out = {
            "infidelity": self.infidelity,
            "per_cycle_error": list(self.per_cycle_error),
        }
        if self.scaling_fit is not None:
            slope, intercept, r2 = self.scaling_fit
            out["scaling_fit"] = {"slope": slope, "intercept": intercept, "r2": r2}
        return out


def _cf4_step(h0: np.ndarray, axis: np.ndarray, envelope, t0: float,
              dt: float) -> np.ndarray:
    f1 = float(envelope(t0 + _C1 * dt))
    f2 = float(envelope(t0 + _C2 * dt))
    h1 = h0 + f1 * axis
    h2 = h0 + f2 * axis
    first = matrix_exp(_A2 * h1 + _A1 * h2, dt)
    second = matrix_exp(_A1 * h1 + _A2 * h2, dt)
    return second @ first


def _ramp_propagator(h0: np.ndarray, axis: np.ndarray, envelope,
                     duration: float) -> np.ndarray:
    def integrate(substeps: int) -> np.ndarray:
        dt = duration / substeps
        u = np.eye(h0.shape[0], dtype=complex)
        for k in range(substeps):
            u = _cf4_step(h0, axis, envelope, k * dt, dt) @ u
        return u

    substeps = 4
    prev = integrate(substeps)
    for _ in range(MAX_DOUBLINGS):
        substeps *= 2
        cur = integrate(substeps)
        if frobenius_norm(cur - prev) < RAMP_TOL:
            return cur
        prev = cur
    raise IntegrationError(
        f"ramp propagator did not stabilize after {MAX_DOUBLINGS} doublings"
    )


def evolve_schedule(
    s: Schedule, h: OperatorSum, cycles: int = 1, bath_qubits: int = 0
) -> np.ndarray:
    """Exact propagator of H + H_c(t) over `cycles` repetitions of the block.

    With bath_qubits > 0 the control acts on the system factor only and h is
    the joint Hamiltonian on system plus bath.
    """
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    hd = to_dense(h)
    n_ctrl = s.group.n_qubits
    if num_qubits(hd) != n_ctrl + bath_qubits:
        raise ValueError("Hamiltonian size does not match schedule plus bath")
    eye_bath = np.eye(2**bath_qubits, dtype=complex)

    coast_cache: dict[float, np.ndarray] = {}
    ramp_cache: dict[tuple[str, bool], np.ndarray] = {}
    u = np.eye(hd.shape[0], dtype=complex)
    for seg in s.segments:
        if seg.kind == "coast":
            if seg.duration == 0.0:
                continue
            step = coast_cache.get(seg.duration)
            if step is None:
                step = matrix_exp(hd, seg.duration)
                coast_cache[seg.duration] = step
        else:
            key = (seg.generator_label, seg.reversed)
            step = ramp_cache.get(key)
            if step is None:
                kit = s.generator_kit(seg.generator_label)
                axis = kit.axis_dense
                if bath_qubits:
                    axis = np.kron(axis, eye_bath)
                step = _ramp_propagator(
                    hd, axis, s.ramp_envelope(seg), seg.duration
                )
                ramp_cache[key] = step
        u = step @ u
    if cycles > 1:
        u = np.linalg.matrix_power(u, cycles)
    return u


def simulate_cycles(
    s: Schedule,
    h: OperatorSum,
    target: OperatorSum,
    cycles: int = 1,
    metric: str = "infidelity",
    bath_qubits: int = 0,
) -> SimulationReport:
    """Evolve M repetitions of the block and compare against the target flow.

    per_cycle_error[k] compares the k-cycle propagator with the target
    evolved for k simulation intervals.
    """
    td = to_dense(target)
    u_cycle = evolve_schedule(s, h, 1, bath_qubits=bath_qubits)
    per_cycle = []
    u = np.eye(u_cycle.shape[0], dtype=complex)
    for k in range(1, cycles + 1):
        u = u_cycle @ u
        v = matrix_exp(td, k * s.sim_interval)
        if metric == "infidelity":
            per_cycle.append(phase_invariant_infidelity(u, v))
        else:
            per_cycle.append(phase_aligned_distance(u, v))
    v_final = matrix_exp(td, cycles * s.sim_interval)
    return SimulationReport(
        final_propagator=u,
        target_propagator=v_final,
        infidelity=phase_invariant_infidelity(u, v_final),
        per_cycle_error=per_cycle,
    )


def phase_invariant_infidelity(u: np.ndarray, v: np.ndarray) -> float:
    """1 - |tr(u^dag v)| / dim; zero iff u and v agree up to a global phase."""
    if u.shape != v.shape:
        raise ValueError("dimension mismatch")
    dim = u.shape[0]
    val = 1.0 - abs(np.trace(u.conj().T @ v)) / dim
    return float(min(max(val, 0.0), 1.0))


def phase_aligned_distance(u: np.ndarray, v: np.ndarray) -> float:
    """min over phases of ||u - e^{i phi} v||_F."""
    dim = u.shape[0]
    inner = abs(np.trace(u.conj().T @ v))
    return float(np.sqrt(max(2.0 * dim - 2.0 * inner, 0.0)))


def partial_trace(rho: np.ndarray, n_left: int, n_right: int,
                  keep: str = "left") -> np.ndarray:
    """Trace out one factor of a (2^n_left x 2^n_right) bipartite operator."""
    dl, dr = 2**n_left, 2**n_right
    t = rho.reshape(dl, dr, dl, dr)
    if keep == "left":
        return np.einsum("arbr->ab", t)
    return np.einsum("rarb->ab", t)


@dataclass(frozen=True, eq=False)
class ErrorDecomposition:
    """Orthogonal split A x I + I x B + coupling of a bipartite operator."""

    system_part: np.ndarray
    bath_part: np.ndarray
    coupling_part: np.ndarray
    system_norm: float
    bath_norm: float
    coupling_norm: float


def effective_error_decomposition(
    h_bar: np.ndarray, n_s: int, n_b: int
) -> ErrorDecomposition:
    """Split an average Hamiltonian into system, bath, and coupling parts.

    The shared trace is assigned to the bath factor, which makes the three
    parts mutually orthogonal under the Frobenius inner product and exactly
    summing to the input.
    """
    ds, db = 2**n_s, 2**n_b
    if h_bar.shape != (ds * db, ds * db):
        raise ValueError("operator size does not match the requested split")
    mean = np.trace(h_bar) / (ds * db)
    bath_op = partial_trace(h_bar, n_s, n_b, keep="right") / ds
    sys_op = partial_trace(h_bar, n_s, n_b, keep="left") / db - mean * np.eye(ds)
    coupling = (
        h_bar - np.kron(sys_op, np.eye(db)) - np.kron(np.eye(ds), bath_op)
    )
    return ErrorDecomposition(
        system_part=sys_op,
        bath_part=bath_op,
        coupling_part=coupling,
        system_norm=frobenius_norm(np.kron(sys_op, np.eye(db))),
        bath_norm=frobenius_norm(np.kron(np.eye(ds), bath_op)),
        coupling_norm=frobenius_norm(coupling),
    )


def scaling_order_fit(points) -> tuple[float, float, float]:
    """Least-squares slope of log(error) vs log(T_c): (slope, intercept, r2)."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 4:
        raise ValueError("need at least four points for a scaling fit")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if xs.max() / xs.min() < 10.0 * (1 - 1e-9):
        raise ValueError("points must span at least one decade")
    if np.any(ys <= 1e-12):
        raise ValueError("errors at or below the numerical floor")
    lx, ly = np.log10(xs), np.log10(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
