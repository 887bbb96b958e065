"""Pure request -> response handlers shared by the HTTP app and the CLI."""

from __future__ import annotations

import re
import threading

import numpy as np

from .. import models
from ..averaging import build_average_report
from ..dynamics import (
    evolve_schedule,
    phase_aligned_distance,
    scaling_order_fit,
    simulate_cycles,
)
from ..groups import GroupClosure, build_cayley_graph, eulerian_cycle
from ..pauli import OperatorSum, frobenius_norm, matrix_exp, to_dense
from ..pulses import PulseShape, shape_with_area
from ..reachability import mixture_residual, solve_weights, solve_weights_open
from ..scheduler import (
    Schedule,
    build_bb_schedule,
    build_eulerian_schedule,
    build_symmetric_schedule,
    schedule_from_dict,
)
from . import schemas

MODEL_PRESETS = ("heisenberg2", "heisenberg4", "heisenberg6", "honeycomb")
TARGET_PRESETS = ("dipolar", "xx", "xyz:<jx>,<jy>,<jz>", "kitaev", "zero", "identity")
SHAPE_FACTORIES = {
    "sine2": PulseShape.sine_squared,
    "triangle": PulseShape.triangle,
    "constant": PulseShape.constant,
}


class ConfigError(ValueError):
    """Bad request configuration (unknown preset, inconsistent sizes)."""


_group_cache: dict[tuple[str, int | None], tuple[GroupClosure, list]] = {}
_group_lock = threading.Lock()


def resolve_group(name: str, n: int | None):
    key = (name, n)
    with _group_lock:
        hit = _group_cache.get(key)
    if hit is not None:
        return hit
    try:
        closure, gens = models.group_preset(name, n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    with _group_lock:
        _group_cache[key] = (closure, gens)
    return closure, gens


def resolve_model(spec, n: int | None, j: float) -> OperatorSum:
    if isinstance(spec, schemas.OperatorDoc):
        return OperatorSum.from_dict(spec.model_dump())
    m = re.fullmatch(r"heisenberg(\d+)", spec)
    if m:
        return models.heisenberg_chain(int(m.group(1)), j)
    if spec == "honeycomb":
        ising, _ = models.honeycomb_hamiltonians(models.HoneycombLattice.plaquette(), j)
        return ising
    raise ConfigError(f"unknown model preset {spec!r}")


def resolve_target(spec, n: int, j: float) -> OperatorSum:
    if isinstance(spec, schemas.OperatorDoc):
        return OperatorSum.from_dict(spec.model_dump())
    if spec == "dipolar":
        return models.dipolar_target(j)
    if spec == "xx":
        return models.xyz_target(j, j, 0.0)
    if spec in ("zero", "identity"):
        return OperatorSum.zero(n)
    m = re.fullmatch(r"xyz:([^,]+),([^,]+),([^,]+)", spec)
    if m:
        jx, jy, jz = (float(v) for v in m.groups())
        return models.xyz_target(jx, jy, jz)
    if spec == "kitaev":
        _, kitaev = models.honeycomb_hamiltonians(models.HoneycombLattice.plaquette(), j)
        return kitaev
    raise ConfigError(f"unknown target preset {spec!r}")


def _single_axis_errors(axes: list[str], n: int) -> list[OperatorSum]:
    ops = []
    for axis in axes:
        letter = axis.upper()
        if letter not in ("X", "Y", "Z"):
            raise ConfigError(f"decoupling axis must be x, y, or z, got {axis!r}")
        for i in range(n):
            ops.append(OperatorSum.from_label_terms([(1.0, {i: letter})], n))
    return ops


def _build_schedule(mode, closure, weights, shape, tsim) -> Schedule:
    if mode == "bb":
        return build_bb_schedule(weights, closure, tsim)
    cycle = eulerian_cycle(build_cayley_graph(closure), closure)
    builder = build_eulerian_schedule if mode == "eulerian" else build_symmetric_schedule
    return builder(cycle, weights, shape, tsim)


def _resolve_shape(req: schemas.SynthRequest) -> PulseShape:
    delta = req.delta if req.delta is not None else req.tsim / 10.0
    if req.shape == "tabulated":
        if not req.shape_samples:
            raise ConfigError("tabulated shape requires shape_samples")
        samples = [(t, f) for t, f in req.shape_samples]
        span = max(t for t, _ in samples)
        if span <= 0:
            raise ConfigError("tabulated samples must span a positive duration")
        # samples provide the profile; rescale time to the requested delta
        scaled = [(t * delta / span, f) for t, f in samples]
        base = PulseShape.tabulated(scaled, duration=delta)
        if base.area == 0:
            raise ConfigError("tabulated samples integrate to zero area")
        return shape_with_area(base, np.pi / 2)
    return SHAPE_FACTORIES[req.shape](delta, np.pi / 2)


def synth(req: schemas.SynthRequest) -> schemas.SynthResponse:
    closure, gens = resolve_group(req.group, req.n_qubits)
    h = resolve_model(req.model, req.n_qubits, req.coupling)
    if h.n_qubits != closure.n_qubits:
        raise ConfigError(
            f"model acts on {h.n_qubits} qubits but group {req.group!r} "
            f"acts on {closure.n_qubits}"
        )
    target = resolve_target(req.target, h.n_qubits, req.coupling)
    errors = _single_axis_errors(req.decouple, h.n_qubits)
    if errors:
        weights = solve_weights_open(h, errors, target, closure)
    else:
        weights = solve_weights(h, target, closure)

    shape = _resolve_shape(req)
    schedule = _build_schedule(req.mode, closure, weights, shape, req.tsim)
    residual = mixture_residual(h, target, weights)

    doc = schedule_doc(schedule, h, target, errors, req.tolerance)
    return schemas.SynthResponse(
        feasible=True,
        group=req.group,
        group_order=closure.order,
        generator_count=len(closure.generators),
        segment_count=sum(1 for s in schedule.segments if s.kind == "ramp")
        if req.mode != "bb"
        else len(schedule.segments),
        weights=weights.by_label(),
        total_weight=weights.total,
        cycle_time=schedule.cycle_time,
        mixture_residual=residual,
        schedule=doc,
    )


def schedule_doc(
    schedule: Schedule,
    h: OperatorSum,
    target: OperatorSum,
    errors: list[OperatorSum] = (),
    tolerance: float = 1e-8,
) -> schemas.ScheduleDoc:
    base = schedule.to_dict()
    base["group_size"] = schedule.group.order
    base["hamiltonian"] = h.to_dict()
    base["target"] = target.to_dict()
    base["error_generators"] = [e.to_dict() for e in errors]
    base["tolerances"] = {"residual": tolerance}
    return schemas.ScheduleDoc.model_validate(base)


def _rebuild(doc: schemas.ScheduleDoc):
    closure, _ = resolve_group(doc.group, None)
    if doc.group_size is not None and doc.group_size != closure.order:
        raise ConfigError(
            f"schedule was built on a group of order {doc.group_size}, "
            f"preset {doc.group!r} has order {closure.order}"
        )
    schedule = schedule_from_dict(doc.model_dump(), closure)
    if doc.hamiltonian is None or doc.target is None:
        raise ConfigError("schedule document lacks embedded hamiltonian/target")
    h = OperatorSum.from_dict(doc.hamiltonian.model_dump())
    target = OperatorSum.from_dict(doc.target.model_dump())
    errors = [OperatorSum.from_dict(e.model_dump()) for e in doc.error_generators]
    return schedule, h, target, errors


def verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
    schedule, h, target, errors = _rebuild(req.schedule)
    tol = (
        req.tolerance
        if req.tolerance is not None
        else req.schedule.tolerances.get("residual", 1e-8)
    )
    report = build_average_report(schedule, h, target, errors, tolerance=tol)
    return schemas.VerifyResponse(
        residual_norm=report.residual_norm,
        decoupling_residuals=report.decoupling_residuals,
        magnus_bound_estimate=report.magnus_bound_estimate,
        tolerance=tol,
        passed=report.passed,
    )


def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    schedule, h, target, _ = _rebuild(req.schedule)
    result = simulate_cycles(schedule, h, target, req.cycles, req.metric)
    u = result.final_propagator
    defect = frobenius_norm(u.conj().T @ u - np.eye(u.shape[0]))
    return schemas.SimulateResponse(
        cycles=req.cycles,
        metric=req.metric,
        infidelity=result.infidelity,
        per_cycle_error=result.per_cycle_error,
        unitarity_defect=defect,
    )


def sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
    if req.maximum <= req.minimum:
        raise ConfigError("sweep maximum must exceed minimum")
    base = req.base
    closure, _ = resolve_group(base.group, base.n_qubits)
    h = resolve_model(base.model, base.n_qubits, base.coupling)
    target = resolve_target(base.target, h.n_qubits, base.coupling)
    errors = _single_axis_errors(base.decouple, h.n_qubits)
    if errors:
        weights = solve_weights_open(h, errors, target, closure)
    else:
        weights = solve_weights(h, target, closure)
    td = to_dense(target)

    values = np.geomspace(req.minimum, req.maximum, req.points)
    rows = []
    for val in values:
        if req.param == "delta":
            tsim, delta = base.tsim, float(val)
        elif req.param == "tsim":
            tsim = float(val)
            delta = base.delta if base.delta is not None else base.tsim / 10.0
        else:  # cycle: scale tsim with delta locked to tsim/10
            tsim, delta = float(val), float(val) / 10.0
        point_req = base.model_copy(update={"tsim": tsim, "delta": delta})
        shape = _resolve_shape(point_req)
        schedule = _build_schedule(base.mode, closure, weights, shape, tsim)
        u = evolve_schedule(schedule, h, 1)
        v = matrix_exp(td, tsim)
        err = phase_aligned_distance(u, v)
        rows.append(
            schemas.SweepPoint(value=float(val), cycle_time=schedule.cycle_time,
                               error=err)
        )
    slope, intercept, r2 = scaling_order_fit(
        [(row.cycle_time, row.error) for row in rows]
    )
    lines = [f"{req.param},cycle_time,error"]
    lines += [f"{row.value!r},{row.cycle_time!r},{row.error!r}" for row in rows]
    lines.append(f"# slope={slope!r} intercept={intercept!r} r2={r2!r}")
    return schemas.SweepResponse(
        param=req.param,
        rows=rows,
        slope=slope,
        intercept=intercept,
        r_squared=r2,
        csv="\n".join(lines) + "\n",
    )


def presets() -> schemas.PresetsResponse:
    return schemas.PresetsResponse(
        models=list(MODEL_PRESETS),
        targets=list(TARGET_PRESETS),
        groups=list(models.GROUP_PRESETS),
        shapes=list(SHAPE_FACTORIES) + ["tabulated"],
        modes=["bb", "eulerian", "symmetric"],
        honeycomb_plaquette=models.HoneycombLattice.plaquette().to_dict(),
    )


def group_export(name: str, n: int | None = None) -> schemas.GroupExport:
    closure, _ = resolve_group(name, n)
    cycle = eulerian_cycle(build_cayley_graph(closure), closure)
    return schemas.GroupExport(
        name=name,
        order=closure.order,
        generator_labels=closure.generator_labels,
        element_labels=list(closure.element_labels),
        euler_cycle=cycle.generator_sequence(),
    )
