"""Control-cycle timelines: bang-bang, Eulerian, and time-symmetrized.

A schedule is an ordered list of ramp and coast segments.  Eulerian modes
walk an Euler cycle on the Cayley graph: each edge contributes a ramp of
fixed duration Delta realizing one generator, followed by a coast of
duration w_g * T_sim / |Gamma| at the vertex just reached.  Zero-weight
vertices keep zero-length coast markers: every group element must still be
visited for the pulse-average term to project away.

The symmetric mode halves each coast, then replays the whole half-cycle
mirrored with reversed ramps, which enforces U_c(t) = U_c(T_c - t) and kills
the second Magnus term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import EulerCycle, GeneratorSpec, GroupClosure
from .pauli import axis_propagator, to_dense
from .pulses import PulseShape, shape_with_area
from .reachability import WeightAssignment

MODES = ("bb", "eulerian", "symmetric")


@dataclass(frozen=True)
class Segment:
    """One timeline entry; frame_element is the group element in force during
    (coast) or immediately after (ramp) the segment."""

    kind: str  # "ramp" | "coast"
    start: float
    duration: float
    frame_element: int
    generator_label: str | None = None
    reversed: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "start": self.start,
            "duration": self.duration,
            "frame": self.frame_element,
            "generator": self.generator_label,
            "reversed": self.reversed,
        }


@dataclass(eq=False)
class _GeneratorKit:
    """Cached per-generator evaluation data for one schedule.

    shape is the schedule's envelope rescaled to this generator's pulse area,
    so mixed-angle generator sets stay consistent.
    """

    axis_dense: np.ndarray
    area: float
    propagator: object  # theta -> exp(-i theta axis)
    spec: GeneratorSpec
    shape: PulseShape | None


@dataclass(eq=False)
class Schedule:
    """Ordered segments plus everything needed to evaluate the control frame."""

    mode: str
    segments: tuple[Segment, ...]
    sim_interval: float
    group: GroupClosure
    shape: PulseShape | None
    weights: WeightAssignment | None = None
    _kits: dict = field(default_factory=dict, repr=False)
    _start_frames: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown schedule mode {self.mode!r}")

    @property
    def cycle_time(self) -> float:
        if not self.segments:
            return 0.0
        last = self.segments[-1]
        return last.start + last.duration

    @property
    def delta(self) -> float:
        return self.shape.duration if self.shape is not None else 0.0

    def generator_kit(self, label: str) -> _GeneratorKit:
        kit = self._kits.get(label)
        if kit is None:
            spec = next(g for g in self.group.generators if g.label == label)
            dense = to_dense(spec.control_axis)
            shape = (
                shape_with_area(self.shape, spec.target_angle)
                if self.shape is not None
                else None
            )
            kit = _GeneratorKit(
                dense, spec.target_angle, axis_propagator(dense), spec, shape
            )
            self._kits[label] = kit
        return kit

    def segment_start_frames(self) -> list[np.ndarray]:
        """Control propagator at the start of each segment (running product).

        Frames use the exact pulse end unitaries exp(-i * area * axis), so
        ramp endpoints and coast frames agree to machine precision.  BB
        schedules use the canonicalized element matrices directly.
        """
        if self._start_frames is not None:
            return self._start_frames
        if self.mode == "bb":
            frames = [self.group.elements[seg.frame_element] for seg in self.segments]
            self._start_frames = frames
            return frames
        dim = self.group.elements[0].shape[0]
        u = np.eye(dim, dtype=complex)
        frames = []
        for seg in self.segments:
            frames.append(u)
            if seg.kind == "ramp":
                kit = self.generator_kit(seg.generator_label)
                step = kit.propagator(-kit.area if seg.reversed else kit.area)
                u = step @ u
        self._start_frames = frames
        return frames

    def ramp_envelope(self, seg: Segment):
        """Lab-frame control envelope of a ramp segment, as a callable.

        Uses the per-generator rescaled shape.  Reversed ramps play the
        time-reversed envelope with flipped sign: the control propagator runs
        back down the same axis path.
        """
        shape = self.generator_kit(seg.generator_label).shape
        if not seg.reversed:
            return lambda tau: shape.envelope(tau)
        return lambda tau: -shape.envelope(shape.duration - tau)

    def ramp_accrued_angle(self, seg: Segment, delta: float) -> float:
        """Net rotation angle relative to the segment start frame."""
        shape = self.generator_kit(seg.generator_label).shape
        if not seg.reversed:
            return float(shape.cumulative_area(delta))
        return float(shape.cumulative_area(shape.duration - delta) - shape.area)

    def segment_at(self, t: float) -> tuple[int, Segment]:
        if not 0.0 <= t <= self.cycle_time * (1 + 1e-12):
            raise ValueError(f"t={t} outside [0, {self.cycle_time}]")
        starts = [seg.start for seg in self.segments]
        # side="right" lands after any zero-duration markers sharing this start
        i = max(int(np.searchsorted(starts, t, side="right")) - 1, 0)
        return i, self.segments[i]

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "mode": self.mode,
            "cycle_time": self.cycle_time,
            "sim_interval": self.sim_interval,
            "delta": self.delta,
            "shape": self.shape.to_dict() if self.shape else None,
            "group": self.group.name,
            "weights": self.weights.by_label() if self.weights else None,
            "segments": [seg.to_dict() for seg in self.segments],
        }


def schedule_from_dict(data: dict, group: GroupClosure) -> Schedule:
    """Rebuild a schedule from its JSON form against a resolved closure.

    Durations are re-derived from consecutive start times (and the recorded
    cycle time for the final segment), so absolute starts are authoritative.
    """
    if data.get("format_version") != 1:
        raise ValueError(f"unsupported schedule format_version {data.get('format_version')!r}")
    mode = data["mode"]
    shape = PulseShape.from_dict(data["shape"]) if data.get("shape") else None
    raw = data["segments"]
    cycle_time = float(data["cycle_time"])
    segments = []
    for i, rec in enumerate(raw):
        start = float(rec["start"])
        end = float(raw[i + 1]["start"]) if i + 1 < len(raw) else cycle_time
        segments.append(
            Segment(
                kind=rec["kind"],
                start=start,
                duration=end - start,
                frame_element=int(rec["frame"]),
                generator_label=rec.get("generator"),
                reversed=bool(rec.get("reversed", False)),
            )
        )
    weights = None
    if data.get("weights") is not None:
        weights = WeightAssignment.from_label_map(data["weights"], group)
    return Schedule(
        mode=mode,
        segments=tuple(segments),
        sim_interval=float(data["sim_interval"]),
        group=group,
        shape=shape,
        weights=weights,
    )


def _check_same_group(a: GroupClosure, b: GroupClosure):
    if a is b:
        return
    if a.order != b.order or a.generator_labels != b.generator_labels:
        raise ValueError("mismatched group references")


def build_bb_schedule(
    w: WeightAssignment, g: GroupClosure, t_sim: float
) -> Schedule:
    """Piecewise-constant frames: one coast of length w_g * T_sim per nonzero
    weight, identity first; switches are instantaneous (no ramp segments)."""
    _check_same_group(w.group, g)
    if t_sim <= 0:
        raise ValueError("t_sim must be positive")
    items = w.nonzero_items()
    if not items:
        raise ValueError("all weights are zero; BB schedule is empty")
    order = sorted(items, key=lambda iw: (iw[0] != g.identity_index, iw[0]))
    segments = []
    t = 0.0
    for idx, weight in order:
        dur = weight * t_sim
        segments.append(Segment("coast", t, dur, idx))
        t += dur
    return Schedule("bb", tuple(segments), t_sim, g, shape=None, weights=w)


def build_eulerian_schedule(
    cycle: EulerCycle, w: WeightAssignment, shape: PulseShape, t_sim: float
) -> Schedule:
    """Ramp-then-coast per Euler edge; T_c = N Delta + W T_sim."""
    _check_same_group(cycle.group, w.group)
    if t_sim <= 0:
        raise ValueError("t_sim must be positive")
    n_gen = len(cycle.group.generators)
    segments = []
    t = 0.0
    for label, _frm, to in cycle.edge_sequence:
        segments.append(Segment("ramp", t, shape.duration, to, label))
        t += shape.duration
        theta = w.weights[to] * t_sim / n_gen
        segments.append(Segment("coast", t, theta, to))
        t += theta
    return Schedule("eulerian", tuple(segments), t_sim, cycle.group, shape, w)


def build_symmetric_schedule(
    cycle: EulerCycle, w: WeightAssignment, shape: PulseShape, t_sim: float
) -> Schedule:
    """Halved coasts, then the mirror image with reversed ramps.

    Satisfies U_c(t) = U_c(T_c - t) exactly; T_c = 2 N Delta + W T_sim.
    """
    _check_same_group(cycle.group, w.group)
    if t_sim <= 0:
        raise ValueError("t_sim must be positive")
    n_gen = len(cycle.group.generators)
    half = []
    t = 0.0
    for label, frm, to in cycle.edge_sequence:
        half.append(Segment("ramp", t, shape.duration, to, label))
        t += shape.duration
        theta = w.weights[to] * t_sim / (2 * n_gen)
        half.append(Segment("coast", t, theta, to))
        t += theta
    segments = list(half)
    frames_after_reverse = {}
    for label, frm, to in cycle.edge_sequence:
        frames_after_reverse[(label, to)] = frm
    for seg in reversed(half):
        if seg.kind == "coast":
            segments.append(Segment("coast", t, seg.duration, seg.frame_element))
            t += seg.duration
        else:
            frm = frames_after_reverse[(seg.generator_label, seg.frame_element)]
            segments.append(
                Segment("ramp", t, seg.duration, frm, seg.generator_label,
                        reversed=True)
            )
            t += seg.duration
    return Schedule("symmetric", tuple(segments), t_sim, cycle.group, shape, w)


def control_propagator_at(s: Schedule, t: float) -> np.ndarray:
    """U_c(t): product of completed segments times the in-segment propagator."""
    dim = s.group.elements[0].shape[0]
    if abs(t - s.cycle_time) <= 1e-12 * max(1.0, s.cycle_time) or not s.segments:
        return np.eye(dim, dtype=complex)
    i, seg = s.segment_at(t)
    frames = s.segment_start_frames()
    if s.mode == "bb":
        return frames[i]
    u_start = frames[i]
    if seg.kind == "coast":
        return u_start
    kit = s.generator_kit(seg.generator_label)
    theta = s.ramp_accrued_angle(seg, t - seg.start)
    return kit.propagator(theta) @ u_start
