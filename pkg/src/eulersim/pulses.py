"""Bounded-strength pulse shapes and their exact segment propagators.

Every generator pulse drives a single fixed Hermitian axis, h(t) = f(t) X,
so the intermediate propagator needs no time-ordering:
u(delta) = exp(-i F(delta) X) with F the running area of f.  Shapes with
f(0) = f(Delta) = 0 keep the total control Hamiltonian continuous across
ramp/coast boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import OperatorSum, axis_propagator, to_dense
from .groups import GeneratorSpec

SHAPE_KINDS = ("sine_squared", "triangle", "constant", "tabulated")


class PulseMismatchError(ValueError):
    """End-of-segment propagator does not realize the generator unitary."""


@dataclass(frozen=True)
class PulseShape:
    """Control envelope f(t) on [0, Delta] with fixed total area.

    amplitude_max is the peak |f|; continuous is True when f vanishes at both
    endpoints.  Tabulated shapes interpolate (t, f) samples linearly and
    integrate by trapezoid.
    """

    kind: str
    duration: float
    area: float
    amplitude_max: float
    continuous: bool
    samples: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        got = self.cumulative_area(self.duration)
        if abs(got - self.area) > 1e-10 * max(1.0, abs(self.area)):
            raise ValueError(
                f"shape area {got} does not integrate to the declared {self.area}"
            )

    @classmethod
    def sine_squared(cls, duration: float, area: float) -> "PulseShape":
        # f(t) = (2A/Delta) sin^2(pi t / Delta); integrates to A exactly
        return cls("sine_squared", duration, area, abs(2 * area / duration), True)

    @classmethod
    def triangle(cls, duration: float, area: float) -> "PulseShape":
        return cls("triangle", duration, area, abs(2 * area / duration), True)

    @classmethod
    def constant(cls, duration: float, area: float) -> "PulseShape":
        return cls("constant", duration, area, abs(area / duration), False)

    @classmethod
    def tabulated(cls, samples, duration: float | None = None) -> "PulseShape":
        pts = tuple(sorted((float(t), float(f)) for t, f in samples))
        if len(pts) < 2:
            raise ValueError("tabulated shape needs at least two samples")
        if pts[0][0] != 0.0:
            raise ValueError("tabulated samples must start at t=0")
        dur = duration if duration is not None else pts[-1][0]
        ts = np.array([p[0] for p in pts])
        fs = np.array([p[1] for p in pts])
        area = float(np.trapezoid(fs, ts))
        continuous = abs(fs[0]) < 1e-12 and abs(fs[-1]) < 1e-12
        return cls("tabulated", dur, area, float(np.max(np.abs(fs))), continuous,
                   samples=pts)

    def envelope(self, t):
        """f(t), vectorized over t."""
        t = np.asarray(t, dtype=float)
        d, a = self.duration, self.area
        if self.kind == "sine_squared":
            return (2 * a / d) * np.sin(np.pi * t / d) ** 2
        if self.kind == "triangle":
            peak = 2 * a / d
            return peak * (1.0 - np.abs(2 * t / d - 1.0))
        if self.kind == "constant":
            return np.full_like(t, a / d)
        ts = np.array([p[0] for p in self.samples])
        fs = np.array([p[1] for p in self.samples])
        return np.interp(t, ts, fs)

    def cumulative_area(self, delta):
        """F(delta) = integral of f from 0 to delta, vectorized."""
        delta = np.asarray(delta, dtype=float)
        d, a = self.duration, self.area
        if self.kind == "sine_squared":
            return a * (delta / d - np.sin(2 * np.pi * delta / d) / (2 * np.pi))
        if self.kind == "triangle":
            rising = 2 * a * (delta / d) ** 2
            falling = a - 2 * a * ((d - delta) / d) ** 2
            return np.where(delta <= d / 2, rising, falling)
        if self.kind == "constant":
            return a * delta / d
        ts = np.array([p[0] for p in self.samples])
        fs = np.array([p[1] for p in self.samples])
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (fs[1:] + fs[:-1]) * np.diff(ts))]
        )
        return np.interp(delta, ts, cum)

    def smooth_pieces(self) -> tuple[tuple[float, float], ...]:
        """Subintervals on which the envelope is analytic.

        Quadrature should be composed over these: the triangle has a kink at
        the midpoint and tabulated shapes at every sample knot.
        """
        if self.kind == "triangle":
            return ((0.0, self.duration / 2.0), (self.duration / 2.0, self.duration))
        if self.kind == "tabulated":
            ts = [t for t, _ in self.samples]
            return tuple((a, b) for a, b in zip(ts[:-1], ts[1:]) if b > a)
        return ((0.0, self.duration),)

    def reversed(self) -> "PulseShape":
        """Time-reversed envelope f(Delta - t); same area and duration."""
        if self.kind in ("sine_squared", "triangle", "constant"):
            return self  # symmetric envelopes
        pts = tuple(
            sorted((self.duration - t, f) for t, f in self.samples)
        )
        return PulseShape.tabulated(pts, duration=self.duration)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "duration": self.duration, "area": self.area}
        if self.samples is not None:
            out["samples"] = [list(p) for p in self.samples]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PulseShape":
        kind = data["kind"]
        if kind == "tabulated":
            return cls.tabulated(data["samples"], duration=data.get("duration"))
        factory = {
            "sine_squared": cls.sine_squared,
            "triangle": cls.triangle,
            "constant": cls.constant,
        }[kind]
        return factory(float(data["duration"]), float(data["area"]))


def shape_with_area(shape: PulseShape, area: float) -> PulseShape:
    """Same envelope profile and duration, amplitude rescaled to a new area."""
    if abs(shape.area - area) < 1e-12:
        return shape
    if shape.kind == "tabulated":
        scale = area / shape.area
        return PulseShape.tabulated(
            [(t, scale * f) for t, f in shape.samples], duration=shape.duration
        )
    factory = {
        "sine_squared": PulseShape.sine_squared,
        "triangle": PulseShape.triangle,
        "constant": PulseShape.constant,
    }[shape.kind]
    return factory(shape.duration, area)


def segment_propagator(shape: PulseShape, axis: OperatorSum, delta: float) -> np.ndarray:
    """u(delta) = exp(-i F(delta) axis); exact for a fixed pulse axis."""
    if not 0.0 <= delta <= shape.duration * (1 + 1e-12):
        raise ValueError(f"delta={delta} outside [0, {shape.duration}]")
    prop = axis_propagator(to_dense(axis))
    return prop(float(shape.cumulative_area(delta)))


def pulse_axes_for_generator(
    gen: GeneratorSpec,
    kind: str = "sine_squared",
    duration: float = 1.0,
    tol: float = 1e-9,
) -> tuple[OperatorSum, PulseShape]:
    """Axis/shape pair whose end-of-ramp propagator realizes the generator.

    The returned shape has area equal to the generator's target angle;
    the match to gen.unitary is checked up to global phase.
    """
    factory = {
        "sine_squared": PulseShape.sine_squared,
        "triangle": PulseShape.triangle,
        "constant": PulseShape.constant,
    }[kind]
    shape = factory(duration, gen.target_angle)
    end = segment_propagator(shape, gen.control_axis, duration)
    dim = end.shape[0]
    overlap = abs(np.trace(end.conj().T @ gen.unitary))
    if abs(overlap - dim) > tol * dim:
        raise PulseMismatchError(
            f"generator {gen.label!r}: pulse end propagator does not match the "
            f"declared unitary (|tr| = {overlap}, dim = {dim})"
        )
    return gen.control_axis, shape
