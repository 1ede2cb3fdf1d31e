"""Propagation of the phase-plane system under piecewise-constant control."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from .model import DomainError, PhaseState, ProblemSpec, first_integral

TWO_PI = 2.0 * math.pi


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class BangBangProtocol:
    """Ordered ``(u, duration)`` segments with alternating control values."""

    segments: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        segs = tuple((float(u), float(d)) for u, d in self.segments)
        object.__setattr__(self, "segments", segs)
        for i, (u, d) in enumerate(segs):
            if not u > 0.0:
                raise ValueError(f"segment {i}: control must be positive, got {u}")
            if not d > 0.0:
                raise ValueError(f"segment {i}: duration must be positive, got {d}")
            if i and u == segs[i - 1][0]:
                raise ValueError(f"segment {i}: controls must alternate")

    @classmethod
    def from_controls(cls, controls: Sequence[float], durations: Sequence[float]):
        return cls(tuple(zip(controls, durations)))

    @property
    def controls(self) -> list[float]:
        return [u for u, _ in self.segments]

    @property
    def durations(self) -> list[float]:
        return [d for _, d in self.segments]

    @property
    def total_time(self) -> float:
        return math.fsum(self.durations)

    @property
    def switch_count(self) -> int:
        return max(len(self.segments) - 1, 0)

    def __len__(self):
        return len(self.segments)


@dataclass
class Trajectory:
    """Sampled trajectory.

    ``times`` is strictly increasing. ``boundaries[i]`` is the sample index of
    the state that ends segment ``i`` (so the last entry is the final state)
    and ``controls[i]`` is the control applied on that segment.
    """

    times: np.ndarray
    states: np.ndarray  # shape (N, 2)
    boundaries: list[int] = field(default_factory=list)
    controls: list[float] = field(default_factory=list)

    @property
    def final_state(self) -> PhaseState:
        x1, x2 = self.states[-1]
        return PhaseState(float(x1), float(x2))

    @property
    def switching_states(self) -> list[PhaseState]:
        return [PhaseState(*map(float, self.states[i])) for i in self.boundaries[:-1]]

    def z_space(self) -> np.ndarray:
        """Array of ``(z1, z2, z3)`` rows, one per sample."""
        x1, x2 = self.states[:, 0], self.states[:, 1]
        return np.column_stack([x1 * x1, x2 * x2 + 1.0 / (x1 * x1), 2.0 * x1 * x2])

    def sample_controls(self) -> np.ndarray:
        """Control in force on the segment that ends at or after each sample."""
        out = np.empty(len(self.times))
        start = 0
        for end, u in zip(self.boundaries, self.controls):
            out[start : end + 1] = u
            start = end + 1
        if self.controls:
            out[0] = self.controls[0]
        else:
            out[:] = math.nan
        return out

    def to_csv(self, fh) -> None:
        """Write ``t,x1,x2,u,z1,z2,z3`` rows.

        Switching states are written twice, once with the outgoing control of
        the ending segment and once with the control of the next segment.
        """
        z = self.z_space()
        fh.write("t,x1,x2,u,z1,z2,z3\n")

        def row(i, u):
            vals = (self.times[i], *self.states[i], u, *z[i])
            fh.write(",".join(_fmt(v) for v in vals) + "\n")

        if not self.controls:
            row(0, math.nan)
            return
        start = 0
        for end, u in zip(self.boundaries, self.controls):
            for i in range(start, end + 1):
                row(i, u)
            start = end


def _fmt(v: float) -> str:
    return format(float(v), ".10g")


def propagate_closed_form(state: PhaseState, u: float, tau: float) -> PhaseState:
    if not u > 0.0:
        raise ValueError(f"control must be positive, got {u}")
    x1, x2, rho = kernels.step(state.x1, state.x2, u, tau)
    if not rho > 0.0:
        raise DomainError(f"squared width became non-positive ({rho}) during propagation")
    return PhaseState(x1, x2)


def integrate_numeric(state: PhaseState, u: float, tau: float, tol: float = 1e-10) -> PhaseState:
    """Adaptive explicit Runge-Kutta (DOP853) integration of the dynamics."""
    if tau == 0.0:
        return state

    def rhs(_, y):
        return (y[1], -u * y[0] + 1.0 / y[0] ** 3)

    sol = solve_ivp(rhs, (0.0, tau), [state.x1, state.x2], method="DOP853", rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise IntegrationError(sol.message)
    x1, x2 = sol.y[:, -1]
    return PhaseState(float(x1), float(x2))


def simulate_protocol(
    start: PhaseState, protocol: BangBangProtocol, samples_per_segment: int = 200
) -> Trajectory:
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be at least 1")
    times = [0.0]
    states = [(start.x1, start.x2)]
    boundaries = []
    t0 = 0.0
    x1, x2 = start.x1, start.x2
    for u, d in protocol.segments:
        for t in np.linspace(0.0, d, samples_per_segment + 1)[1:]:
            y1, y2, rho = kernels.step(x1, x2, u, t)
            if not rho > 0.0:
                raise DomainError(f"squared width became non-positive ({rho}) during propagation")
            times.append(t0 + t)
            states.append((y1, y2))
        # continue from the exact segment end, not from an accumulated sample
        x1, x2 = states[-1]
        t0 += d
        boundaries.append(len(states) - 1)
    return Trajectory(np.array(times), np.array(states, dtype=float), boundaries, protocol.controls)


def final_state(start: PhaseState, protocol: BangBangProtocol) -> PhaseState:
    state = start
    for u, d in protocol.segments:
        state = propagate_closed_form(state, u, d)
    return state


def inter_switch_time(state: PhaseState, u: float) -> float:
    """Time from a switching point to the next one along a ``u``-arc.

    Solves ``sin(2 sqrt(u) tau) = -2 sqrt(u) x1 x2 / (x2^2 + u x1^2)`` and
    ``cos(2 sqrt(u) tau) = (x2^2 - u x1^2) / (x2^2 + u x1^2)`` for the angle in
    ``(0, 2*pi]``.
    """
    x1, x2 = state.x1, state.x2
    if x2 == 0.0:
        raise ValueError("switching points never lie on the x1-axis")
    su = math.sqrt(u)
    den = x2 * x2 + u * x1 * x1
    theta = math.atan2(-2.0 * su * x1 * x2 / den, (x2 * x2 - u * x1 * x1) / den)
    if theta <= 0.0:
        theta += TWO_PI
    return theta / (2.0 * su)


def arc_time(start: PhaseState, end: PhaseState, u: float) -> float:
    """Shortest forward time from ``start`` to ``end`` along a common ``u``-arc.

    The two states are assumed to lie on the same arc; the result is the
    phase difference divided by the phase rate, in ``[0, pi/sqrt(u))``.
    """
    dpsi = kernels.phase(end.x1, end.x2, u) - kernels.phase(start.x1, start.x2, u)
    return (dpsi % TWO_PI) / (2.0 * math.sqrt(u))


@dataclass
class ValidationReport:
    endpoint_error: float
    max_integral_drift: float
    max_casimir_drift: float
    max_ratio_residual: float
    signs_alternate: bool
    max_switch_point_error: float
    recomputed_total_time: float
    total_time: float
    tol: float
    passed: bool
    reasons: list[str] = field(default_factory=list)


def validate_protocol(
    protocol: BangBangProtocol,
    spec: ProblemSpec,
    tol: float = 1e-6,
    *,
    s: float | None = None,
    expected_points: Sequence[PhaseState] | None = None,
    total_time: float | None = None,
    samples_per_segment: int = 32,
) -> ValidationReport:
    """Simulate ``protocol`` from ``(1, 0)`` and audit the result.

    When the ratio ``s`` and the predicted switching points are supplied, the
    simulated switching states are checked against them as well.
    """
    start = PhaseState(1.0, 0.0)
    traj = simulate_protocol(start, protocol, samples_per_segment)
    end = traj.final_state
    endpoint_error = math.hypot(end.x1 - spec.gamma, end.x2)
    reasons = []

    drift = 0.0
    casimir = float(np.max(np.abs(_casimir(traj) - 1.0)))
    recomputed = 0.0
    prev = start
    switches = traj.switching_states
    for i, (u, _) in enumerate(protocol.segments):
        seg_end = PhaseState(*map(float, traj.states[traj.boundaries[i]]))
        i0 = first_integral(prev, u)
        drift = max(drift, abs(first_integral(seg_end, u) - i0) / max(1.0, i0))
        # extremal segments between two switchings follow the switching-time law
        intermediate = s is not None and 0 < i < len(protocol) - 1
        recomputed += inter_switch_time(prev, u) if intermediate else arc_time(prev, seg_end, u)
        prev = seg_end

    ratio_res = 0.0
    alternate = True
    point_err = 0.0
    if s is not None and switches:
        rs = math.sqrt(s)
        for p in switches:
            ratio_res = max(ratio_res, abs(abs(p.x2) / p.x1 - rs))
        alternate = all(a.x2 * b.x2 < 0.0 for a, b in zip(switches, switches[1:]))
    if expected_points is not None:
        if len(expected_points) != len(switches):
            point_err = math.inf
        else:
            for p, q in zip(switches, expected_points):
                point_err = max(point_err, math.hypot(p.x1 - q.x1, p.x2 - q.x2))

    total = protocol.total_time if total_time is None else total_time
    if not endpoint_error <= tol:
        reasons.append(f"endpoint error {endpoint_error:.3g} exceeds {tol:.3g}")
    if not drift <= 1e-9:
        reasons.append(f"first-integral drift {drift:.3g}")
    if not casimir <= 1e-9:
        reasons.append(f"Casimir drift {casimir:.3g}")
    if s is not None and not ratio_res <= max(tol, 1e-8):
        reasons.append(f"switching ratio residual {ratio_res:.3g}")
    if not alternate:
        reasons.append("switching points do not alternate sides of the x1-axis")
    if expected_points is not None and not point_err <= tol:
        reasons.append(f"switching points deviate by {point_err:.3g}")
    if protocol.segments and not abs(recomputed - total) <= 1e-8 * max(1.0, total):
        reasons.append(f"recomputed time {recomputed:.12g} differs from {total:.12g}")

    return ValidationReport(
        endpoint_error=endpoint_error,
        max_integral_drift=drift,
        max_casimir_drift=casimir,
        max_ratio_residual=ratio_res,
        signs_alternate=alternate,
        max_switch_point_error=point_err,
        recomputed_total_time=recomputed,
        total_time=total,
        tol=tol,
        passed=not reasons,
        reasons=reasons,
    )


def _casimir(traj: Trajectory) -> np.ndarray:
    z = traj.z_space()
    return z[:, 0] * z[:, 1] - z[:, 2] ** 2 / 4.0


def validate_solution(solution, spec: ProblemSpec, tol: float = 1e-6) -> ValidationReport:
    """Audit an analytic extremal by simulating its protocol."""
    return validate_protocol(
        solution.protocol,
        spec,
        tol,
        s=solution.s,
        expected_points=solution.switching_points,
        total_time=solution.total_time,
    )
