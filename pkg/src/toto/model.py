"""Scaled parametric-oscillator model.

The width parameter ``b`` of the oscillator state obeys an Ermakov equation.
With ``x1 = b``, ``x2 = b'/omega0``, ``u = omega**2/omega0**2`` and time measured
in units of ``1/omega0`` the dynamics become

    x1' = x2
    x2' = -u*x1 + 1/x1**3

and a transfer between equilibrium states is a transfer from ``(1, 0)`` to
``(gamma, 0)`` with ``gamma = sqrt(omega0/omegaf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InvalidProblemError(ValueError):
    """Raised when problem parameters violate the required bound ordering."""


class DomainError(ArithmeticError):
    """Raised when a state leaves the half-plane ``x1 > 0``."""


@dataclass(frozen=True)
class ProblemSpec:
    """Dimensionless problem instance ``(gamma, u1, u2)``.

    Requires ``0 < u1 <= 1/gamma**4 < 1 <= u2``. The equality cases are valid.
    """

    gamma: float
    u1: float
    u2: float

    def __post_init__(self):
        g, u1, u2 = self.gamma, self.u1, self.u2
        if not all(math.isfinite(v) for v in (g, u1, u2)):
            raise InvalidProblemError(f"non-finite parameters: {self}")
        if not g > 1.0:
            raise InvalidProblemError(f"gamma must exceed 1, got {g}")
        if not u1 > 0.0:
            raise InvalidProblemError(f"u1 must be positive, got {u1}")
        # relative slack so that u1 = 1/gamma**4 computed in floats is accepted
        if u1 > g**-4 * (1.0 + 1e-12):
            raise InvalidProblemError(f"u1={u1} exceeds 1/gamma^4={g**-4}")
        if not u2 >= 1.0:
            raise InvalidProblemError(f"u2 must be at least 1, got {u2}")

    @property
    def c1(self) -> float:
        """First integral of the X-arc through the start point (1, 0)."""
        return self.u1 + 1.0

    @property
    def c2(self) -> float:
        """First integral of the Y-arc through the start point (1, 0)."""
        return self.u2 + 1.0

    @property
    def c(self) -> float:
        """First integral of the Y-arc through the target point (gamma, 0)."""
        return self.u2 * self.gamma**2 + 1.0 / self.gamma**2

    @property
    def target(self) -> "PhaseState":
        return PhaseState(self.gamma, 0.0)


@dataclass(frozen=True)
class PhysicalSpec:
    """Frequencies in rad/s: start, final, lower bound and upper bound."""

    omega0: float
    omegaf: float
    omega1: float
    omega2: float

    def __post_init__(self):
        w0, wf, w1, w2 = self.omega0, self.omegaf, self.omega1, self.omega2
        if not all(math.isfinite(v) for v in (w0, wf, w1, w2)):
            raise InvalidProblemError(f"non-finite frequencies: {self}")
        if not (0.0 < w1 <= wf < w0 <= w2):
            raise InvalidProblemError(
                "frequencies must satisfy 0 < omega1 <= omegaf < omega0 <= omega2, "
                f"got omega0={w0}, omegaf={wf}, omega1={w1}, omega2={w2}"
            )


@dataclass(frozen=True)
class PhaseState:
    x1: float
    x2: float

    def __post_init__(self):
        if not self.x1 > 0.0:
            raise DomainError(f"x1 must be positive, got {self.x1}")

    def __iter__(self):
        yield self.x1
        yield self.x2


@dataclass(frozen=True)
class ZState:
    """Second moments ``(z1, z2, z3)`` scaled so the Casimir equals one."""

    z1: float
    z2: float
    z3: float

    @property
    def casimir(self) -> float:
        return self.z1 * self.z2 - self.z3**2 / 4.0


def scale_problem(phys: PhysicalSpec) -> ProblemSpec:
    """Map physical frequencies to the dimensionless ``(gamma, u1, u2)``."""
    gamma = math.sqrt(phys.omega0 / phys.omegaf)
    u1 = (phys.omega1 / phys.omega0) ** 2
    u2 = (phys.omega2 / phys.omega0) ** 2
    # omega1 = omegaf gives u1 = 1/gamma^4 up to rounding; snap it onto the bound
    u1 = min(u1, gamma**-4)
    u2 = max(u2, 1.0)
    return ProblemSpec(gamma, u1, u2)


def dynamics_rhs(state: PhaseState, u: float) -> tuple[float, float]:
    x1, x2 = state.x1, state.x2
    if not x1 > 0.0:
        raise DomainError(f"x1 must be positive, got {x1}")
    return x2, -u * x1 + 1.0 / x1**3


def first_integral(state: PhaseState, u: float) -> float:
    """``x2**2 + u*x1**2 + 1/x1**2``, constant along any arc with fixed ``u``."""
    x1, x2 = state.x1, state.x2
    if not x1 > 0.0:
        raise DomainError(f"x1 must be positive, got {x1}")
    return x2 * x2 + u * x1 * x1 + 1.0 / (x1 * x1)


def to_z_space(state: PhaseState) -> ZState:
    x1, x2 = state.x1, state.x2
    if not x1 > 0.0:
        raise DomainError(f"x1 must be positive, got {x1}")
    return ZState(x1 * x1, x2 * x2 + 1.0 / (x1 * x1), 2.0 * x1 * x2)


def temperature_ratio(spec: ProblemSpec) -> float:
    """Final over initial ensemble temperature, ``omegaf/omega0 = 1/gamma**2``."""
    return 1.0 / spec.gamma**2
