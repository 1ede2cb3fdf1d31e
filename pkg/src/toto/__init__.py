"""Minimum-time bang-bang frequency protocols for the quantum parametric oscillator."""

from .model import (
    DomainError,
    InvalidProblemError,
    PhaseState,
    PhysicalSpec,
    ProblemSpec,
    ZState,
    dynamics_rhs,
    first_integral,
    scale_problem,
    temperature_ratio,
    to_z_space,
)
from .solver import (
    Branch,
    ExtremalFamily,
    ExtremalSolution,
    SolverConfig,
    SolverError,
    enumerate_candidates,
    optimal_protocol,
    residual_even,
    residual_odd,
    segment_times,
    solve_s,
    switching_points,
)
from .trajectory import (
    BangBangProtocol,
    Trajectory,
    ValidationReport,
    inter_switch_time,
    integrate_numeric,
    propagate_closed_form,
    simulate_protocol,
    validate_protocol,
    validate_solution,
)

__version__ = "0.1.0"
