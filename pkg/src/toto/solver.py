"""Closed-form enumeration of bang-bang extremals.

Every extremal is either ``XYX...XY`` with ``2n+1`` switchings or
``YXY...XY`` with ``2n`` switchings (``X``: control ``u1``, ``Y``: control
``u2``). All switching points share the squared slope ``s = (x2/x1)**2`` and
``s`` solves a scalar transcendental equation. Given ``s`` every segment
duration is explicit.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .model import DomainError, PhaseState, ProblemSpec
from .trajectory import BangBangProtocol, ValidationReport, validate_solution

log = logging.getLogger(__name__)

SQRT_SLACK = 1e-12
ACOS_SLACK = 1e-9
RESIDUAL_TOL = 1e-9


class SolverError(RuntimeError):
    """Internal inconsistency: an invalid root or a missing mandatory extremal."""


class ExtremalFamily(enum.Enum):
    ODD = "OddStartsWithX"
    EVEN = "EvenStartsWithY"

    def switch_count(self, n: int) -> int:
        return 2 * n + 1 if self is ExtremalFamily.ODD else 2 * n


class Branch(enum.Enum):
    PLUS = 1
    MINUS = -1

    @property
    def symbol(self) -> str:
        return "+" if self is Branch.PLUS else "-"


@dataclass(frozen=True)
class SolverConfig:
    n_max: int = 8
    scan_points: int = 20000
    root_tol: float = 1e-12
    validate_tol: float = 1e-6

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        if self.scan_points < 100:
            raise ValueError("scan_points must be at least 100")
        if not (self.root_tol > 0 and self.validate_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class ExtremalSolution:
    family: ExtremalFamily
    n: int
    branch: Branch
    s: float
    t_initial: float
    t_x: float
    t_y: float
    t_final: float
    total_time: float
    switching_points: list[PhaseState]
    u1: float
    u2: float
    validation: ValidationReport | None = field(default=None, repr=False)

    @property
    def switch_count(self) -> int:
        return self.family.switch_count(self.n)

    @property
    def label(self) -> str:
        """Row label such as ``T3+`` or ``T2-``."""
        return f"T{self.switch_count}{self.branch.symbol}"

    @property
    def word(self) -> str:
        """Concatenation word such as ``XYXY``."""
        return "".join("X" if u == self.u1 else "Y" for u in self.protocol.controls)

    @property
    def protocol(self) -> BangBangProtocol:
        u1, u2, n = self.u1, self.u2, self.n
        if self.family is ExtremalFamily.ODD:
            segs = [(u1, self.t_initial)] + [(u2, self.t_y), (u1, self.t_x)] * n
        else:
            segs = [(u2, self.t_initial)] + [(u1, self.t_x), (u2, self.t_y)] * (n - 1)
            segs.append((u1, self.t_x))
        segs.append((u2, self.t_final))
        return BangBangProtocol(tuple(segs))


def _root(arg, what):
    """sqrt with tolerance for round-off just below zero."""
    arg = np.asarray(arg, dtype=float)
    if np.any(arg < -SQRT_SLACK):
        raise DomainError(f"{what}: square-root argument {np.min(arg):.3g} < 0; s outside its interval")
    return np.sqrt(np.maximum(arg, 0.0))


def _odd_sides(s, n, branch, spec):
    u1, u2 = spec.u1, spec.u2
    d1 = _root(spec.c1**2 - 4.0 * (s + u1), "initial X-arc")
    d = _root(spec.c**2 - 4.0 * (s + u2), "final Y-arc")
    lhs = (spec.c + d) / (spec.c1 + branch.value * d1)
    rhs = ((s + u2) / (s + u1)) ** (n + 1)
    return lhs, rhs


def _even_sides(s, n, branch, spec):
    u1, u2 = spec.u1, spec.u2
    d2 = _root(spec.c2**2 - 4.0 * (s + u2), "initial Y-arc")
    d = _root(spec.c**2 - 4.0 * (s + u2), "final Y-arc")
    lhs = (spec.c + d) / (spec.c2 - branch.value * d2)
    rhs = ((s + u2) / (s + u1)) ** n
    return lhs, rhs


def residual_odd(s, n: int, branch: Branch, spec: ProblemSpec):
    """LHS minus RHS of the ratio equation for ``XY...XY`` with ``2n+1`` switchings."""
    lhs, rhs = _odd_sides(s, n, branch, spec)
    return lhs - rhs


def residual_even(s, n: int, branch: Branch, spec: ProblemSpec):
    """LHS minus RHS of the ratio equation for ``YX...XY`` with ``2n`` switchings."""
    if n < 1:
        raise ValueError("the even family needs n >= 1")
    lhs, rhs = _even_sides(s, n, branch, spec)
    return lhs - rhs


def s_interval(family: ExtremalFamily, spec: ProblemSpec) -> float:
    """Upper end of the admissible ``s`` interval; the lower end (0) is open."""
    if family is ExtremalFamily.ODD:
        return min((1.0 - spec.u1) ** 2 / 4.0, (spec.u2 * spec.gamma**2 - spec.gamma**-2) ** 2 / 4.0)
    return (spec.u2 - 1.0) ** 2 / 4.0


def _sides(family):
    return _odd_sides if family is ExtremalFamily.ODD else _even_sides


def relative_residual(s, family: ExtremalFamily, n: int, branch: Branch, spec: ProblemSpec):
    """``LHS/RHS - 1``; both sides are positive, so its roots and signs match the residual."""
    lhs, rhs = _sides(family)(s, n, branch, spec)
    return lhs / rhs - 1.0


def solve_s(
    family: ExtremalFamily, n: int, branch: Branch, spec: ProblemSpec, cfg: SolverConfig = SolverConfig()
) -> list[float]:
    """All sign-change roots of the ratio equation in ``(0, s_max]``.

    A uniform scan brackets the roots, bisection refines each bracket to
    machine precision (always at least ``cfg.root_tol``), which keeps the
    absolute residual small even when both sides are large. The
    comparison is done on ``log(LHS) - log(RHS)``, which keeps the scale of the
    function bounded when the right-hand side power is large.
    """
    if family is ExtremalFamily.EVEN and n < 1:
        return []
    s_max = s_interval(family, spec)
    if not s_max > 0.0:
        return []
    sides = _sides(family)

    def g(s):
        lhs, rhs = sides(s, n, branch, spec)
        return np.log(lhs) - np.log(rhs)

    grid = s_max * np.arange(1, cfg.scan_points + 1) / cfg.scan_points
    grid[-1] = s_max
    vals = g(grid)
    roots = []
    for i in np.flatnonzero(vals == 0.0):
        roots.append(float(grid[i]))
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        a, b = float(grid[i]), float(grid[i + 1])
        roots.append(bisect(lambda x: float(g(x)), a, b, xtol=min(cfg.root_tol, 1e-300), maxiter=400))
    return sorted(roots)


def _acos(arg: float, what: str) -> float:
    if not -1.0 - ACOS_SLACK <= arg <= 1.0 + ACOS_SLACK:
        raise SolverError(f"{what}: inverse-cosine argument {arg!r} out of range; invalid root")
    return math.acos(min(1.0, max(-1.0, arg)))


def x_arc_time(s: float, u1: float) -> float:
    """Time between consecutive switching points on an intermediate X-arc."""
    return _acos((s - u1) / (s + u1), "T_X") / (2.0 * math.sqrt(u1))


def y_arc_time(s: float, u2: float) -> float:
    """Time between consecutive switching points on an intermediate Y-arc."""
    return (2.0 * math.pi - _acos((s - u2) / (s + u2), "T_Y")) / (2.0 * math.sqrt(u2))


def segment_times(s: float, family: ExtremalFamily, n: int, branch: Branch, spec: ProblemSpec):
    """Durations ``(t_initial, t_x, t_y, t_final)`` for ratio ``s``."""
    u1, u2, c = spec.u1, spec.u2, spec.c
    r1, r2 = math.sqrt(u1), math.sqrt(u2)
    t_x = x_arc_time(s, u1)
    t_y = y_arc_time(s, u2)
    d = float(_root(c * c - 4.0 * (s + u2), "final Y-arc"))
    t_final = _acos((-s * c + u2 * d) / ((s + u2) * math.sqrt(c * c - 4.0 * u2)), "T_F") / (2.0 * r2)
    if family is ExtremalFamily.ODD:
        c1 = spec.c1
        d1 = float(_root(c1 * c1 - 4.0 * (s + u1), "initial X-arc"))
        arg = (s * c1 - branch.value * u1 * d1) / ((s + u1) * math.sqrt(c1 * c1 - 4.0 * u1))
        t_initial = _acos(arg, "T_I1") / (2.0 * r1)
    else:
        c2 = spec.c2
        d2 = float(_root(c2 * c2 - 4.0 * (s + u2), "initial Y-arc"))
        arg = (-s * c2 + branch.value * u2 * d2) / ((s + u2) * math.sqrt(c2 * c2 - 4.0 * u2))
        t_initial = _acos(arg, "T_I2") / (2.0 * r2)
    return t_initial, t_x, t_y, t_final


def total_time(family: ExtremalFamily, n: int, t_initial, t_x, t_y, t_final) -> float:
    if family is ExtremalFamily.ODD:
        return t_initial + n * (t_x + t_y) + t_final
    return t_initial + n * t_x + (n - 1) * t_y + t_final


def next_kappa_sq(k2: float, s: float, u: float) -> float:
    """Squared abscissa of the next switching point along a ``u``-arc."""
    return 1.0 / (k2 * (s + u))


def switching_points(s: float, family: ExtremalFamily, n: int, branch: Branch, spec: ProblemSpec) -> list[PhaseState]:
    """Switching points ``(kappa_j, mu_j)`` with ``mu_j**2 = s * kappa_j**2``.

    The first point is the ``branch`` root of the quartic for the initial arc.
    Consecutive points on a ``u``-arc obey ``kappa_{j+1}^2 kappa_j^2 (s+u) = 1``
    and ``mu`` changes sign at every switching. XY junctions have ``x2 > 0``.
    """
    u1, u2 = spec.u1, spec.u2
    if family is ExtremalFamily.ODD:
        first_u, cst, sign = u1, spec.c1, 1.0
        count = 2 * n + 1
    else:
        first_u, cst, sign = u2, spec.c2, -1.0
        count = 2 * n
    disc = float(_root(cst * cst - 4.0 * (s + first_u), "first switching point"))
    k2 = (cst + branch.value * disc) / (2.0 * (s + first_u))
    # connecting arc of point j -> j+1 uses the control opposite to first_u, then alternates
    u_next = u2 if first_u == u1 else u1
    rs = math.sqrt(s)
    points = []
    for _ in range(count):
        k = math.sqrt(k2)
        points.append(PhaseState(k, sign * rs * k))
        k2 = next_kappa_sq(k2, s, u_next)
        u_next = u1 if u_next == u2 else u2
        sign = -sign
    return points


def build_solution(s: float, family: ExtremalFamily, n: int, branch: Branch, spec: ProblemSpec) -> ExtremalSolution:
    ti, tx, ty, tf = segment_times(s, family, n, branch, spec)
    return ExtremalSolution(
        family=family,
        n=n,
        branch=branch,
        s=s,
        t_initial=ti,
        t_x=tx,
        t_y=ty,
        t_final=tf,
        total_time=total_time(family, n, ti, tx, ty, tf),
        switching_points=switching_points(s, family, n, branch, spec),
        u1=spec.u1,
        u2=spec.u2,
    )


def family_combinations(spec: ProblemSpec, cfg: SolverConfig):
    for n in range(cfg.n_max + 1):
        for branch in Branch:
            yield ExtremalFamily.ODD, n, branch
    if spec.u2 > 1.0:
        for n in range(1, cfg.n_max + 1):
            for branch in Branch:
                yield ExtremalFamily.EVEN, n, branch


def _sort_key(sol: ExtremalSolution):
    return (sol.total_time, sol.switch_count, sol.branch is not Branch.PLUS)


def enumerate_candidates(spec: ProblemSpec, cfg: SolverConfig = SolverConfig()) -> list[ExtremalSolution]:
    """All validated extremals with ``n <= cfg.n_max``, fastest first.

    Roots whose protocol does not reach ``(gamma, 0)`` within
    ``cfg.validate_tol`` are discarded.
    """
    out = []
    for family, n, branch in family_combinations(spec, cfg):
        for s in solve_s(family, n, branch, spec, cfg):
            try:
                sol = build_solution(s, family, n, branch, spec)
                rel = abs(float(relative_residual(s, family, n, branch, spec)))
                if not rel < RESIDUAL_TOL:
                    log.debug("rejecting s=%r for %s: residual %.3g", s, (family, n, branch), rel)
                    continue
                sol.validation = validate_solution(sol, spec, cfg.validate_tol)
            except (SolverError, DomainError, ValueError) as exc:
                log.debug("rejecting s=%r for %s: %s", s, (family, n, branch), exc)
                continue
            if sol.validation.passed:
                out.append(sol)
            else:
                log.debug("rejecting %s s=%r: %s", sol.label, s, "; ".join(sol.validation.reasons))
    if not any(sol.family is ExtremalFamily.ODD and sol.n == 0 for sol in out):
        raise SolverError(f"no validated single-switching extremal for {spec}")
    out.sort(key=_sort_key)
    return out


def optimal_protocol(
    spec: ProblemSpec, cfg: SolverConfig = SolverConfig(), candidates: list[ExtremalSolution] | None = None
) -> tuple[ExtremalSolution, BangBangProtocol]:
    """Fastest extremal and its executable control schedule.

    Times equal to within 1e-12 (relative) count as ties and go to the
    candidate with fewer switchings, then to the ``+`` branch.
    """
    if candidates is None:
        candidates = enumerate_candidates(spec, cfg)
    if not candidates:
        raise SolverError(f"no validated extremal for {spec}")
    t_min = min(sol.total_time for sol in candidates)
    tied = [sol for sol in candidates if sol.total_time <= t_min * (1.0 + 1e-12)]
    best = min(tied, key=lambda sol: (sol.switch_count, sol.branch is not Branch.PLUS, sol.total_time))
    return best, best.protocol
