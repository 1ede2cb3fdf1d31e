"""Brute-force optimality check over bang-bang switching durations.

For a fixed starting control and switching count ``k`` the protocol has
``k + 1`` durations. The first ``k - 1`` are searched with a multi-start
Nelder-Mead simplex over log-durations. The last two are fixed in closed
form: along the penultimate arc (control ``ua``) the first integral of the
final control ``ub`` is ``I_a + (ub - ua) * x1**2`` and ``x1**2`` is harmonic
in time, so the instants where the state enters the ``ub``-arc through
``(gamma, 0)`` are explicit. The remaining time to the target is a phase
difference on that arc. Configurations where the entry is impossible are
penalised by the squared level mismatch with an increasing weight schedule.

Nothing here uses the switching-ratio construction of :mod:`toto.solver`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from . import kernels
from .model import PhaseState, ProblemSpec
from .trajectory import propagate_closed_form

TWO_PI = 2.0 * math.pi
INFEASIBLE_OFFSET = 1e3


@dataclass(frozen=True)
class OracleConfig:
    max_switchings: int = 8
    restarts: int = 32
    penalty_weights: tuple[float, ...] = (1e2, 1e4, 1e6)
    duration_upper_bound: float | None = None
    seed: int = 0
    feasibility_tol: float = 1e-5
    min_duration: float = 1e-3
    xatol: float = 1e-10
    fatol: float = 1e-12

    def __post_init__(self):
        if self.max_switchings < 1:
            raise ValueError("max_switchings must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        w = self.penalty_weights
        if not w or any(x <= 0 for x in w) or any(b <= a for a, b in zip(w, w[1:])):
            raise ValueError("penalty_weights must be positive and increasing")


@dataclass
class OracleResult:
    starts_with: float
    k_switchings: int
    feasible: bool
    best_time: float
    durations: list[float]
    endpoint_error: float
    other: float = math.nan
    restart_times: list[float] = field(default_factory=list)

    @property
    def controls(self) -> list[float]:
        return _controls(self.starts_with, self.other, self.k_switchings)


@dataclass
class ConfirmationReport:
    analytic_time: float
    best_oracle_time: float
    passed: bool
    falsified: bool
    durations_match: bool
    max_duration_deviation: float
    results: list[OracleResult]
    falsifications: list[OracleResult] = field(default_factory=list)


@njit(cache=True)
def _finish(x1, x2, ua, ub, gamma):
    """Best times of the last two segments, or the level mismatch if unreachable.

    Returns ``(t_penultimate, t_final, mismatch)``; the times are NaN when
    ``mismatch > 0``.
    """
    ia = x2 * x2 + ua * x1 * x1 + 1.0 / (x1 * x1)
    cb = ub * gamma * gamma + 1.0 / (gamma * gamma)
    rho_star = (cb - ia) / (ub - ua)
    su = math.sqrt(ua)
    h = ia / (2.0 * ua)
    a = x1 * x1 - h
    b = x1 * x2 / su
    r = math.hypot(a, b)
    lo = max(h - r, 0.0)
    hi = h + r
    if rho_star <= lo:
        return math.nan, math.nan, lo - rho_star + 1e-300
    if rho_star > hi:
        return math.nan, math.nan, rho_star - hi
    psi0 = math.atan2(-b, a)
    half = math.acos(max(-1.0, min(1.0, (rho_star - h) / r))) if r > 0.0 else 0.0
    target_phase = kernels.phase(gamma, 0.0, ub)
    sb = math.sqrt(ub)
    best_a = math.nan
    best_b = math.nan
    best = math.inf
    for sgn in (1.0, -1.0):
        ta = ((sgn * half - psi0) % TWO_PI) / (2.0 * su)
        q1, q2, rho = kernels.step(x1, x2, ua, ta)
        if not rho > 0.0:
            continue
        tb = ((target_phase - kernels.phase(q1, q2, ub)) % TWO_PI) / (2.0 * sb)
        if ta + tb < best:
            best = ta + tb
            best_a = ta
            best_b = tb
    return best_a, best_b, 0.0


@njit(cache=True)
def _objective(z, ctr, gamma, weight):
    x1 = 1.0
    x2 = 0.0
    t = 0.0
    m = ctr.shape[0]
    for i in range(m - 2):
        d = math.exp(z[i])
        t += d
        x1, x2, rho = kernels.step(x1, x2, ctr[i], d)
        if not rho > 0.0:
            return math.inf
    ta, tb, miss = _finish(x1, x2, ctr[m - 2], ctr[m - 1], gamma)
    if miss > 0.0:
        return t + INFEASIBLE_OFFSET + weight * miss * miss
    return t + ta + tb


@njit(cache=True)
def _nelder_mead(x0, ctr, gamma, weight, step, xatol, fatol, maxfev):
    # adaptive coefficients (Gao and Han) suit the higher-dimensional runs
    n = x0.shape[0]
    if n == 0:
        return x0.copy(), _objective(x0, ctr, gamma, weight)
    alpha = 1.0
    beta = 1.0 + 2.0 / n
    gam = 0.75 - 0.5 / n
    delta = 1.0 - 1.0 / n
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += step
    for i in range(n + 1):
        fs[i] = _objective(sim[i], ctr, gamma, weight)
    nfev = n + 1
    while nfev < maxfev:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        if np.max(np.abs(sim[1:] - sim[0])) <= xatol and np.max(np.abs(fs[1:] - fs[0])) <= fatol:
            break
        centroid = np.zeros(n)
        for i in range(n):
            centroid += sim[i]
        centroid /= n
        xr = centroid + alpha * (centroid - sim[n])
        fr = _objective(xr, ctr, gamma, weight)
        nfev += 1
        shrink = False
        if fr < fs[0]:
            xe = centroid + beta * (xr - centroid)
            fe = _objective(xe, ctr, gamma, weight)
            nfev += 1
            if fe < fr:
                sim[n] = xe
                fs[n] = fe
            else:
                sim[n] = xr
                fs[n] = fr
        elif fr < fs[n - 1]:
            sim[n] = xr
            fs[n] = fr
        elif fr < fs[n]:
            xc = centroid + gam * (xr - centroid)
            fc = _objective(xc, ctr, gamma, weight)
            nfev += 1
            if fc <= fr:
                sim[n] = xc
                fs[n] = fc
            else:
                shrink = True
        else:
            xc = centroid - gam * (centroid - sim[n])
            fc = _objective(xc, ctr, gamma, weight)
            nfev += 1
            if fc < fs[n]:
                sim[n] = xc
                fs[n] = fc
            else:
                shrink = True
        if shrink:
            for i in range(1, n + 1):
                sim[i] = sim[0] + delta * (sim[i] - sim[0])
                fs[i] = _objective(sim[i], ctr, gamma, weight)
            nfev += n
    best = np.argmin(fs)
    return sim[best].copy(), fs[best]


def _controls(first: float, other: float, k: int) -> list[float]:
    return [first if i % 2 == 0 else other for i in range(k + 1)]


def _durations(z, ctr, gamma):
    """Full duration vector for free log-durations ``z``, or None if infeasible."""
    x1, x2 = 1.0, 0.0
    out = []
    for u, zi in zip(ctr[:-2], z):
        d = math.exp(zi)
        out.append(d)
        x1, x2, _ = kernels.step(x1, x2, u, d)
    ta, tb, miss = _finish(x1, x2, ctr[-2], ctr[-1], gamma)
    if miss > 0.0:
        return None
    return out + [ta, tb]


def optimize_durations(spec: ProblemSpec, starts_with: float, k_switchings: int, cfg: OracleConfig = OracleConfig()) -> OracleResult:
    """Shortest feasible protocol with ``k_switchings`` switchings found by multi-start search.

    ``starts_with`` must be ``spec.u1`` or ``spec.u2``. Infeasibility is
    reported through ``OracleResult.feasible``.
    """
    if starts_with not in (spec.u1, spec.u2):
        raise ValueError("starts_with must be one of the control bounds")
    if k_switchings < 0:
        raise ValueError("k_switchings must be non-negative")
    other = spec.u2 if starts_with == spec.u1 else spec.u1
    result = OracleResult(starts_with, k_switchings, False, math.inf, [], math.inf, other=other)
    if k_switchings == 0:
        # a single arc from (1, 0) never reaches (gamma, 0), gamma > 1
        return result
    ctr = np.array(_controls(starts_with, other, k_switchings))
    free = k_switchings - 1
    ub = cfg.duration_upper_bound if cfg.duration_upper_bound is not None else 40.0
    lo, hi = math.log(cfg.min_duration), math.log(ub)
    rng = np.random.default_rng([cfg.seed, k_switchings, int(starts_with == spec.u2)])
    maxfev = 2000 * (k_switchings + 1)
    target = spec.target
    for _ in range(cfg.restarts):
        z = rng.uniform(lo, hi, free)
        f = math.inf
        for w in cfg.penalty_weights:
            z, f = _nelder_mead(z, ctr, spec.gamma, w, 0.5, cfg.xatol, cfg.fatol, maxfev)
        # fresh simplices around the incumbent until it stops improving
        for _ in range(5):
            z2, f2 = _nelder_mead(z, ctr, spec.gamma, cfg.penalty_weights[-1], 0.5, cfg.xatol, cfg.fatol, maxfev)
            if not f2 < f - 1e-13:
                break
            z, f = z2, f2
        durations = _durations(z, ctr, spec.gamma)
        if durations is None:
            result.restart_times.append(math.inf)
            continue
        end = _endpoint(ctr, durations)
        err = math.hypot(end.x1 - target.x1, end.x2 - target.x2)
        t = math.fsum(durations)
        result.restart_times.append(t if err <= cfg.feasibility_tol else math.inf)
        if err <= cfg.feasibility_tol and t < result.best_time:
            result.feasible = True
            result.best_time = t
            result.durations = durations
            result.endpoint_error = err
    return result


def _endpoint(ctr, durations) -> PhaseState:
    # zero-length segments are allowed here: they merge their neighbours
    state = PhaseState(1.0, 0.0)
    for u, d in zip(ctr, durations):
        state = propagate_closed_form(state, float(u), d)
    return state


def confirm_minimum(spec: ProblemSpec, analytic, cfg: OracleConfig = OracleConfig(), *, time_tol: float = 1e-4, duration_tol: float = 1e-3) -> ConfirmationReport:
    """Search every switching count up to ``cfg.max_switchings`` from both bounds.

    Fails if any feasible protocol is faster than ``analytic.total_time`` by
    more than ``time_tol``, or if the search at the analytic switching count
    and first control does not recover the analytic durations to
    ``duration_tol``.
    """
    if cfg.duration_upper_bound is None:
        cfg = replace(cfg, duration_upper_bound=4.0 * analytic.total_time)
    results = []
    for k in range(cfg.max_switchings + 1):
        for first in (spec.u1, spec.u2):
            results.append(optimize_durations(spec, first, k, cfg))
    feasible = [r for r in results if r.feasible]
    best = min((r.best_time for r in feasible), default=math.inf)
    beaten = [r for r in feasible if r.best_time < analytic.total_time - time_tol]

    target_protocol = analytic.protocol
    first_u = target_protocol.controls[0]
    match = [r for r in results if r.k_switchings == analytic.switch_count and r.starts_with == first_u]
    deviation = math.inf
    if match and match[0].feasible:
        deviation = max(abs(a - b) for a, b in zip(match[0].durations, target_protocol.durations))
    durations_match = deviation <= duration_tol
    falsified = bool(beaten)
    return ConfirmationReport(
        analytic_time=analytic.total_time,
        best_oracle_time=best,
        passed=not falsified and durations_match,
        falsified=falsified,
        durations_match=durations_match,
        max_duration_deviation=deviation,
        results=results,
        falsifications=beaten,
    )
