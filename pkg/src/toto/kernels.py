"""Compiled scalar kernels for constant-control propagation.

Along an arc with constant ``u`` the squared width ``rho = x1**2`` satisfies
``rho'' + 4*u*rho = 2*I`` where ``I`` is the first integral, so

    rho(t) = h + (rho0 - h)*cos(2*sqrt(u)*t) + (x1*x2/sqrt(u))*sin(2*sqrt(u)*t)

with ``h = I/(2*u)``. Writing ``rho - h = R*cos(psi)`` defines a phase ``psi``
that advances at the constant rate ``2*sqrt(u)``.
"""

import math

from numba import njit


@njit(cache=True)
def step(x1, x2, u, t):
    """Closed-form state after time ``t``. Returns ``(x1, x2, rho)``."""
    inv = 1.0 / (x1 * x1)
    integral = x2 * x2 + u * x1 * x1 + inv
    su = math.sqrt(u)
    h = integral / (2.0 * u)
    a = x1 * x1 - h
    b = x1 * x2 / su
    cs = math.cos(2.0 * su * t)
    sn = math.sin(2.0 * su * t)
    rho = h + a * cs + b * sn
    if rho <= 0.0:
        return math.nan, math.nan, rho
    rho_dot = 2.0 * su * (b * cs - a * sn)
    y = math.sqrt(rho)
    return y, rho_dot / (2.0 * y), rho


@njit(cache=True)
def phase(x1, x2, u):
    """Phase ``psi`` in ``(-pi, pi]`` of the state on its ``u``-arc."""
    integral = x2 * x2 + u * x1 * x1 + 1.0 / (x1 * x1)
    su = math.sqrt(u)
    h = integral / (2.0 * u)
    return math.atan2(-x1 * x2 / su, x1 * x1 - h)
