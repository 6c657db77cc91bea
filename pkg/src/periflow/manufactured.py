"""Built-in manufactured solution for convergence verification.

A divergence-free vortex from the stream function
psi = a * sin(2*pi*x) * (1 - y^2)^2 on the straight channel, paired with the
smooth periodic pressure p = sin(4*pi*x) * cos(2*pi*y).  The fields vanish
on the walls and match across the sections together with their
x-derivatives, so they are admissible data for the periodic problem, and
they are smooth, so the mixed discretisation should deliver its textbook
orders: 2 in H1 and 3 in L2 for velocity, 2 in L2 for pressure.

The amplitude and the pressure frequency are chosen so that the plain
interpolation component of the pressure error (the O(h^2) part) dominates
on practical meshes; with a low-frequency pressure the structured grid
superconverges and hides the generic order.

The body force below was derived by hand from the fields; the test suite
cross-checks it symbolically.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["ManufacturedSolution", "default_manufactured"]

_2PI = 2.0 * np.pi
_AMP = 0.5  # stream-function amplitude


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact fields and the matching body force.

    velocity(x, y) -> (u1, u2)
    velocity_gradient(x, y) -> (du1/dx, du1/dy, du2/dx, du2/dy)
    pressure(x, y) -> p  (zero mean over the channel)
    body_force(x, y, convective) -> (f1, f2), the right-hand side that makes
        the fields solve the momentum equation, with or without the
        convective term.
    """

    velocity: callable
    velocity_gradient: callable
    pressure: callable
    body_force: callable


def _velocity(x, y):
    s = np.sin(_2PI * x)
    c = np.cos(_2PI * x)
    w = 1.0 - y**2
    return -4.0 * _AMP * y * w * s, -_2PI * _AMP * w**2 * c


def _velocity_gradient(x, y):
    s = np.sin(_2PI * x)
    c = np.cos(_2PI * x)
    w = 1.0 - y**2
    du1dx = -4.0 * _2PI * _AMP * y * w * c
    du1dy = _AMP * (-4.0 + 12.0 * y**2) * s
    du2dx = _2PI**2 * _AMP * w**2 * s
    du2dy = 4.0 * _2PI * _AMP * y * w * c
    return du1dx, du1dy, du2dx, du2dy


def _pressure(x, y):
    return np.sin(2.0 * _2PI * x) * np.cos(_2PI * y)


def _body_force(x, y, convective=False):
    pi = np.pi
    s = np.sin(_2PI * x)
    c = np.cos(_2PI * x)
    w = 1.0 - y**2
    lap_u1 = _AMP * (16.0 * pi**2 * y * w + 24.0 * y) * s
    lap_u2 = _AMP * (8.0 * pi**3 * w**2 + 8.0 * pi * (1.0 - 3.0 * y**2)) * c
    dpdx = 2.0 * _2PI * np.cos(2.0 * _2PI * x) * np.cos(_2PI * y)
    dpdy = -_2PI * np.sin(2.0 * _2PI * x) * np.sin(_2PI * y)
    f1 = -lap_u1 + dpdx
    f2 = -lap_u2 + dpdy
    if convective:
        f1 = f1 + _AMP**2 * 8.0 * pi * w**2 * (1.0 + y**2) * s * c
        f2 = f2 - _AMP**2 * 16.0 * pi**2 * y * w**3
    return f1, f2


def default_manufactured() -> ManufacturedSolution:
    return ManufacturedSolution(
        velocity=_velocity,
        velocity_gradient=_velocity_gradient,
        pressure=_pressure,
        body_force=_body_force,
    )
