"""
Semi-Lagrangian transport of a scalar by a frozen velocity on the periodic
grid: departure points by the implicit midpoint rule, values by periodic
bicubic spline interpolation.
"""

import math

import numpy as np

from supercrit.logging_config import loggers
from supercrit.spectral import SpectralField, interpolate_periodic

logger = loggers['euler']


def cfl_limit(u, dx, safety):
    """Largest stable dt = safety * dx / max|u| (inf for u = 0)"""
    speed = u.sup_norm()
    if speed == 0:
        return math.inf
    return safety * dx / speed


def substeps(dt, dt_limit):
    """Split dt into n equal substeps no larger than dt_limit"""
    if dt <= dt_limit:
        return dt, 1
    count = int(math.ceil(dt / dt_limit))
    return dt / count, count


def departure_points(u, dt, iterations=3):
    """x_d = x - dt u((x + x_d)/2), fixed point of the midpoint rule"""
    grid = u.grid
    x1, x2 = grid.coordinates
    d1 = dt * np.asarray(u.u1.values)
    d2 = dt * np.asarray(u.u2.values)
    for _ in range(iterations):
        midpoints = np.stack([x1 - 0.5 * d1, x2 - 0.5 * d2], axis=-1)
        d1 = dt * interpolate_periodic(u.u1, midpoints)
        d2 = dt * interpolate_periodic(u.u2, midpoints)
    return np.stack([x1 - d1, x2 - d2], axis=-1)


def advect(f, u, dt, iterations=3):
    """Transport f by the frozen velocity u over one step dt"""
    if dt == 0 or u.sup_norm() == 0:
        return SpectralField(f.grid, values=f.values, name=f.name)
    points = departure_points(u, dt, iterations)
    return SpectralField(f.grid, values=interpolate_periodic(f, points), name=f.name)
