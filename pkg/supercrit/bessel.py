"""
Bessel functions J0 and J1 for the oscillatory kernel quadrature: power series
below x = 12, Hankel asymptotic expansion above. miller_j0 is an independent
backward-recurrence evaluation kept as a cross-check.
"""

import math

import numpy as np
from scipy import special

SERIES_LIMIT = 12.0
SERIES_TERMS = 60
ASYMPTOTIC_TERMS = 12


def _series(nu, x):
    """sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!)"""
    half = 0.5 * x
    term = half ** nu / math.factorial(nu)
    total = term.copy()
    square = -half * half
    for k in range(1, SERIES_TERMS):
        term = term * square / (k * (k + nu))
        total = total + term
    return total


def _hankel(nu, x):
    """sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - nu pi/2 - pi/4"""
    mu = 4.0 * nu * nu
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 2 * ASYMPTOTIC_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2 == 1:
            Q = Q + (-1) ** ((k - 1) // 2) * term
        else:
            P = P + (-1) ** (k // 2) * term
    chi = x - nu * math.pi / 2.0 - math.pi / 4.0
    return np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def _bessel(nu, x):
    x = np.asarray(x, dtype=float)
    sign = 1.0
    if nu == 1:
        sign = np.sign(x)
    ax = np.abs(x)
    small = ax < SERIES_LIMIT
    values = np.empty_like(ax)
    if np.any(small):
        values[small] = _series(nu, ax[small])
    if np.any(~small):
        values[~small] = _hankel(nu, ax[~small])
    values = values * sign if nu == 1 else values
    return float(values) if values.ndim == 0 else values


def j0(x):
    return _bessel(0, x)


def j1(x):
    return _bessel(1, x)


def miller_j0(x, extra=40):
    """J0(x) by Miller's backward recurrence normalized with J0 + 2 sum J_2k = 1"""
    x = float(x)
    if x == 0.0:
        return 1.0
    start = 2 * ((int(x) + extra) // 2)
    upper, current = 0.0, 1e-30
    even_sum = 0.0
    j0_value = current
    for n in range(start, 0, -1):
        lower = (2.0 * n / x) * current - upper
        upper, current = current, lower
        if abs(current) > 1e250:
            upper *= 1e-250
            current *= 1e-250
            even_sum *= 1e-250
        if (n - 1) % 2 == 0 and n - 1 > 0:
            even_sum += current
        j0_value = current
    return j0_value / (j0_value + 2.0 * even_sum)


def zeros(nu, count):
    """First count positive zeros of J_nu"""
    return special.jn_zeros(nu, count)
