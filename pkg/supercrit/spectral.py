"""
Real scalar and vector fields on the periodic N x N torus with the spectral
operators shared by the Euler and patch solvers: the modified Biot-Savart law
u = m(|D|) grad-perp Laplacian^-1 omega, radial multipliers, derivatives and
2/3-rule dealiasing. Arrays are indexed [i1, i2] (x1 along axis 0).
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage

from supercrit.logging_config import loggers

logger = loggers['spectral']


@dataclass(frozen=True)
class Grid:
    N: int
    L: float = 2.0 * math.pi

    def __post_init__(self):
        if self.N < 16 or self.N & (self.N - 1):
            raise ValueError(f"grid.N must be a power of two >= 16, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"domain.L must be positive, got {self.L}")

    @property
    def dx(self):
        return self.L / self.N

    @property
    def cell_area(self):
        return self.dx ** 2

    @property
    def spectral_shape(self):
        return (self.N, self.N // 2 + 1)

    @property
    def scale(self):
        """Physical wavenumber of integer index 1"""
        return 2.0 * math.pi / self.L

    @cached_property
    def index1(self):
        return np.fft.fftfreq(self.N, 1.0 / self.N)[:, None]

    @cached_property
    def index2(self):
        return np.fft.rfftfreq(self.N, 1.0 / self.N)[None, :]

    @cached_property
    def k1(self):
        return np.broadcast_to(self.scale * self.index1, self.spectral_shape)

    @cached_property
    def k2(self):
        return np.broadcast_to(self.scale * self.index2, self.spectral_shape)

    @cached_property
    def kmag(self):
        return np.hypot(self.k1, self.k2)

    @cached_property
    def kmag_squared(self):
        return self.k1 ** 2 + self.k2 ** 2

    @cached_property
    def nyquist_mask(self):
        """True on modes that have no well-defined derivative (index N/2)"""
        half = self.N // 2
        return (np.abs(self.index1) == half) | (np.abs(self.index2) == half)

    @cached_property
    def dealias_mask(self):
        """True on modes removed by the 2/3 rule"""
        cut = self.N / 3.0
        return np.maximum(np.abs(self.index1), np.abs(self.index2)) > cut

    @cached_property
    def coordinates(self):
        x = np.arange(self.N) * self.dx
        return np.meshgrid(x, x, indexing="ij")

    @property
    def max_kmag(self):
        return float(np.max(self.kmag))

    def spectral_weights(self):
        """Multiplicity of each rfft column in the full spectrum"""
        weights = np.full(self.spectral_shape, 2.0)
        weights[:, 0] = 1.0
        if self.N % 2 == 0:
            weights[:, -1] = 1.0
        return weights

    def metadata(self):
        return {"N": self.N, "L": self.L}


class SpectralField:
    """Real scalar field with lazily synchronized rfft coefficients"""

    def __init__(self, grid, values=None, coefficients=None, name="field"):
        self.grid = grid
        self.name = name
        if values is None and coefficients is None:
            raise ValueError("field needs physical values or coefficients")
        if values is not None:
            values = np.asarray(values, dtype=float)
            if values.shape != (grid.N, grid.N):
                raise ValueError(f"field shape {values.shape} does not match grid N={grid.N}")
            values = values.copy()
            values.flags.writeable = False
        if coefficients is not None:
            coefficients = np.asarray(coefficients, dtype=complex)
            if coefficients.shape != grid.spectral_shape:
                raise ValueError(f"coefficient shape {coefficients.shape} does not match grid")
            coefficients = coefficients.copy()
            coefficients.flags.writeable = False
        self._values = values
        self._coefficients = coefficients

    @classmethod
    def from_function(cls, grid, func, name="field"):
        x1, x2 = grid.coordinates
        return cls(grid, values=func(x1, x2), name=name)

    @classmethod
    def zeros(cls, grid, name="field"):
        return cls(grid, values=np.zeros((grid.N, grid.N)), name=name)

    @property
    def values(self):
        if self._values is None:
            values = np.fft.irfft2(self._coefficients, s=(self.grid.N, self.grid.N), axes=(0, 1))
            values.flags.writeable = False
            self._values = values
        return self._values

    @property
    def coefficients(self):
        if self._coefficients is None:
            coefficients = np.fft.rfft2(self._values, axes=(0, 1))
            coefficients.flags.writeable = False
            self._coefficients = coefficients
        return self._coefficients

    @property
    def mean(self):
        return float(self.coefficients[0, 0].real / self.grid.N ** 2)

    def renamed(self, name):
        return SpectralField(self.grid, values=self.values, name=name)

    def with_coefficients(self, coefficients, name=None):
        return SpectralField(self.grid, coefficients=coefficients, name=name or self.name)

    def l2_norm(self):
        return float(np.sqrt(np.sum(self.values ** 2) * self.grid.cell_area))

    def coefficient_l2_norm(self):
        """L2 norm from the coefficients (Parseval)"""
        grid = self.grid
        energy = np.sum(grid.spectral_weights() * np.abs(self.coefficients) ** 2)
        return float(np.sqrt(energy * grid.cell_area) / grid.N)

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))

    def __add__(self, other):
        if isinstance(other, SpectralField):
            return SpectralField(self.grid, values=self.values + other.values, name=self.name)
        return SpectralField(self.grid, values=self.values + other, name=self.name)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SpectralField(self.grid, values=-self.values, name=self.name)

    def __mul__(self, other):
        if isinstance(other, SpectralField):
            return SpectralField(self.grid, values=self.values * other.values, name=self.name)
        return SpectralField(self.grid, values=self.values * other, name=self.name)

    __rmul__ = __mul__

    def __repr__(self):
        return f"SpectralField(name={self.name!r}, N={self.grid.N}, L={self.grid.L:.6g})"


@dataclass(frozen=True)
class VectorField:
    u1: SpectralField
    u2: SpectralField
    name: str = field(default="u")

    @property
    def grid(self):
        return self.u1.grid

    @property
    def components(self):
        return (self.u1, self.u2)

    def magnitude(self):
        return np.hypot(self.u1.values, self.u2.values)

    def sup_norm(self):
        return float(np.max(self.magnitude()))

    def l2_norm(self):
        return math.hypot(self.u1.l2_norm(), self.u2.l2_norm())

    def dot(self, other):
        return self.u1.values * other.u1.values + self.u2.values * other.u2.values

    def scaled(self, factor):
        return VectorField(self.u1 * factor, self.u2 * factor, self.name)

    def __add__(self, other):
        return VectorField(self.u1 + other.u1, self.u2 + other.u2, self.name)

    def divergence(self):
        grid = self.grid
        coefficients = 1j * grid.k1 * self.u1.coefficients + 1j * grid.k2 * self.u2.coefficients
        coefficients = np.where(grid.nyquist_mask, 0.0, coefficients)
        return SpectralField(grid, coefficients=coefficients, name=f"div {self.name}")

    def curl(self):
        grid = self.grid
        coefficients = 1j * grid.k1 * self.u2.coefficients - 1j * grid.k2 * self.u1.coefficients
        coefficients = np.where(grid.nyquist_mask, 0.0, coefficients)
        return SpectralField(grid, coefficients=coefficients, name=f"curl {self.name}")


def multiplier_symbol(grid, m):
    """m(|k|) on the grid; the k = 0 mode gets the clamped value"""
    return m.eval(grid.kmag)


def apply_symbol(f, symbol, name=None):
    return f.with_coefficients(symbol * f.coefficients, name=name)


def apply_multiplier(f, m):
    """Coefficient-wise multiplication by m(|k|)"""
    return apply_symbol(f, multiplier_symbol(f.grid, m), name=f"m(|D|) {f.name}")


def biot_savart(omega, m):
    """
    Velocity with coefficients u(k) = m(|k|) i (k2, -k1)/|k|^2 omega(k) for
    k != 0 and u(0) = 0, so that u = grad-perp Laplacian^-1 omega at m = 1.
    """
    grid = omega.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        inverse_laplacian = np.where(grid.kmag_squared > 0, 1.0 / grid.kmag_squared, 0.0)
    factor = multiplier_symbol(grid, m) * inverse_laplacian
    factor = np.where(grid.nyquist_mask, 0.0, factor)
    stream = factor * omega.coefficients
    u1 = SpectralField(grid, coefficients=1j * grid.k2 * stream, name="u1")
    u2 = SpectralField(grid, coefficients=-1j * grid.k1 * stream, name="u2")
    if abs(omega.mean) > 0:
        logger.debug(f"Biot-Savart dropped vorticity mean {omega.mean:.6g}")
    return VectorField(u1, u2, name="u")


def partial_derivative(f, axis):
    grid = f.grid
    k = grid.k1 if axis == 0 else grid.k2
    coefficients = np.where(grid.nyquist_mask, 0.0, 1j * k * f.coefficients)
    return SpectralField(grid, coefficients=coefficients, name=f"d{axis + 1} {f.name}")


def gradient(f):
    return VectorField(partial_derivative(f, 0), partial_derivative(f, 1), name=f"grad {f.name}")


def perp_gradient(f):
    """(-d2 f, d1 f)"""
    return VectorField(-partial_derivative(f, 1), partial_derivative(f, 0), name=f"perp grad {f.name}")


def velocity_gradient(u):
    """Array A with A[i, j] = d_j u_i, shape (2, 2, N, N)"""
    rows = []
    for component in u.components:
        grad = gradient(component)
        rows.append([grad.u1.values, grad.u2.values])
    return np.array(rows)


def gradient_sup(u):
    """sup over the grid of the Frobenius norm of grad u"""
    tensor = velocity_gradient(u)
    return float(np.max(np.sqrt(np.sum(tensor ** 2, axis=(0, 1)))))


def dealias(f):
    """Zero every mode with max(|k1|, |k2|) > N/3 (integer indices)"""
    coefficients = np.where(f.grid.dealias_mask, 0.0, f.coefficients)
    return f.with_coefficients(coefficients)


def riesz_symbol(grid, i, j):
    """Symbol k_i k_j / |k|^2 of the Calderon-Zygmund operator d_i d_j Laplacian^-1 (sign dropped)"""
    ki = grid.k1 if i == 1 else grid.k2
    kj = grid.k1 if j == 1 else grid.k2
    with np.errstate(divide="ignore", invalid="ignore"):
        symbol = np.where(grid.kmag_squared > 0, ki * kj / grid.kmag_squared, 0.0)
    return np.where(grid.nyquist_mask, 0.0, symbol)


def interpolate_periodic(f, points, order=3):
    """Values of f at arbitrary physical points by periodic spline interpolation"""
    points = np.asarray(points, dtype=float)
    coords = points / f.grid.dx
    return ndimage.map_coordinates(
        np.asarray(f.values), [coords[..., 0], coords[..., 1]], order=order, mode="grid-wrap"
    )
