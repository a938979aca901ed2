"""Initial data builders and the seeded band-limited field corpus"""

import math
from dataclasses import dataclass

import numpy as np

from supercrit.logging_config import loggers
from supercrit.spectral import SpectralField

logger = loggers['spectral']


def single_mode(grid, k=(1, 0), amplitude=1.0, name="omega"):
    """amplitude * cos(k . x)"""
    scale = grid.scale
    return SpectralField.from_function(
        grid, lambda x1, x2: amplitude * np.cos(scale * (k[0] * x1 + k[1] * x2)), name=name
    )


def periodic_offsets(grid, center):
    """Componentwise periodic displacement x - center folded into [-L/2, L/2)"""
    x1, x2 = grid.coordinates
    half = grid.L / 2.0
    d1 = (x1 - center[0] + half) % grid.L - half
    d2 = (x2 - center[1] + half) % grid.L - half
    return d1, d2


def gaussian_vortex(grid, center=None, radius=0.12, amplitude=1.0, name="omega"):
    """Radial bump amplitude * exp(-|x - center|^2 / (2 radius^2))"""
    center = center if center is not None else (grid.L / 2.0, grid.L / 2.0)
    d1, d2 = periodic_offsets(grid, center)
    values = amplitude * np.exp(-(d1 ** 2 + d2 ** 2) / (2.0 * radius ** 2))
    return SpectralField(grid, values=values, name=name)


def vortex_pair(grid, separation=1.0, radius=0.3, amplitude=1.0, name="omega"):
    """Two co-rotating Gaussian vortices placed symmetrically about the domain center"""
    c = grid.L / 2.0
    left = gaussian_vortex(grid, (c - separation / 2.0, c), radius, amplitude)
    right = gaussian_vortex(grid, (c + separation / 2.0, c), radius, amplitude)
    return (left + right).renamed(name)


@dataclass(frozen=True)
class FieldCorpus:
    """
    Random real fields with coefficients drawn on a fixed integer wavenumber
    box |n| <= cutoff, so the same seed gives the same trigonometric polynomial
    on every grid with N/3 > cutoff. Sample i uses seed + i.

    With cutoff_min set, each sample first draws its own band limit
    log-uniformly in [cutoff_min, cutoff] and zeroes the modes above it, so a
    sweep spreads over a range of frequency scales.
    """

    seed: int
    count: int = 100
    cutoff: int = 16
    slope: float = 2.0
    cutoff_min: int = None

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError(f"corpus cutoff must be >= 1, got {self.cutoff}")
        if self.count < 1:
            raise ValueError(f"corpus count must be >= 1, got {self.count}")
        if self.cutoff_min is not None and not 1 <= self.cutoff_min <= self.cutoff:
            raise ValueError(f"corpus cutoff_min must lie in [1, {self.cutoff}], got {self.cutoff_min}")

    def band_limit(self, rng):
        if self.cutoff_min is None:
            return float(self.cutoff)
        return float(np.exp(rng.uniform(math.log(self.cutoff_min), math.log(self.cutoff))))

    def coefficients(self, index):
        rng = np.random.default_rng(self.seed + index)
        limit = self.band_limit(rng)
        K = self.cutoff
        n1 = np.arange(-K, K + 1)[:, None]
        n2 = np.arange(0, K + 1)[None, :]
        draws = rng.standard_normal((2 * K + 1, K + 1)) + 1j * rng.standard_normal((2 * K + 1, K + 1))
        radius = np.sqrt(n1 ** 2 + n2 ** 2)
        envelope = (1.0 + radius ** 2) ** (-self.slope / 2.0)
        return np.where((radius <= limit) & (radius > 0), draws * envelope, 0.0)

    def sample(self, grid, index, name=None):
        if 3 * self.cutoff >= grid.N:
            raise ValueError(f"corpus cutoff {self.cutoff} is not below N/3 for N={grid.N}")
        K = self.cutoff
        coefficients = np.zeros(grid.spectral_shape, dtype=complex)
        rows = np.arange(-K, K + 1) % grid.N
        coefficients[rows, :K + 1] = self.coefficients(index) * grid.N ** 2
        # the k2 = 0 column is not Hermitian as drawn; the round trip keeps its real part
        values = np.fft.irfft2(coefficients, s=(grid.N, grid.N), axes=(0, 1))
        return SpectralField(grid, values=values, name=name or f"sample{index}")

    def fields(self, grid):
        for index in range(self.count):
            yield self.seed + index, self.sample(grid, index)


def random_field(grid, seed, cutoff=8, slope=3.0, amplitude=1.0, name="omega"):
    """Smooth random field normalized to sup norm = amplitude"""
    field = FieldCorpus(seed, 1, cutoff, slope).sample(grid, 0, name=name)
    return field * (amplitude / field.sup_norm())


def circle_level_set(grid, radius, center=None, width=None):
    return ellipse_level_set(grid, radius, radius, 0.0, center, width)


def ellipse_level_set(grid, semi_a, semi_b, angle=0.0, center=None, width=None):
    """
    phi = width * tanh(b (1 - q) / (2 width)) with q the ellipse quadratic form,
    positive inside; |grad phi| is about 1 on the boundary along the minor axis
    and the tanh keeps phi smooth and periodic far from the patch.
    """
    center = center if center is not None else (grid.L / 2.0, grid.L / 2.0)
    width = width if width is not None else 12.0 * grid.dx
    d1, d2 = periodic_offsets(grid, center)
    c, s = math.cos(angle), math.sin(angle)
    p1 = c * d1 + s * d2
    p2 = -s * d1 + c * d2
    q = (p1 / semi_a) ** 2 + (p2 / semi_b) ** 2
    values = width * np.tanh(min(semi_a, semi_b) * (1.0 - q) / (2.0 * width))
    return SpectralField(grid, values=values, name="phi")


def straight_edge_level_set(grid, offset=None):
    """phi = sin(x1 - offset): a flat edge at x1 = offset with |grad phi| = 1 there"""
    offset = offset if offset is not None else grid.L / 4.0
    scale = grid.scale
    return SpectralField.from_function(
        grid, lambda x1, x2: np.sin(scale * (x1 - offset)) / scale, name="phi"
    )
