"""
Littlewood-Paley analysis on the torus.

The low-frequency profile chi is a polynomial smoothstep in Log2|xi| that equals
1 for |xi| <= 3/4 and 0 for |xi| >= 1; the annulus profile is
phi(xi) = chi(xi/2) - chi(xi), so chi + sum_j phi(2^-j xi) telescopes to 1.
Blocks are indexed j = -1 (chi) and 0..j_top, where j_top is the first index
at which the partition covers every grid wavenumber.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from supercrit.logging_config import loggers
from supercrit.spectral import SpectralField, gradient

logger = loggers['lp']

INNER_RADIUS = 0.75


def smoothstep(t, smoothness=2):
    """Polynomial step from 0 to 1 on [0, 1] with C^smoothness joins"""
    t = np.clip(t, 0.0, 1.0)
    if smoothness == 1:
        return t * t * (3.0 - 2.0 * t)
    if smoothness == 2:
        return t ** 3 * (t * (6.0 * t - 15.0) + 10.0)
    raise ValueError(f"transition smoothness must be 1 or 2, got {smoothness}")


@dataclass(frozen=True)
class LPPartition:
    grid: object
    smoothness: int = 2
    j_max: int = field(init=False)
    j_top: int = field(init=False)

    def __post_init__(self):
        cut = (self.grid.N / 3.0) * self.grid.scale
        j_max = -1
        while 2.0 ** (j_max + 2) <= cut:
            j_max += 1
        if j_max < 2:
            raise ValueError(f"grid too small for a Littlewood-Paley partition (jMax={j_max})")
        j_top = 0
        while INNER_RADIUS * 2.0 ** (j_top + 1) < self.grid.max_kmag:
            j_top += 1
        object.__setattr__(self, "j_max", j_max)
        object.__setattr__(self, "j_top", j_top)

    @property
    def indices(self):
        return list(range(-1, self.j_top + 1))

    def chi(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            log_r = np.log2(np.maximum(r, 1e-300))
        t = (log_r - math.log2(INNER_RADIUS)) / (-math.log2(INNER_RADIUS))
        return 1.0 - smoothstep(t, self.smoothness)

    def phi(self, r):
        r = np.asarray(r, dtype=float)
        return self.chi(r / 2.0) - self.chi(r)

    def block_symbol(self, j):
        kmag = self.grid.kmag
        if j == -1:
            return self.chi(kmag)
        return self.phi(kmag / 2.0 ** j)

    @cached_property
    def symbols(self):
        return {j: self.block_symbol(j) for j in self.indices}

    def partial_symbol(self, j):
        """Symbol of S_j = sum of blocks -1..j, equal to chi(2^-(j+1) xi)"""
        return self.chi(self.grid.kmag / 2.0 ** (j + 1))

    def partition_residual(self):
        """max |1 - chi - sum_j phi(2^-j k)| over all grid wavenumbers"""
        total = np.zeros(self.grid.spectral_shape)
        for j in self.indices:
            total = total + self.symbols[j]
        return float(np.max(np.abs(1.0 - total)))

    def overlap_residual(self):
        """max |phi_j phi_k| over |j - k| > 1; zero for disjoint supports"""
        worst = 0.0
        for j in self.indices:
            for k in self.indices:
                if k - j > 1:
                    worst = max(worst, float(np.max(np.abs(self.symbols[j] * self.symbols[k]))))
        return worst


def build_partition(grid, smoothness=2):
    partition = LPPartition(grid, smoothness)
    logger.info(
        f"Built LP partition for N={grid.N}: jMax={partition.j_max}, "
        f"jTop={partition.j_top}, smoothness=C{smoothness}"
    )
    return partition


@dataclass(frozen=True)
class LPDecomposition:
    partition: LPPartition
    source: SpectralField
    blocks: dict

    def block(self, j):
        return self.blocks[j]

    def reconstruct(self):
        coefficients = sum(self.blocks[j].coefficients for j in self.partition.indices)
        return self.source.with_coefficients(coefficients, name=f"sum blocks {self.source.name}")

    def partial_sum(self, j):
        coefficients = sum(self.blocks[i].coefficients for i in self.partition.indices if i <= j)
        return self.source.with_coefficients(coefficients, name=f"S_{j} {self.source.name}")


def apply_block(f, partition, j):
    return f.with_coefficients(partition.symbols[j] * f.coefficients, name=f"Delta_{j} {f.name}")


def decompose(f, partition):
    blocks = {j: apply_block(f, partition, j) for j in partition.indices}
    return LPDecomposition(partition, f, blocks)


@dataclass
class BesovNorms:
    s: float
    x_norm: float
    y_norm: float
    l2_norm: float
    j_max: int
    per_block: list

    @property
    def cs_proxy(self):
        """C^s intersect L^2 proxy: Y-norm plus L^2 norm"""
        return self.y_norm + self.l2_norm

    def to_dict(self):
        return {
            "s": self.s,
            "xNorm": self.x_norm,
            "yNorm": self.y_norm,
            "l2Norm": self.l2_norm,
            "csProxy": self.cs_proxy,
            "jMax": self.j_max,
            "perBlock": self.per_block,
        }


def besov_norms(decomposition, s):
    """X (B^s_{2,2}) and Y (B^s_{inf,inf}) norms of a decomposed field"""
    if not 0 < s <= 4:
        raise ValueError(f"Besov exponent must lie in (0, 4], got {s}")
    rows = []
    x_squared = 0.0
    y_norm = 0.0
    for j in decomposition.partition.indices:
        block = decomposition.block(j)
        weight = 2.0 ** (j * s)
        l2 = block.l2_norm()
        sup = block.sup_norm()
        x_squared += (weight * l2) ** 2
        y_norm = max(y_norm, weight * sup)
        rows.append({"j": j, "l2": l2, "sup": sup, "weighted_l2": weight * l2, "weighted_sup": weight * sup})
    return BesovNorms(
        s=s,
        x_norm=math.sqrt(x_squared),
        y_norm=y_norm,
        l2_norm=decomposition.source.l2_norm(),
        j_max=decomposition.partition.j_max,
        per_block=rows,
    )


def field_norms(f, partition, s):
    return besov_norms(decompose(f, partition), s)


def sobolev_norm(f, s):
    """(sum (1+|k|^2)^s |f(k)|^2)^(1/2) with physical normalization"""
    grid = f.grid
    weights = grid.spectral_weights() * (1.0 + grid.kmag_squared) ** s
    energy = np.sum(weights * np.abs(f.coefficients) ** 2)
    return float(np.sqrt(energy * grid.cell_area) / grid.N)


def dyadic_shifts(grid):
    """Grid offsets along the axes and diagonals with lengths 1, 2, 4, ... cells"""
    shifts = []
    size = 1
    while size <= grid.N // 4:
        shifts.extend([(size, 0), (0, size), (size, size), (size, -size)])
        size *= 2
    return shifts


def holder_quotient(f, s):
    """sup over dyadic grid shifts h of |f(x+h) - f(x)| / |h|^s"""
    values = np.asarray(f.values)
    dx = f.grid.dx
    best = 0.0
    for a, b in dyadic_shifts(f.grid):
        shifted = np.roll(values, shift=(-a, -b), axis=(0, 1))
        length = math.hypot(a, b) * dx
        best = max(best, float(np.max(np.abs(shifted - values))) / length ** s)
    return best


def sup_block_gradient(u, partition, m):
    """Per-block table of ||S_j grad u||_inf / m(2^j)"""
    components = [gradient(c) for c in u.components]
    table = []
    for j in partition.indices:
        symbol = partition.partial_symbol(j)
        squared = np.zeros((partition.grid.N, partition.grid.N))
        for grad in components:
            for part in grad.components:
                squared += np.asarray(part.with_coefficients(symbol * part.coefficients).values) ** 2
        sup = float(np.sqrt(np.max(squared)))
        scale = m.eval(2.0 ** j)
        table.append({"j": j, "sup": sup, "m": scale, "ratio": sup / scale})
    return table


def quasi_lipschitz_modulus(u, m):
    """sup over dyadic grid shifts of |u(x) - u(y)| / (|x - y| (1 + m(1/|x - y|)))"""
    dx = u.grid.dx
    best = 0.0
    for a, b in dyadic_shifts(u.grid):
        squared = np.zeros((u.grid.N, u.grid.N))
        for component in u.components:
            values = np.asarray(component.values)
            squared += (np.roll(values, shift=(-a, -b), axis=(0, 1)) - values) ** 2
        length = math.hypot(a, b) * dx
        best = max(best, float(np.sqrt(np.max(squared))) / (length * (1.0 + m.eval(1.0 / length))))
    return best

