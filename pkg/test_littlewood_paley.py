#!/usr/bin/env python3
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from supercrit.fields import FieldCorpus, gaussian_vortex, single_mode
from supercrit.littlewood_paley import (
    LPPartition, apply_block, besov_norms, build_partition, decompose, field_norms, holder_quotient,
    quasi_lipschitz_modulus, smoothstep, sobolev_norm, sup_block_gradient,
)
from supercrit.spectral import Grid, biot_savart


class TestPartition:
    def test_profile(self, grid64):
        partition = build_partition(grid64)
        np.testing.assert_array_equal(partition.chi(np.array([0.0, 0.5, 0.75, 1.0, 2.0])), [1, 1, 1, 0, 0])
        middle = partition.chi(0.87)
        assert 0.0 < middle < 1.0
        assert partition.phi(1.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("smoothness", [1, 2])
    def test_smoothstep(self, smoothness):
        assert smoothstep(0.0, smoothness) == 0.0
        assert smoothstep(1.0, smoothness) == 1.0
        assert smoothstep(0.5, smoothness) == pytest.approx(0.5)

    def test_bad_smoothness(self):
        with pytest.raises(ValueError):
            smoothstep(0.5, 3)

    def test_block_range(self, grid64):
        partition = build_partition(grid64)
        assert partition.j_max == 3
        assert partition.j_top == 5
        assert partition.indices == [-1, 0, 1, 2, 3, 4, 5]

    def test_grid_too_small(self):
        with pytest.raises(ValueError, match="too small"):
            LPPartition(Grid(16))

    @pytest.mark.parametrize("N", [64, 128])
    @pytest.mark.parametrize("smoothness", [1, 2])
    def test_partition_of_unity(self, N, smoothness):
        partition = LPPartition(Grid(N), smoothness)
        assert partition.partition_residual() < 1e-12
        assert partition.overlap_residual() == 0.0

    def test_partial_symbol_is_block_sum(self, grid64):
        partition = build_partition(grid64)
        for j in partition.indices:
            total = sum(partition.symbols[i] for i in partition.indices if i <= j)
            np.testing.assert_allclose(partition.partial_symbol(j), total, atol=1e-12)


class TestDecomposition:
    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=15, deadline=None)
    def test_blocks_reconstruct(self, seed):
        grid = Grid(64)
        f = FieldCorpus(seed, cutoff=20, slope=1.0).sample(grid, 0)
        decomposition = decompose(f, build_partition(grid))
        np.testing.assert_allclose(decomposition.reconstruct().values, f.values, atol=1e-10 * f.sup_norm())

    def test_partial_sum(self, grid64):
        f = gaussian_vortex(grid64, radius=0.2)
        partition = build_partition(grid64)
        decomposition = decompose(f, partition)
        expected = f.with_coefficients(partition.partial_symbol(1) * f.coefficients)
        np.testing.assert_allclose(decomposition.partial_sum(1).values, expected.values, atol=1e-12)

    def test_single_mode_sits_in_one_block(self, grid64):
        f = single_mode(grid64, (5, 0))
        partition = build_partition(grid64)
        np.testing.assert_allclose(apply_block(f, partition, 2).values, f.values, atol=1e-12)
        assert apply_block(f, partition, 1).sup_norm() < 1e-12

        norms = field_norms(f, partition, 0.5)
        assert norms.y_norm == pytest.approx(2.0)
        assert norms.x_norm == pytest.approx(2.0 * math.pi * math.sqrt(2.0))
        assert norms.cs_proxy == pytest.approx(norms.y_norm + norms.l2_norm)
        assert norms.to_dict()["jMax"] == 3

    def test_besov_exponent_checked(self, grid64):
        f = single_mode(grid64, (1, 0))
        with pytest.raises(ValueError):
            besov_norms(decompose(f, build_partition(grid64)), 0.0)

    @pytest.mark.parametrize("c", [-3.5, 0.25, 7.0])
    def test_norms_are_homogeneous(self, grid64, c):
        f = FieldCorpus(11, cutoff=16, slope=1.5).sample(grid64, 0)
        partition = build_partition(grid64)
        base = field_norms(f, partition, 0.5)
        scaled = field_norms(f * c, partition, 0.5)
        assert scaled.x_norm == pytest.approx(abs(c) * base.x_norm, rel=1e-12)
        assert scaled.y_norm == pytest.approx(abs(c) * base.y_norm, rel=1e-12)
        assert scaled.l2_norm == pytest.approx(abs(c) * base.l2_norm, rel=1e-12)
        assert scaled.cs_proxy == pytest.approx(abs(c) * base.cs_proxy, rel=1e-12)

    def test_norms_grow_with_exponent(self, grid64):
        f = gaussian_vortex(grid64, radius=0.15)
        partition = build_partition(grid64)
        assert field_norms(f, partition, 0.9).y_norm > field_norms(f, partition, 0.3).y_norm


class TestHolderProxies:
    def test_sobolev_single_mode(self, grid64):
        f = single_mode(grid64, (5, 0))
        assert sobolev_norm(f, 1.0) == pytest.approx(math.sqrt(26.0) * f.l2_norm(), rel=1e-12)

    def test_lipschitz_quotient(self, grid64):
        f = single_mode(grid64, (1, 0))
        quotient = holder_quotient(f, 1.0)
        assert 0.99 <= quotient <= 1.0

    def test_norm_equivalence_over_corpus(self, grid64):
        corpus = FieldCorpus(seed=21, count=100, cutoff=20, slope=1.5, cutoff_min=2)
        partition = build_partition(grid64)
        fields = [corpus.sample(grid64, i) for i in range(corpus.count)]

        sobolev = np.array([field_norms(f, partition, 0.5).x_norm / sobolev_norm(f, 0.5) for f in fields])
        assert sobolev.max() / sobolev.min() <= 4.0

        for s in (0.25, 0.5, 0.75):
            holder = np.array([field_norms(f, partition, s).y_norm / holder_quotient(f, s) for f in fields])
            assert holder.max() / holder.min() <= 10.0

    def test_block_gradient_table(self, grid64, loglog):
        omega = gaussian_vortex(grid64, radius=0.3)
        u = biot_savart(omega, loglog)
        partition = build_partition(grid64)
        table = sup_block_gradient(u, partition, loglog)
        assert [row["j"] for row in table] == partition.indices
        sups = [row["sup"] for row in table]
        assert all(row["ratio"] == pytest.approx(row["sup"] / row["m"]) for row in table)
        assert sups[-1] == pytest.approx(max(sups), rel=0.05)

    def test_quasi_lipschitz_modulus(self, grid64, loglog):
        u = biot_savart(gaussian_vortex(grid64, radius=0.3), loglog)
        value = quasi_lipschitz_modulus(u, loglog)
        assert 0.0 < value < math.inf


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
