import math

import numpy as np
import pytest

from coordproj.core import CoordinateSubset, InputError, RngStream
from coordproj.rotation import (
    coordinate_jl,
    distortion_report,
    haar_orthogonal,
    rotated_psi2_tail,
    scaled_basis,
)


class TestHaarOrthogonal:
    def test_orthogonality(self):
        for n in (1, 2, 5, 32):
            q = haar_orthogonal(n, RngStream(3, n))
            assert np.abs(q.T @ q - np.eye(n)).max() <= 1e-10
            assert abs(abs(np.linalg.det(q)) - 1.0) < 1e-8

    def test_reproducible(self):
        a = haar_orthogonal(6, RngStream(9))
        b = haar_orthogonal(6, RngStream(9))
        assert np.array_equal(a, b)

    def test_rotation_invariance_sample_mean(self):
        # columns of a Haar matrix are exchangeable unit vectors; the mean
        # squared first entry over many draws is 1/n
        n, draws = 4, 400
        acc = 0.0
        for i in range(draws):
            q = haar_orthogonal(n, RngStream(5, i))
            acc += q[0, 0] ** 2
        assert acc / draws == pytest.approx(1.0 / n, abs=0.02)

    def test_rejects_bad_n(self):
        with pytest.raises(InputError):
            haar_orthogonal(0, RngStream(0))


class TestRotatedPsi2:
    def test_identity_operator_recovers_plain_psi(self):
        x = np.zeros(16)
        x[0] = 1.0
        out = rotated_psi2_tail(x, 1, RngStream(0), operators=[np.eye(16)])
        from coordproj.orlicz import psi_norm
        assert out[0] == pytest.approx(4.0 * psi_norm(x, 2.0).value)

    def test_rotation_flattens_a_spike(self):
        # a spike has the worst psi_2 on the sphere; Haar rotation brings it
        # down to the generic level sqrt(2/log n) * sqrt(n) or below
        n = 64
        x = np.zeros(n)
        x[0] = 1.0
        vals = rotated_psi2_tail(x, 20, RngStream(7))
        bound = math.sqrt(2.0 / math.log(n)) * math.sqrt(n)
        assert np.all(vals <= bound)
        spike_level = math.sqrt(n) * math.log(n * (math.e - 1) + 1) ** -0.5
        assert vals.mean() < spike_level

    def test_requires_unit_vector(self):
        with pytest.raises(InputError):
            rotated_psi2_tail(np.ones(8), 2, RngStream(0))


class TestDistortionReport:
    def test_identity_full_subset_is_exact(self):
        rng = np.random.default_rng(13)
        v = rng.standard_normal((5, 12))
        rep = distortion_report(v, np.eye(12), CoordinateSubset.full(12))
        assert np.allclose(rep.per_vector_ratio, 1.0, atol=1e-12)
        assert rep.max_deviation <= 1e-12

    def test_rotation_preserves_full_norm(self):
        rng = np.random.default_rng(17)
        v = rng.standard_normal((3, 10))
        q = haar_orthogonal(10, RngStream(19))
        rep = distortion_report(v, q, CoordinateSubset.full(10))
        assert np.allclose(rep.per_vector_ratio, 1.0, atol=1e-9)

    def test_half_subset_of_duplicated_block_is_exact(self):
        # vector (c, c) restricted to the first half keeps its norm exactly
        c = np.array([1.0, -2.0, 3.0])
        v = np.concatenate([c, c])[None, :]
        rep = distortion_report(v, np.eye(6), CoordinateSubset((1, 2, 3), 6))
        assert rep.per_vector_ratio[0] == pytest.approx(1.0, abs=1e-12)

    def test_empty_subset_gives_zero_ratio(self):
        rep = distortion_report(np.ones((2, 4)), np.eye(4), CoordinateSubset((), 4))
        assert np.all(rep.per_vector_ratio == 0.0)
        assert rep.max_deviation == 1.0


class TestCoordinateJl:
    def test_requires_unit_normalized_rows(self):
        with pytest.raises(InputError):
            coordinate_jl(np.ones((2, 8)) * 3.0, 0.25, RngStream(0))

    def test_scaled_basis_rows_are_unit(self):
        b = scaled_basis(16)
        assert np.allclose(np.mean(b**2, axis=1), 1.0)

    def test_identity_operator_spike_needs_everything(self):
        # an unrotated basis vector concentrates on one coordinate, so the
        # ratio is either 0 or sqrt(n / |sigma|); the experiment degrades
        # gracefully rather than erroring
        b = scaled_basis(8)
        rep = coordinate_jl(b, 0.5, RngStream(3), c_fit=0.6, operator=np.eye(8),
                            force_delta=0.5)
        present = rep.sigma.size
        if 0 < present < 8:
            assert rep.max_deviation >= math.sqrt(8 / present) - 1.0 - 1e-9

    def test_target_formula_and_determinism(self):
        b = scaled_basis(32)
        r1 = coordinate_jl(b, 0.3, RngStream(11), c_fit=0.8)
        r2 = coordinate_jl(b, 0.3, RngStream(11), c_fit=0.8)
        assert np.array_equal(r1.per_vector_ratio, r2.per_vector_ratio)
        assert r1.sigma.indices == r2.sigma.indices
        want = math.ceil((0.8 * r1.psi2_max / 0.3) ** 2 * math.log(32))
        assert r1.target_cardinality == min(32, want)
        assert r1.delta == pytest.approx(r1.target_cardinality / 32)

    def test_no_compression_flag(self):
        b = scaled_basis(8)
        rep = coordinate_jl(b, 0.05, RngStream(5), c_fit=2.0)
        assert rep.target_cardinality == 8
        assert "NO_COMPRESSION" in rep.flags

    def test_distortion_small_at_generous_size(self):
        b = scaled_basis(64)
        hits = 0
        for seed in range(10):
            rep = coordinate_jl(b, 0.3, RngStream(seed), c_fit=1.2)
            if rep.max_deviation <= 0.3:
                hits += 1
        assert hits >= 8

    def test_rejects_bad_eps(self):
        with pytest.raises(InputError):
            coordinate_jl(scaled_basis(8), 1.5, RngStream(0))
