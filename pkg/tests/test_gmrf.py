import numpy as np
import pytest

from texclass.gmrf import (
    DegenerateSegmentError,
    GmrfParams,
    UnstableParamsError,
    estimate_gmrf,
    gmrf_features,
    neighbor_sums,
    synthesize_gmrf,
    synthesize_gmrf_field,
)

EXAMPLE_ALPHA = np.array([0.2, 0.2, -0.05, -0.05, 0.05, 0.05])


def lag_autocorr(img, axis):
    x = img.astype(float) - img.mean()
    if axis == 0:
        prod = x[:-1, :] * x[1:, :]
    else:
        prod = x[:, :-1] * x[:, 1:]
    return prod.mean() / (x * x).mean()


class TestNeighborSums:
    def test_constant(self):
        seg = np.full((8, 8), 13, dtype=np.uint8)
        s = neighbor_sums(seg, 4, 4)
        assert np.allclose(s, 26.0)

    def test_vertical_ramp(self):
        seg = np.fromfunction(lambda i, j: i, (10, 10))
        for i, j in ((3, 4), (5, 2), (7, 7)):
            assert np.allclose(neighbor_sums(seg, i, j), 2 * i)

    def test_single_bright_pixel(self):
        seg = np.zeros((9, 9))
        seg[3, 4] = 200.0  # at (i-1, j) for center (4, 4)
        s = neighbor_sums(seg, 4, 4)
        assert s[0] == 200.0  # vertical distance-1 pair
        assert s[1] == 0.0
        assert s[2] == 0.0
        assert s[3] == 0.0
        assert s[4] == 0.0
        assert s[5] == 0.0

    def test_non_interior_rejected(self):
        seg = np.zeros((8, 8))
        for i, j in ((0, 4), (1, 4), (4, 1), (6, 4), (4, 6), (7, 7)):
            with pytest.raises(ValueError):
                neighbor_sums(seg, i, j)


class TestEstimate:
    def test_constant_segment_singular(self):
        with pytest.raises(DegenerateSegmentError):
            estimate_gmrf(np.full((32, 32), 77, dtype=np.uint8))

    def test_roundtrip_within_tolerance(self):
        params = GmrfParams(EXAMPLE_ALPHA, 1.0)
        img = synthesize_gmrf(params, 64, seed=42)
        est = estimate_gmrf(img)
        assert np.all(np.abs(est.alpha - EXAMPLE_ALPHA) < 0.1)

    def test_white_noise_alpha_band(self):
        # band of +-0.15 confirmed by a 120-seed Monte-Carlo sweep
        for seed in range(100):
            seg = np.random.default_rng(seed).integers(0, 256, (32, 32)).astype(np.uint8)
            est = estimate_gmrf(seg)
            assert np.all(np.abs(est.alpha) < 0.15)

    def test_sigma2_nonnegative(self, rng):
        for _ in range(20):
            seg = rng.integers(0, 256, (16, 16)).astype(np.uint8)
            assert estimate_gmrf(seg).sigma2 >= 0.0

    def test_denominator_toggle_ratio(self, rng):
        seg = rng.integers(0, 256, (32, 32)).astype(np.uint8)
        printed = estimate_gmrf(seg, interior_denominator=False)
        interior = estimate_gmrf(seg, interior_denominator=True)
        ratio = printed.sigma2 / interior.sigma2
        assert ratio == pytest.approx((32 - 4) ** 2 / (32 - 2) ** 2)

    def test_gray_shift_invariance(self, rng):
        seg = rng.integers(0, 200, (32, 32)).astype(float)
        base = gmrf_features(seg)
        shifted = gmrf_features(seg + 40.0)
        assert np.allclose(base, shifted, atol=1e-9)

    def test_transpose_equivariance(self, rng):
        # transpose swaps the two axis pair sums at each distance and fixes
        # the diagonals, so alpha1<->alpha2, alpha3<->alpha4, rest unchanged
        seg = rng.integers(0, 256, (32, 32)).astype(np.uint8)
        a = estimate_gmrf(seg)
        b = estimate_gmrf(seg.T)
        assert b.alpha[0] == pytest.approx(a.alpha[1], abs=1e-9)
        assert b.alpha[1] == pytest.approx(a.alpha[0], abs=1e-9)
        assert b.alpha[2] == pytest.approx(a.alpha[3], abs=1e-9)
        assert b.alpha[3] == pytest.approx(a.alpha[2], abs=1e-9)
        assert b.alpha[4] == pytest.approx(a.alpha[4], abs=1e-9)
        assert b.alpha[5] == pytest.approx(a.alpha[5], abs=1e-9)
        assert b.sigma2 == pytest.approx(a.sigma2, rel=1e-9)

    def test_consistency_error_shrinks_with_size(self):
        params = GmrfParams(EXAMPLE_ALPHA, 4.0)
        mae = {}
        for size in (64, 128):
            errs = []
            for seed in range(20):
                est = estimate_gmrf(synthesize_gmrf(params, size, seed))
                errs.append(np.mean(np.abs(est.alpha - params.alpha)))
            mae[size] = np.mean(errs)
        assert mae[128] < mae[64]


class TestSynthesize:
    def test_deterministic(self):
        params = GmrfParams(EXAMPLE_ALPHA, 1.0)
        a = synthesize_gmrf(params, 32, seed=5)
        b = synthesize_gmrf(params, 32, seed=5)
        assert np.array_equal(a, b)

    def test_white_noise_when_alpha_zero(self):
        # +-0.05 band confirmed by Monte-Carlo before freezing
        params = GmrfParams(np.zeros(6), 1.0)
        for seed in (3, 4, 5):
            img = synthesize_gmrf(params, 64, seed)
            assert abs(lag_autocorr(img, 0)) < 0.05
            assert abs(lag_autocorr(img, 1)) < 0.05

    def test_horizontal_alpha_favors_horizontal_correlation(self):
        # alpha2 couples (i, j-1)/(i, j+1): same-row neighbors
        params = GmrfParams(np.array([0.0, 0.35, 0.0, 0.0, 0.0, 0.0]), 1.0)
        img = synthesize_gmrf(params, 64, seed=9)
        horizontal = lag_autocorr(img, 1)
        vertical = lag_autocorr(img, 0)
        assert horizontal > vertical + 0.2

    def test_unstable_params_rejected(self):
        with pytest.raises(UnstableParamsError):
            synthesize_gmrf(GmrfParams(np.array([0.3, 0.3, 0.0, 0.0, 0.0, 0.0]), 1.0), 32, 0)

    def test_gray_range(self):
        img = synthesize_gmrf(GmrfParams(EXAMPLE_ALPHA, 100.0), 64, seed=2)
        assert img.dtype == np.uint8
        assert img.min() >= 0 and img.max() <= 255

    def test_field_zero_sigma(self):
        field = synthesize_gmrf_field(GmrfParams(EXAMPLE_ALPHA, 0.0), 16, seed=1)
        assert not field.any()

    def test_sequential_path_matches_model(self):
        # sizes not divisible by 4 go through the per-pixel sampler
        params = GmrfParams(np.array([0.0, 0.3, 0.0, 0.0, 0.0, 0.0]), 1.0)
        img = synthesize_gmrf(params, 30, seed=1, iterations=2)
        assert img.shape == (30, 30)
        assert lag_autocorr(img, 1) > lag_autocorr(img, 0)


class TestFeatures:
    def test_length_and_order(self, rng):
        seg = rng.integers(0, 256, (32, 32)).astype(np.uint8)
        feats = gmrf_features(seg)
        est = estimate_gmrf(seg)
        assert feats.shape == (7,)
        assert np.array_equal(feats[:6], est.alpha)
        assert feats[6] == est.sigma2

    def test_degenerate_flag(self):
        seg = np.full((32, 32), 50, dtype=np.uint8)
        assert np.array_equal(gmrf_features(seg, on_degenerate="zeros"), np.zeros(7))
        with pytest.raises(DegenerateSegmentError):
            gmrf_features(seg, on_degenerate="raise")

    def test_synthesized_features_near_parameters(self):
        params = GmrfParams(EXAMPLE_ALPHA, 4.0)
        feats = gmrf_features(synthesize_gmrf(params, 64, seed=17))
        assert np.all(np.abs(feats[:6] - EXAMPLE_ALPHA) < 0.1)
        assert abs(feats[6] - 4.0) / 4.0 < 0.25
