"""Pixelwise fractal-dimension estimation via fractional Brownian motion.

For each pixel, the mean absolute gray difference is collected per integer
distance bin over a clipped square window, a log-log line is fitted to get
the Hurst slope H, and the fractal dimension is 3 - H (clamped so FD stays
in [2, 3]).  Five first-order statistics of the resulting FD image form the
feature vector.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FlatCurveError",
    "DegenerateFeatureWarning",
    "FbmConfig",
    "FEATURE_NAMES",
    "mean_abs_diff_curve",
    "hurst_fit",
    "fd_image",
    "hurst_image",
    "fd_statistics",
    "fbm_features",
    "synthesize_fbm",
    "fd_image_gray",
]

FEATURE_NAMES = ("mean", "variance", "lacunarity", "skewness", "kurtosis")

# Half a gray level: stands in for zero bins in the log-domain fit.
_LOG_EPS = 1.0 / 512.0


class FlatCurveError(ValueError):
    """All difference bins are zero, so the Hurst slope is undefined."""


class DegenerateFeatureWarning(UserWarning):
    """A feature had to fall back to a designated degenerate value."""


@dataclass(frozen=True)
class FbmConfig:
    """Window radius and distance binning for the per-pixel difference curve.

    Distances are collected into integer bins 1..max_distance, bin d holding
    pair distances in (d - 0.5, d + 0.5].  ``distance_bins`` defaults to
    ``max_distance`` (one bin per integer distance).
    """

    window_radius: int = 8
    max_distance: int = 4
    distance_bins: int | None = None

    def __post_init__(self):
        if not 1 <= self.max_distance <= self.window_radius:
            raise ValueError(
                f"max_distance must be in [1, window_radius], got {self.max_distance}"
            )
        bins = self.max_distance if self.distance_bins is None else self.distance_bins
        if bins < 2:
            raise ValueError(f"need at least 2 distance bins, got {bins}")
        object.__setattr__(self, "distance_bins", bins)


def _pair_offsets(max_distance: int) -> list[tuple[int, int, int]]:
    """Half-plane pixel offsets (di, dj, bin) covering each pair once."""
    lim = int(math.floor(max_distance + 0.5))
    offsets = []
    for di in range(0, lim + 1):
        for dj in range(-lim, lim + 1):
            if di == 0 and dj <= 0:
                continue
            dist = math.hypot(di, dj)
            b = int(math.ceil(dist - 0.5))
            if 1 <= b <= max_distance:
                offsets.append((di, dj, b))
    return offsets


def mean_abs_diff_curve(
    pixels: np.ndarray, center: tuple[int, int], cfg: FbmConfig
) -> list[tuple[float, float]]:
    """Mean absolute gray difference per distance bin around one pixel.

    Pairs are taken inside the square window of ``cfg.window_radius`` around
    ``center``, clipped at the segment borders, and pooled into integer
    bins (bin d holds pair distances in (d - 0.5, d + 0.5]).  Each curve
    point carries the bin's mean pair distance as its abscissa, so the
    log-log fit sees actual distances rather than bin labels.  Bins with no
    pairs are omitted; at least two non-empty bins are required.
    """
    x = np.asarray(pixels, dtype=float)
    h, w = x.shape
    ci, cj = center
    r = cfg.window_radius
    lo_i, hi_i = max(0, ci - r), min(h - 1, ci + r)
    lo_j, hi_j = max(0, cj - r), min(w - 1, cj + r)
    sums = np.zeros(cfg.max_distance)
    dist_sums = np.zeros(cfg.max_distance)
    counts = np.zeros(cfg.max_distance, dtype=np.int64)
    for di, dj, b in _pair_offsets(cfg.max_distance):
        a_i, b_i = lo_i + max(0, -di), hi_i - max(0, di)
        a_j, b_j = lo_j + max(0, -dj), hi_j - max(0, dj)
        if a_i > b_i or a_j > b_j:
            continue
        first = x[a_i : b_i + 1, a_j : b_j + 1]
        second = x[a_i + di : b_i + di + 1, a_j + dj : b_j + dj + 1]
        diff = np.abs(first - second)
        sums[b - 1] += diff.sum()
        dist_sums[b - 1] += math.hypot(di, dj) * diff.size
        counts[b - 1] += diff.size
    curve = [
        (dist_sums[d] / counts[d], sums[d] / counts[d])
        for d in range(cfg.max_distance)
        if counts[d] > 0
    ]
    if len(curve) < 2:
        raise ValueError(f"fewer than 2 non-empty distance bins at {center}")
    return curve


def hurst_fit(curve: list[tuple[float, float]]) -> tuple[float, float]:
    """Ordinary least squares of log E on log distance: returns (H, K).

    Zero bins are replaced by half a gray level before the log fit as long
    as at least one bin is positive; an all-zero curve has no defined slope
    and raises :class:`FlatCurveError`.
    """
    if len(curve) < 2:
        raise ValueError("need at least 2 curve points")
    dr = np.array([p[0] for p in curve], dtype=float)
    e = np.array([p[1] for p in curve], dtype=float)
    if np.all(e <= 0):
        raise FlatCurveError("all-zero difference curve: H undefined")
    e = np.where(e <= 0, _LOG_EPS, e)
    lx = np.log(dr)
    ly = np.log(e)
    lx_bar = lx.mean()
    slope = float((lx - lx_bar) @ ly / ((lx - lx_bar) @ lx))
    intercept = float(ly.mean() - slope * lx_bar)
    return slope, math.exp(intercept)


def _bin_sums_counts(
    x: np.ndarray, cfg: FbmConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-pixel pair sums, counts, and distance sums for every bin.

    Returns arrays of shape (max_distance, H, W).  For each pair offset an
    absolute-difference image is reduced with a summed-area table, so every
    pixel's clipped window is aggregated in O(1).
    """
    h, w = x.shape
    r = cfg.window_radius
    nbins = cfg.max_distance
    sums = np.zeros((nbins, h, w))
    dist_sums = np.zeros((nbins, h, w))
    counts = np.zeros((nbins, h, w), dtype=np.int64)
    i_idx = np.arange(h)[:, None]
    j_idx = np.arange(w)[None, :]
    lo_wi, hi_wi = np.maximum(0, i_idx - r), np.minimum(h - 1, i_idx + r)
    lo_wj, hi_wj = np.maximum(0, j_idx - r), np.minimum(w - 1, j_idx + r)
    for di, dj, b in _pair_offsets(cfg.max_distance):
        p0_i, p1_i = max(0, -di), h - 1 - max(0, di)
        p0_j, p1_j = max(0, -dj), w - 1 - max(0, dj)
        if p0_i > p1_i or p0_j > p1_j:
            continue
        diff = np.zeros((h, w))
        diff[p0_i : p1_i + 1, p0_j : p1_j + 1] = np.abs(
            x[p0_i : p1_i + 1, p0_j : p1_j + 1]
            - x[p0_i + di : p1_i + di + 1, p0_j + dj : p1_j + dj + 1]
        )
        table = np.zeros((h + 1, w + 1))
        np.cumsum(np.cumsum(diff, axis=0), axis=1, out=table[1:, 1:])
        # A pair indexed by its first endpoint lies fully inside the window
        # when the first endpoint is in this sub-rectangle.
        a_i = lo_wi + max(0, -di)
        b_i = hi_wi - max(0, di)
        a_j = lo_wj + max(0, -dj)
        b_j = hi_wj - max(0, dj)
        n_pairs = np.maximum(0, b_i - a_i + 1) * np.maximum(0, b_j - a_j + 1)
        b_i = np.maximum(b_i, a_i - 1)
        b_j = np.maximum(b_j, a_j - 1)
        rect = (
            table[b_i + 1, b_j + 1]
            - table[a_i, b_j + 1]
            - table[b_i + 1, a_j]
            + table[a_i, a_j]
        )
        sums[b - 1] += rect
        dist_sums[b - 1] += math.hypot(di, dj) * n_pairs
        counts[b - 1] += n_pairs
    return sums, counts, dist_sums


def hurst_image(pixels: np.ndarray, cfg: FbmConfig | None = None) -> np.ndarray:
    """Raw per-pixel Hurst slope, unclamped; NaN where the window is flat."""
    cfg = cfg or FbmConfig()
    x = np.asarray(pixels, dtype=float)
    sums, counts, dist_sums = _bin_sums_counts(x, cfg)
    valid = counts > 0
    safe = np.maximum(counts, 1)
    e = np.where(valid, sums / safe, np.nan)
    flat = np.all((e <= 0) | ~valid, axis=0)
    e = np.where(valid & (e <= 0), _LOG_EPS, e)
    mean_dist = np.where(valid, dist_sums / safe, 1.0)
    lx = np.where(valid, np.log(mean_dist), 0.0)
    ly = np.where(valid, np.log(np.where(valid, e, 1.0)), 0.0)
    n = valid.sum(axis=0)
    sx = lx.sum(axis=0)
    sy = ly.sum(axis=0)
    sxx = (lx * lx).sum(axis=0)
    sxy = (lx * ly).sum(axis=0)
    denom = n * sxx - sx * sx
    with np.errstate(invalid="ignore", divide="ignore"):
        slope = (n * sxy - sx * sy) / denom
    slope[flat | (n < 2) | (denom == 0)] = np.nan
    return slope


def fd_image(pixels: np.ndarray, cfg: FbmConfig | None = None) -> np.ndarray:
    """Per-pixel fractal dimension image, FD = 3 - H with H clamped to [0, 1].

    Flat windows (no gray variation at any distance) map to FD = 2: a flat
    surface is a plane.
    """
    cfg = cfg or FbmConfig()
    x = np.asarray(pixels, dtype=float)
    if min(x.shape) < 2:
        raise ValueError(f"segment too small for windowed estimation: {x.shape}")
    h = hurst_image(x, cfg)
    fd = 3.0 - np.clip(h, 0.0, 1.0)
    return np.where(np.isnan(h), 2.0, fd)


def fd_statistics(fd_values: np.ndarray) -> np.ndarray:
    """Population moments of the FD values: mean, variance, lacunarity,
    skewness, kurtosis (non-excess).

    A zero-variance population has undefined standardized moments; both are
    reported as 0 with a :class:`DegenerateFeatureWarning`.
    """
    v = np.asarray(fd_values, dtype=float).ravel()
    mean = v.mean()
    var = v.var()
    if var == 0.0:
        warnings.warn(
            "constant FD image: skewness and kurtosis set to 0",
            DegenerateFeatureWarning,
            stacklevel=2,
        )
        return np.array([mean, 0.0, 0.0, 0.0, 0.0])
    centered = v - mean
    skew = (centered**3).mean() / var**1.5
    kurt = (centered**4).mean() / var**2
    return np.array([mean, var, var / mean, skew, kurt])


def fbm_features(pixels: np.ndarray, cfg: FbmConfig | None = None) -> np.ndarray:
    """5-value feature vector: first-order statistics of the FD image."""
    return fd_statistics(fd_image(pixels, cfg))


def synthesize_fbm(hurst: float, size: int, seed: int, oversample: int = 4) -> np.ndarray:
    """Spectral-synthesis fractional Brownian surface with the given Hurst.

    Power spectral density proportional to f^-(2H+2), synthesized on an
    ``oversample``-times finer grid and decimated, which reproduces the
    small-lag scaling of a sampled continuous surface much better than
    synthesis at the target size directly.  Returns a float field
    normalized to zero mean and unit variance.  Independent of the
    difference-curve machinery, so it serves as a ground-truth oracle.
    """
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must be in (0, 1), got {hurst}")
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    rng = np.random.default_rng(seed)
    n = size * oversample
    f_i = np.fft.fftfreq(n)[:, None]
    f_j = np.fft.fftfreq(n)[None, :]
    freq = np.hypot(f_i, f_j)
    freq[0, 0] = np.inf  # zero out the DC component
    amplitude = freq ** (-(hurst + 1.0))
    phase = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    field = np.fft.ifft2(amplitude * phase).real[::oversample, ::oversample]
    field -= field.mean()
    return field / field.std()


def fd_image_gray(fd: np.ndarray) -> np.ndarray:
    """Linear rescale of FD values from [2, 3] to [0, 255] for PGM dumps."""
    scaled = (np.asarray(fd, dtype=float) - 2.0) * 255.0
    return np.clip(np.rint(scaled), 0, 255).astype(np.uint8)
