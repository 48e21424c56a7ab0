"""Statistical texture features: co-occurrence, run-length, autocovariance.

Co-occurrence matrices are symmetrized joint histograms of gray pairs at a
fixed displacement, reduced to eight second-order statistics.  Run-length
matrices count maximal constant-gray runs per direction, reduced to five
statistics.  The autocovariance surface is evaluated directly from its
defining sum and its axis margins are fitted with decaying exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DIRECTIONS",
    "GLCM_FEATURE_NAMES",
    "RLM_FEATURE_NAMES",
    "ACF_FEATURE_NAMES",
    "Glcm",
    "Rlm",
    "glcm_counts",
    "glcm_compute",
    "haralick_features",
    "glcm_feature_vector",
    "rlm_compute",
    "rlm_features",
    "rlm_feature_vector",
    "acf_compute",
    "acf_features",
    "fit_exponential",
]

DIRECTIONS = (0, 45, 90, 135)

# Displacement (row, col) per direction at unit distance.
_GLCM_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}

GLCM_FEATURE_NAMES = (
    "contrast",
    "correlation",
    "energy",
    "entropy",
    "homogeneity",
    "dissimilarity",
    "idm",
    "maxprob",
)
RLM_FEATURE_NAMES = ("sre", "lre", "gln", "rln", "rp")
ACF_FEATURE_NAMES = ("amplitude.h", "decay.h", "amplitude.v", "decay.v")

# Floor for margin values entering the log-domain exponential fit.
_MARGIN_EPS = 1e-6


@dataclass(frozen=True, eq=False)
class Glcm:
    """Normalized, symmetric gray-level co-occurrence matrix."""

    levels: int
    direction: int
    distance: int
    cells: np.ndarray


@dataclass(frozen=True, eq=False)
class Rlm:
    """Gray-level run-length count matrix for one direction.

    ``cells[i, j]`` counts maximal runs of level i with exact length j + 1.
    """

    levels: int
    direction: int
    cells: np.ndarray
    pixel_count: int


def glcm_counts(
    pixels: np.ndarray, direction: int, distance: int = 1, levels: int = 32
) -> np.ndarray:
    """Raw symmetrized pair counts, before normalization."""
    if direction not in _GLCM_OFFSETS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction}")
    if distance < 1:
        raise ValueError(f"distance must be >= 1, got {distance}")
    x = np.asarray(pixels)
    if x.max() >= levels:
        raise ValueError(f"pixel value {x.max()} outside [0, {levels - 1}]")
    h, w = x.shape
    dr, dc = (d * distance for d in _GLCM_OFFSETS[direction])
    r0, r1 = max(0, -dr), h - max(0, dr)
    c0, c1 = max(0, -dc), w - max(0, dc)
    if r0 >= r1 or c0 >= c1:
        raise ValueError(f"segment {h}x{w} smaller than offset ({dr}, {dc})")
    first = x[r0:r1, c0:c1].astype(np.int64)
    second = x[r0 + dr : r1 + dr, c0 + dc : c1 + dc].astype(np.int64)
    counts = np.bincount(
        (first * levels + second).ravel(), minlength=levels * levels
    ).reshape(levels, levels)
    return counts + counts.T


def glcm_compute(pixels: np.ndarray, direction: int, distance: int = 1, levels: int = 32) -> Glcm:
    """Co-occurrence matrix of quantized gray pairs at one displacement.

    Pixels must already be quantized into [0, levels - 1].  Pairs are
    counted in both orders (symmetric matrix) and normalized to sum 1.
    """
    counts = glcm_counts(pixels, direction, distance, levels)
    return Glcm(levels, direction, distance, counts / counts.sum())


def haralick_features(glcm: Glcm) -> np.ndarray:
    """Eight second-order statistics of a normalized co-occurrence matrix.

    Order: contrast, correlation, energy, entropy, homogeneity,
    dissimilarity, inverse difference moment, maximum probability.
    Correlation is 0 when either marginal is constant.
    """
    p = glcm.cells
    total = p.sum()
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise ValueError(f"matrix not normalized: sum = {total}")
    g = glcm.levels
    i = np.arange(g)[:, None]
    j = np.arange(g)[None, :]
    diff = i - j
    contrast = float((p * diff**2).sum())
    p_i = p.sum(axis=1)
    p_j = p.sum(axis=0)
    mu_i = float(np.arange(g) @ p_i)
    mu_j = float(np.arange(g) @ p_j)
    var_i = float(((np.arange(g) - mu_i) ** 2) @ p_i)
    var_j = float(((np.arange(g) - mu_j) ** 2) @ p_j)
    if var_i > 0 and var_j > 0:
        correlation = float(((i - mu_i) * (j - mu_j) * p).sum()) / math.sqrt(var_i * var_j)
    else:
        correlation = 0.0
    energy = float((p**2).sum())
    nz = p[p > 0]
    entropy = float(-(nz * np.log(nz)).sum())
    homogeneity = float((p / (1.0 + np.abs(diff))).sum())
    dissimilarity = float((p * np.abs(diff)).sum())
    idm = float((p / (1.0 + diff**2)).sum())
    maxprob = float(p.max())
    return np.array(
        [contrast, correlation, energy, entropy, homogeneity, dissimilarity, idm, maxprob]
    )


def glcm_feature_vector(pixels: np.ndarray, levels: int = 32, distance: int = 1) -> np.ndarray:
    """32 features: eight Haralick statistics per direction, direction-major."""
    return np.concatenate(
        [
            haralick_features(glcm_compute(pixels, d, distance, levels))
            for d in DIRECTIONS
        ]
    )


def _direction_lines(x: np.ndarray, direction: int) -> list[np.ndarray]:
    h, w = x.shape
    if direction == 0:
        return [x[r] for r in range(h)]
    if direction == 90:
        return [x[:, c] for c in range(w)]
    if direction == 135:
        return [np.diagonal(x, k) for k in range(-(h - 1), w)]
    # 45 degrees: anti-diagonals
    flipped = np.fliplr(x)
    return [np.diagonal(flipped, k) for k in range(-(h - 1), w)]


def rlm_compute(pixels: np.ndarray, direction: int, levels: int = 16) -> Rlm:
    """Run-length matrix: counts of maximal equal-gray runs per level/length."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction}")
    x = np.asarray(pixels)
    if x.max() >= levels:
        raise ValueError(f"pixel value {x.max()} outside [0, {levels - 1}]")
    h, w = x.shape
    max_len = max(h, w)
    cells = np.zeros((levels, max_len), dtype=np.int64)
    for line in _direction_lines(x, direction):
        n = line.size
        change = np.flatnonzero(np.diff(line) != 0)
        starts = np.r_[0, change + 1]
        ends = np.r_[change, n - 1]
        np.add.at(cells, (line[starts].astype(np.int64), ends - starts), 1)
    return Rlm(levels, direction, cells, h * w)


def rlm_features(rlm: Rlm) -> np.ndarray:
    """Five run statistics: SRE, LRE, GLN, RLN, RP (in that order)."""
    p = rlm.cells.astype(float)
    n_r = p.sum()
    j = np.arange(1, p.shape[1] + 1, dtype=float)[None, :]
    sre = float((p / j**2).sum()) / n_r
    lre = float((p * j**2).sum()) / n_r
    gln = float((p.sum(axis=1) ** 2).sum()) / n_r
    rln = float((p.sum(axis=0) ** 2).sum()) / n_r
    rp = n_r / rlm.pixel_count
    return np.array([sre, lre, gln, rln, rp])


def rlm_feature_vector(pixels: np.ndarray, levels: int = 16) -> np.ndarray:
    """20 features: five run statistics per direction, direction-major."""
    return np.concatenate(
        [rlm_features(rlm_compute(pixels, d, levels)) for d in DIRECTIONS]
    )


def acf_compute(
    pixels: np.ndarray,
    max_shift: int = 16,
    normalize: bool = True,
    on_degenerate: str = "raise",
) -> np.ndarray:
    """Autocovariance surface for row shifts x and column shifts y.

    Entry (x, y) is the mean product of mean-subtracted intensities at
    displacement (x, y), averaged over the (M - x)(N - y) overlapping
    positions.  The origin value is the population variance; with
    ``normalize=True`` the surface is divided by it so the origin is 1.

    A constant segment has zero variance: raises by default, or yields an
    all-zero surface with ``on_degenerate="zeros"``.
    """
    x = np.asarray(pixels, dtype=float)
    m, n = x.shape
    if max_shift >= min(m, n):
        raise ValueError(f"max_shift {max_shift} must be < min dimension {min(m, n)}")
    xc = x - x.mean()
    surface = np.empty((max_shift + 1, max_shift + 1))
    for sx in range(max_shift + 1):
        for sy in range(max_shift + 1):
            prod = xc[: m - sx, : n - sy] * xc[sx:, sy:]
            surface[sx, sy] = prod.sum() / ((m - sx) * (n - sy))
    if normalize:
        origin = surface[0, 0]
        if origin == 0.0:
            if on_degenerate == "zeros":
                return np.zeros_like(surface)
            raise ValueError("constant segment: autocovariance is identically zero")
        surface = surface / origin
    return surface


def fit_exponential(values: np.ndarray) -> tuple[float, float]:
    """Least-squares fit of A * exp(-b * d) to values at d = 0, 1, 2, ...

    The fit is linear in the log domain; non-positive values are floored at
    1e-6 first.  Returns (A, b) with b clamped at 0.
    """
    y = np.maximum(np.asarray(values, dtype=float), _MARGIN_EPS)
    d = np.arange(y.size, dtype=float)
    ly = np.log(y)
    d_bar = d.mean()
    slope = float((d - d_bar) @ ly / ((d - d_bar) @ d))
    intercept = float(ly.mean() - slope * d_bar)
    return math.exp(intercept), max(0.0, -slope)


def acf_features(
    pixels: np.ndarray, max_shift: int = 16, on_degenerate: str = "raise"
) -> np.ndarray:
    """4 features: exponential fits (A, b) of the two normalized ACF margins.

    Order: horizontal amplitude, horizontal decay, vertical amplitude,
    vertical decay.  Degenerate (constant) segments map to the zero vector
    when ``on_degenerate="zeros"``.
    """
    surface = acf_compute(pixels, max_shift, normalize=True, on_degenerate=on_degenerate)
    if not surface.any():
        return np.zeros(4)
    a_h, b_h = fit_exponential(surface[:, 0])
    a_v, b_v = fit_exponential(surface[0, :])
    return np.array([a_h, b_h, a_v, b_v])
