"""Gaussian Markov random field texture features.

Each pixel is modelled as conditionally Gaussian given its 12-pixel
neighborhood (offsets up to +/-2 along the axes and +/-1 on the diagonals),
grouped into six symmetric pair sums.  Least-squares estimation of the six
interaction coefficients plus the conditional variance yields a 7-value
feature vector per segment.  A torus synthesizer doubles as a test oracle
for the estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateSegmentError",
    "UnstableParamsError",
    "GmrfParams",
    "PAIR_OFFSETS",
    "FEATURE_NAMES",
    "neighbor_sums",
    "estimate_gmrf",
    "synthesize_gmrf",
    "synthesize_gmrf_field",
    "gmrf_features",
]

# One representative offset (row, col) per symmetric neighbor pair; the pair
# sum adds the pixel at +offset and at -offset.
PAIR_OFFSETS = ((1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (1, -1))

FEATURE_NAMES = ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "sigma2")

# Condition number above which the 6x6 normal matrix is treated as singular.
_COND_LIMIT = 1e12


class DegenerateSegmentError(ValueError):
    """Normal equations are singular (e.g. a constant segment)."""


class UnstableParamsError(ValueError):
    """Parameter set violates the spectral stability condition."""


@dataclass(frozen=True)
class GmrfParams:
    """Six pair-interaction coefficients and the conditional variance."""

    alpha: np.ndarray
    sigma2: float

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        if alpha.shape != (6,):
            raise ValueError(f"alpha must have 6 entries, got shape {alpha.shape}")
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        object.__setattr__(self, "alpha", alpha)


def neighbor_sums(pixels: np.ndarray, i: int, j: int) -> np.ndarray:
    """The six symmetric neighbor pair sums at interior pixel (i, j).

    s1 = I[i-1,j]+I[i+1,j], s2 = I[i,j-1]+I[i,j+1], s3 and s4 the same at
    distance 2, s5 and s6 the two diagonal pairs.
    """
    x = np.asarray(pixels, dtype=float)
    m, n = x.shape
    if not (2 <= i <= m - 3 and 2 <= j <= n - 3):
        raise ValueError(f"pixel ({i}, {j}) is not interior for shape {x.shape}")
    return np.array(
        [
            x[i - 1, j] + x[i + 1, j],
            x[i, j - 1] + x[i, j + 1],
            x[i - 2, j] + x[i + 2, j],
            x[i, j - 2] + x[i, j + 2],
            x[i - 1, j - 1] + x[i + 1, j + 1],
            x[i - 1, j + 1] + x[i + 1, j - 1],
        ]
    )


def _pair_sum_stack(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pair sums for all interior pixels, stacked as (6, n_interior)."""
    m, n = x.shape
    core = x[2 : m - 2, 2 : n - 2]
    s = np.stack(
        [
            x[1 : m - 3, 2 : n - 2] + x[3 : m - 1, 2 : n - 2],
            x[2 : m - 2, 1 : n - 3] + x[2 : m - 2, 3 : n - 1],
            x[0 : m - 4, 2 : n - 2] + x[4:m, 2 : n - 2],
            x[2 : m - 2, 0 : n - 4] + x[2 : m - 2, 4:n],
            x[1 : m - 3, 1 : n - 3] + x[3 : m - 1, 3 : n - 1],
            x[1 : m - 3, 3 : n - 1] + x[3 : m - 1, 1 : n - 3],
        ]
    )
    return s.reshape(6, -1), core.ravel()


def estimate_gmrf(pixels: np.ndarray, interior_denominator: bool = False) -> GmrfParams:
    """Least-squares fit of the six coefficients and conditional variance.

    The segment mean is subtracted first, making the features invariant to
    gray-level offsets.  Sums run over interior pixels only (all +/-2
    offsets in bounds).  The variance denominator is (M-2)(N-2) by default;
    ``interior_denominator=True`` switches to the actual interior pixel
    count (M-4)(N-4).
    """
    x = np.asarray(pixels, dtype=float)
    m, n = x.shape
    if m < 5 or n < 5:
        raise ValueError(f"segment must be at least 5x5, got {m}x{n}")
    x = x - x.mean()
    s, target = _pair_sum_stack(x)
    normal = s @ s.T
    rhs = s @ target
    if np.linalg.cond(normal) > _COND_LIMIT:
        raise DegenerateSegmentError(
            "normal equations are singular or ill-conditioned"
        )
    alpha = np.linalg.solve(normal, rhs)
    residual = target - s.T @ alpha
    if interior_denominator:
        denom = (m - 4) * (n - 4)
    else:
        denom = (m - 2) * (n - 2)
    sigma2 = float(residual @ residual) / denom
    return GmrfParams(alpha, sigma2)


def _spectrum_cosine_sum(alpha: np.ndarray, size: int) -> np.ndarray:
    """sum_l alpha_l * cos(omega . d_l) on the size x size torus frequencies."""
    k = np.arange(size)
    total = np.zeros((size, size))
    for a, (di, dj) in zip(alpha, PAIR_OFFSETS):
        phase = 2.0 * np.pi * (np.add.outer(k * di, k * dj)) / size
        total += a * np.cos(phase)
    return total


def _check_stability(alpha: np.ndarray, size: int) -> np.ndarray:
    cos_sum = _spectrum_cosine_sum(alpha, size)
    if np.max(np.abs(2.0 * cos_sum)) >= 1.0:
        raise UnstableParamsError(
            f"parameters unstable: max |2 sum alpha cos| = {np.max(np.abs(2 * cos_sum)):.4f}"
        )
    return cos_sum


def _conditional_mean(field: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    mean = np.zeros_like(field)
    for a, (di, dj) in zip(alpha, PAIR_OFFSETS):
        mean += a * (
            np.roll(field, (di, dj), axis=(0, 1))
            + np.roll(field, (-di, -dj), axis=(0, 1))
        )
    return mean


def synthesize_gmrf_field(
    params: GmrfParams, size: int, seed: int, iterations: int = 8
) -> np.ndarray:
    """Stationary zero-mean realization of the model on a size x size torus.

    The chain starts from an exact spectral-domain sample of the torus
    field (so no burn-in is needed) and then runs ``iterations`` Gibbs
    sweeps.  Deterministic given the seed.
    """
    cos_sum = _check_stability(params.alpha, size)
    rng = np.random.default_rng(seed)
    if params.sigma2 == 0.0:
        return np.zeros((size, size))
    # Precision eigenvalues of the torus field; exact sample via FFT.
    lam = (1.0 - 2.0 * cos_sum) / params.sigma2
    noise = rng.standard_normal((size, size))
    spectrum = np.fft.fft2(noise, norm="ortho") / np.sqrt(lam)
    field = np.fft.ifft2(spectrum, norm="ortho").real
    sigma = np.sqrt(params.sigma2)
    if iterations > 0:
        if size % 4 == 0:
            field = _gibbs_colored(field, params.alpha, sigma, rng, iterations)
        else:
            field = _gibbs_sequential(field, params.alpha, sigma, rng, iterations)
    return field


def _gibbs_colored(field, alpha, sigma, rng, iterations):
    # (i mod 4, j mod 4) classes contain no neighbor pairs, so each class
    # updates in one vectorized draw; requires size divisible by 4.
    size = field.shape[0]
    rows = np.arange(size)[:, None] % 4
    cols = np.arange(size)[None, :] % 4
    masks = [(rows == ci) & (cols == cj) for ci in range(4) for cj in range(4)]
    for _ in range(iterations):
        for mask in masks:
            mean = _conditional_mean(field, alpha)
            field[mask] = mean[mask] + sigma * rng.standard_normal(int(mask.sum()))
    return field


def _gibbs_sequential(field, alpha, sigma, rng, iterations):
    size = field.shape[0]
    for _ in range(iterations):
        noise = rng.standard_normal((size, size))
        for i in range(size):
            for j in range(size):
                total = 0.0
                for a, (di, dj) in zip(alpha, PAIR_OFFSETS):
                    total += a * (
                        field[(i - di) % size, (j - dj) % size]
                        + field[(i + di) % size, (j + dj) % size]
                    )
                field[i, j] = total + sigma * noise[i, j]
    return field


def synthesize_gmrf(
    params: GmrfParams, size: int, seed: int, iterations: int = 8
) -> np.ndarray:
    """Synthesize a gray texture from the model, as a uint8 array.

    The zero-mean field is shifted to mid-gray (128), rounded, and clipped
    to [0, 255].  No per-image contrast stretch is applied, so the field's
    variance survives in gray-level units and round-trip estimation of
    sigma2 stays meaningful.
    """
    field = synthesize_gmrf_field(params, size, seed, iterations)
    return np.clip(np.rint(field + 128.0), 0, 255).astype(np.uint8)


def gmrf_features(pixels: np.ndarray, on_degenerate: str = "raise") -> np.ndarray:
    """The 7-value feature vector (alpha1..alpha6, sigma2) of a segment.

    ``on_degenerate="zeros"`` maps constant/degenerate segments to the
    all-zero vector instead of raising, so batch pipelines keep running.
    """
    if on_degenerate not in ("raise", "zeros"):
        raise ValueError(f"on_degenerate must be 'raise' or 'zeros', got {on_degenerate!r}")
    try:
        params = estimate_gmrf(pixels)
    except DegenerateSegmentError:
        if on_degenerate == "zeros":
            return np.zeros(7)
        raise
    return np.concatenate([params.alpha, [params.sigma2]])
