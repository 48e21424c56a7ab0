"""Brute-force reference implementations, independent of the library paths.

Everything here trades speed for obviousness: explicit pair enumeration,
run scanning, and dense linear algebra.  Tests compare the fast library
code against these.
"""

import math

import numpy as np

GLCM_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}


def glcm_counts(pixels, direction, distance, levels):
    """Symmetrized pair counts by looping over every pixel."""
    x = np.asarray(pixels)
    h, w = x.shape
    dr, dc = (d * distance for d in GLCM_OFFSETS[direction])
    counts = np.zeros((levels, levels), dtype=np.int64)
    for r in range(h):
        for c in range(w):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < h and 0 <= c2 < w:
                counts[x[r, c], x[r2, c2]] += 1
                counts[x[r2, c2], x[r, c]] += 1
    return counts


def haralick(p):
    """Direct summation of the eight statistics over all matrix cells."""
    g = p.shape[0]
    contrast = correlation = energy = entropy = 0.0
    homogeneity = dissimilarity = idm = 0.0
    mu_i = sum(i * p[i, j] for i in range(g) for j in range(g))
    mu_j = sum(j * p[i, j] for i in range(g) for j in range(g))
    var_i = sum((i - mu_i) ** 2 * p[i, j] for i in range(g) for j in range(g))
    var_j = sum((j - mu_j) ** 2 * p[i, j] for i in range(g) for j in range(g))
    for i in range(g):
        for j in range(g):
            v = p[i, j]
            contrast += v * (i - j) ** 2
            energy += v * v
            if v > 0:
                entropy -= v * math.log(v)
            homogeneity += v / (1 + abs(i - j))
            dissimilarity += v * abs(i - j)
            idm += v / (1 + (i - j) ** 2)
            if var_i > 0 and var_j > 0:
                correlation += (i - mu_i) * (j - mu_j) * v / math.sqrt(var_i * var_j)
    return np.array(
        [contrast, correlation, energy, entropy, homogeneity, dissimilarity, idm, p.max()]
    )


def rlm_counts(pixels, direction, levels):
    """Run counts by walking each line of the direction pixel by pixel."""
    x = np.asarray(pixels)
    h, w = x.shape
    if direction == 0:
        lines = [list(x[r, :]) for r in range(h)]
    elif direction == 90:
        lines = [list(x[:, c]) for c in range(w)]
    elif direction == 135:
        lines = [list(np.diagonal(x, k)) for k in range(-(h - 1), w)]
    else:  # 45
        lines = [list(np.diagonal(np.fliplr(x), k)) for k in range(-(h - 1), w)]
    cells = np.zeros((levels, max(h, w)), dtype=np.int64)
    for line in lines:
        k = 0
        while k < len(line):
            j = k
            while j + 1 < len(line) and line[j + 1] == line[k]:
                j += 1
            cells[line[k], j - k] += 1
            k = j + 1
    return cells


def pair_curve(pixels, center, window_radius, max_distance):
    """Difference curve via exhaustive enumeration of window pixel pairs."""
    x = np.asarray(pixels, dtype=float)
    h, w = x.shape
    ci, cj = center
    rows = range(max(0, ci - window_radius), min(h, ci + window_radius + 1))
    cols = range(max(0, cj - window_radius), min(w, cj + window_radius + 1))
    points = [(r, c) for r in rows for c in cols]
    sums = np.zeros(max_distance)
    dists = np.zeros(max_distance)
    counts = np.zeros(max_distance, dtype=np.int64)
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            (r1, c1), (r2, c2) = points[a], points[b]
            dist = math.hypot(r1 - r2, c1 - c2)
            d = math.ceil(dist - 0.5)
            if 1 <= d <= max_distance:
                sums[d - 1] += abs(x[r1, c1] - x[r2, c2])
                dists[d - 1] += dist
                counts[d - 1] += 1
    return [
        (dists[d] / counts[d], sums[d] / counts[d])
        for d in range(max_distance)
        if counts[d] > 0
    ]


def acf_surface(pixels, max_shift):
    """Shift-by-shift evaluation of the autocovariance sum, raw (unnormalized)."""
    x = np.asarray(pixels, dtype=float)
    m, n = x.shape
    mu = x.mean()
    surface = np.zeros((max_shift + 1, max_shift + 1))
    for sx in range(max_shift + 1):
        for sy in range(max_shift + 1):
            total = 0.0
            for i in range(m - sx):
                for j in range(n - sy):
                    total += (x[i, j] - mu) * (x[i + sx, j + sy] - mu)
            surface[sx, sy] = total / ((m - sx) * (n - sy))
    return surface


def gaussian_log_density(mean, cov, x):
    """Dense evaluation with explicit inverse and slogdet."""
    n = mean.size
    sign, log_det = np.linalg.slogdet(cov)
    assert sign > 0
    delta = np.asarray(x, dtype=float) - mean
    quad = float(delta @ np.linalg.inv(cov) @ delta)
    return -0.5 * (n * math.log(2 * math.pi) + log_det + quad)


def nearest_mahalanobis(means, cov, x):
    """Index of the closest mean under the shared-covariance metric."""
    inv = np.linalg.inv(cov)
    distances = [float((x - mu) @ inv @ (x - mu)) for mu in means]
    return int(np.argmin(distances))
