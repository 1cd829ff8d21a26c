"""Window filters, thresholds and gradients on gray images.

Every windowed operation replicates edge pixels, so output size always
equals input size.
"""
import math

import numpy as np

from .. import kernels
from ..errors import AnalysisError, ParameterError
from ._types import as_gray, check_odd_window


def _pad(img, r):
    return np.pad(img, r, mode="edge") if r else img


def median_filter(img, window=3):
    """Square-window median with clamped edges."""
    img = as_gray(img)
    window = check_odd_window(window)
    if window == 1:
        return img.copy()
    return kernels.window_median(_pad(img, window // 2), window)


def switched_median_filter(img, window=3, k=1.5):
    """Replace a pixel by its window median only when it is an outlier.

    A pixel ``y`` is kept when ``|y - median| < k * Q`` where ``Q`` is the
    median absolute deviation of the window; otherwise the median is used.
    ``k = inf`` keeps every pixel.
    """
    img = as_gray(img)
    window = check_odd_window(window)
    if not k > 0:
        raise ParameterError(f"k must be positive, got {k}")
    if math.isinf(k):
        return img.copy()
    med, mad = kernels.window_median_mad(_pad(img, window // 2), window)
    dev = np.abs(img.astype(np.int16) - med.astype(np.int16))
    keep = dev < k * mad.astype(np.float64)
    return np.where(keep, img, med).astype(np.uint8)


def band_threshold(img, tmin, tmax):
    """Zero every pixel strictly below ``tmin`` or strictly above ``tmax``."""
    img = as_gray(img)
    if not (0 <= tmin <= tmax <= 255):
        raise ParameterError(f"need 0 <= tmin <= tmax <= 255, got ({tmin}, {tmax})")
    out = img.copy()
    out[(img < tmin) | (img > tmax)] = 0
    return out


def box_mean(img, radius):
    """Float mean over a ``(2r+1)^2`` window, clamped edges."""
    if radius < 1 or int(radius) != radius:
        raise ParameterError(f"radius must be a positive integer, got {radius}")
    radius = int(radius)
    a = np.asarray(img, dtype=np.float64)
    win = 2 * radius + 1
    return kernels.box_sum(_pad(a, radius), win) / (win * win)


def low_pass(img, radius=1):
    """Box blur; each output is the floor of the window mean."""
    img = as_gray(img)
    if radius < 1 or int(radius) != radius:
        raise ParameterError(f"radius must be a positive integer, got {radius}")
    radius = int(radius)
    win = 2 * radius + 1
    sums = kernels.box_sum(_pad(img.astype(np.float64), radius), win)
    return (np.rint(sums).astype(np.int64) // (win * win)).astype(np.uint8)


def sobel_float(img):
    """Sobel responses ``(gx, gy)`` as float arrays (y axis points down)."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 3 or a.shape[1] < 3:
        raise ParameterError(f"Sobel needs an image of at least 3x3, got {a.shape}")
    p = np.pad(a, 1, mode="edge")
    h, w = a.shape

    def s(dr, dc):
        return p[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]

    gx = (s(-1, 1) + 2 * s(0, 1) + s(1, 1)) - (s(-1, -1) + 2 * s(0, -1) + s(1, -1))
    gy = (s(1, -1) + 2 * s(1, 0) + s(1, 1)) - (s(-1, -1) + 2 * s(-1, 0) + s(-1, 1))
    return gx, gy


def sobel_gradient(img):
    """Return ``(magnitude, angle)``.

    ``magnitude`` is ``hypot(gx, gy)`` rounded and clamped to a uint8 image;
    ``angle`` is ``atan2(gy, gx)`` in radians.
    """
    img = as_gray(img)
    gx, gy = sobel_float(img)
    mag = np.clip(np.rint(np.hypot(gx, gy)), 0, 255).astype(np.uint8)
    return mag, np.arctan2(gy, gx)


def otsu_from_histogram(hist):
    """Otsu level for a 256-bin histogram.

    When several levels reach the maximum between-class variance (empty
    bins between two modes), the middle of that first plateau is returned.
    """
    hist = np.asarray(hist, dtype=np.float64)
    if np.count_nonzero(hist) < 2:
        raise AnalysisError("degenerate histogram: need at least two distinct intensities")
    total = hist.sum()
    p = hist / total
    levels = np.arange(hist.size, dtype=np.float64)
    w0 = np.cumsum(p)
    mu = np.cumsum(p * levels)
    mu_t = mu[-1]
    denom = w0 * (1.0 - w0)
    with np.errstate(divide="ignore", invalid="ignore"):
        var = np.where(denom > 0, (mu_t * w0 - mu) ** 2 / denom, -1.0)
    var = var[:-1]
    best = var.max()
    tied = np.flatnonzero(var >= best * (1 - 1e-12))
    start = stop = tied[0]
    while stop + 1 < var.size and var[stop + 1] >= best * (1 - 1e-12):
        stop += 1
    return int((start + stop) // 2)


def otsu_threshold(img):
    """Level ``t`` maximising between-class variance; foreground is ``> t``."""
    img = as_gray(img)
    return otsu_from_histogram(np.bincount(img.ravel(), minlength=256))


def binarize(img, threshold=None, invert=False):
    """Threshold to a mask; ``threshold=None`` uses Otsu.

    Foreground is ``pixel > t``; with ``invert`` it is ``pixel <= t`` (dark
    yarn on a light background).
    """
    img = as_gray(img)
    t = otsu_threshold(img) if threshold is None else int(threshold)
    return img <= t if invert else img > t


def invert(img):
    return (255 - as_gray(img).astype(np.int16)).astype(np.uint8)


def scale_to_uint8(values):
    """Linearly map a nonnegative float array onto 0..255 (max -> 255)."""
    v = np.asarray(values, dtype=np.float64)
    top = v.max() if v.size else 0.0
    if top <= 0:
        return np.zeros(v.shape, dtype=np.uint8)
    return np.clip(np.rint(v / top * 255.0), 0, 255).astype(np.uint8)

