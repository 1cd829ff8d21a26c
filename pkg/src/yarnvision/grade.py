"""Appearance-grade features: wavelet core/hair separation, width map,
saliency map, and a nearest-centroid grade classifier.

Both wavelets are integer lifting schemes, so analysis followed by
synthesis reproduces the input exactly:

* ``haar``: ``d = odd - even``, ``s = even + floor(d / 2)``;
* ``53``:   LeGall 5/3 with symmetric extension,
  ``d = odd - floor((left + right) / 2)``, ``s = even + floor((d_prev + d + 2) / 4)``.

Band names follow ``(x filter, y filter)``: ``hl`` is high-pass along the
rows' direction (columns change), ``lh`` high-pass along the columns.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import median_filter as _median1d

from .errors import AnalysisError, ParameterError
from .metrology import width_profile
from .raster import as_gray, binarize, keep_largest_component

WAVELETS = ("haar", "53")


# ---------------------------------------------------------------------------
# 1-D lifting along the last axis
# ---------------------------------------------------------------------------

def _fwd_haar(x):
    even, odd = x[..., 0::2], x[..., 1::2]
    d = odd - even
    s = even + (d >> 1)
    return s, d


def _inv_haar(s, d):
    even = s - (d >> 1)
    odd = d + even
    out = np.empty(s.shape[:-1] + (2 * s.shape[-1],), dtype=np.int64)
    out[..., 0::2], out[..., 1::2] = even, odd
    return out


def _fwd_53(x):
    even, odd = x[..., 0::2], x[..., 1::2]
    right = np.concatenate([even[..., 1:], even[..., -1:]], axis=-1)
    d = odd - ((even + right) >> 1)
    dprev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
    s = even + ((dprev + d + 2) >> 2)
    return s, d


def _inv_53(s, d):
    dprev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
    even = s - ((dprev + d + 2) >> 2)
    right = np.concatenate([even[..., 1:], even[..., -1:]], axis=-1)
    odd = d + ((even + right) >> 1)
    out = np.empty(s.shape[:-1] + (2 * s.shape[-1],), dtype=np.int64)
    out[..., 0::2], out[..., 1::2] = even, odd
    return out


_LIFT = {"haar": (_fwd_haar, _inv_haar), "53": (_fwd_53, _inv_53)}


@dataclass
class WaveletDecomposition:
    approx: np.ndarray
    details: list  # details[k] = {"hl", "lh", "hh"} for level k + 1
    shape: tuple  # original image shape (before padding)
    wavelet: str = "haar"

    @property
    def levels(self):
        return len(self.details)


def wavelet_decompose(img, levels=1, wavelet="haar"):
    """Separable 2-D integer wavelet analysis.

    Images whose sides are not multiples of ``2**levels`` are padded by
    edge replication; :func:`wavelet_synthesize` crops back.
    """
    if levels < 1 or int(levels) != levels:
        raise ParameterError("levels must be a positive integer")
    if wavelet not in _LIFT:
        raise ParameterError(f"wavelet must be one of {WAVELETS}")
    a = np.asarray(img)
    if a.ndim != 2:
        raise ParameterError("expected a 2-D image")
    fwd = _LIFT[wavelet][0]
    k = 1 << int(levels)
    h, w = a.shape
    H, W = -(-h // k) * k, -(-w // k) * k
    x = np.pad(a.astype(np.int64), ((0, H - h), (0, W - w)), mode="edge")
    details = []
    for _ in range(int(levels)):
        lo_x, hi_x = fwd(x)  # along columns (x)
        ll, lh = (b.T for b in fwd(lo_x.T))  # then along rows (y)
        hl, hh = (b.T for b in fwd(hi_x.T))
        details.append({"hl": hl, "lh": lh, "hh": hh})
        x = ll
    return WaveletDecomposition(x, details, (h, w), wavelet)


def wavelet_synthesize(dec):
    inv = _LIFT[dec.wavelet][1]
    x = dec.approx.astype(np.int64)
    for det in reversed(dec.details):
        lo_x = inv(x.T, det["lh"].T).T
        hi_x = inv(det["hl"].T, det["hh"].T).T
        x = inv(lo_x, hi_x)
    h, w = dec.shape
    return x[:h, :w]


def band_energy(dec):
    """Sum of squared coefficients per (level, band)."""
    return {(k + 1, b): float(np.sum(v.astype(np.float64) ** 2))
            for k, det in enumerate(dec.details) for b, v in det.items()}


def separate_core(img, levels=2, wavelet="haar"):
    """Suppress thin across-axis structures (hairs) while keeping the core.

    The detail bands that are high-pass along the yarn axis (``hl``,
    ``hh``) are zeroed at every level; a core constant along the axis has
    none, so its rows come back unchanged.
    """
    g = as_gray(img)
    dec = wavelet_decompose(g, levels, wavelet)
    for det in dec.details:
        det["hl"] = np.zeros_like(det["hl"])
        det["hh"] = np.zeros_like(det["hh"])
    return np.clip(wavelet_synthesize(dec), 0, 255).astype(np.uint8)


# ---------------------------------------------------------------------------
# features
# ---------------------------------------------------------------------------

def saliency_map(widths, window=103):
    """``|w - running_median(w)| / running_median(w)`` per column (0 where the median is 0)."""
    w = np.asarray(widths, dtype=np.float64)
    if window < 1 or window % 2 == 0:
        raise ParameterError("saliency window must be a positive odd number")
    med = _median1d(w, size=window, mode="nearest")
    return np.where(med > 0, np.abs(w - med) / np.where(med > 0, med, 1.0), 0.0)


def defect_regions(saliency, threshold=0.4, merge_gap=2):
    """Inclusive column runs whose saliency exceeds ``threshold``."""
    s = np.asarray(saliency) > threshold
    f = np.concatenate([[False], s, [False]]).astype(np.int8)
    d = np.diff(f)
    runs = list(zip(np.nonzero(d == 1)[0].tolist(), (np.nonzero(d == -1)[0] - 1).tolist()))
    merged = []
    for a, b in runs:
        if merged and a - merged[-1][1] - 1 <= merge_gap:
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return merged


@dataclass
class GradeFeatures:
    diameter_histogram: np.ndarray
    width_map: np.ndarray
    saliency: np.ndarray
    defects: list
    px_per_mm: float | None = None
    summary: dict = field(default_factory=dict)

    def vector(self):
        vals = [self.summary.get(k) for k in FEATURE_KEYS]
        return np.array([np.nan if v is None else v for v in vals], dtype=np.float64)

    def to_dict(self):
        return {"summary": dict(self.summary),
                "defects": [{"start_col": a, "end_col": b, "center_col": (a + b) / 2.0}
                            for a, b in self.defects]}


def features_from_widths(widths, px_per_mm=None, saliency_window=103, defect_threshold=0.4):
    w = np.asarray(widths, dtype=np.int64)
    nz = w[w > 0]
    if nz.size == 0:
        raise AnalysisError("no core found: width map is empty")
    sal = saliency_map(w, saliency_window)
    defects = defect_regions(sal, defect_threshold)
    mean = float(nz.mean())
    hist = np.bincount(np.clip(w, 0, 255), minlength=256)[:256]
    summary = {
        "mean_width_px": mean,
        "cv_pct": 100.0 * float(nz.std()) / mean,
        "defect_count": len(defects),
        "saliency_p95": float(np.percentile(sal, 95)),
        "n_columns": int(w.size),
    }
    if px_per_mm:
        summary["mean_width_mm"] = mean / px_per_mm
        summary["scan_length_mm"] = w.size / px_per_mm
        summary["defects_per_m"] = len(defects) / (w.size / px_per_mm / 1000.0)
    else:
        summary["defects_per_m"] = None
    return GradeFeatures(hist, w, sal, defects, px_per_mm, summary)


def extract_grade_features(img, cal=None, levels=2, wavelet="haar", saliency_window=103,
                           defect_threshold=0.4, invert=False):
    """Wavelet core separation, Otsu binarization, width map, saliency."""
    g = as_gray(img)
    if invert:
        g = 255 - g
    core = separate_core(g, levels, wavelet)
    if core.min() == core.max():
        raise AnalysisError("no core found: flat image")
    mask = keep_largest_component(binarize(core))
    ppm = None if cal is None else cal.pixels_per_mm
    return features_from_widths(width_profile(mask), ppm, saliency_window, defect_threshold)


# ---------------------------------------------------------------------------
# classifier
# ---------------------------------------------------------------------------

FEATURE_KEYS = ("cv_pct", "defects_per_m", "saliency_p95")


@dataclass
class ReferenceSet:
    """Grade centroids in feature space; ``entries`` are (grade, vector)."""

    entries: list

    @classmethod
    def from_dict(cls, d):
        rows = d.get("references", d) if isinstance(d, dict) else d
        entries = []
        for r in rows:
            entries.append((str(r["grade"]), np.array([float(r[k]) for k in FEATURE_KEYS])))
        return cls(entries)

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def centroids(self):
        if not self.entries:
            raise AnalysisError("empty reference set")
        grades = sorted({g for g, _ in self.entries})
        return grades, np.array([np.mean([v for g2, v in self.entries if g2 == g], axis=0)
                                 for g in grades])


def default_reference():
    from importlib import resources
    text = resources.files("yarnvision").joinpath("data/grade_reference.json").read_text("utf-8")
    return ReferenceSet.from_dict(json.loads(text))


def classify_grade(features, reference):
    """Nearest centroid after scaling each feature by its spread over centroids.

    Returns ``(grade, {grade: distance})``; exact ties go to the grade that
    sorts first (A before B ...).
    """
    grades, cents = reference.centroids()
    x = features.vector() if isinstance(features, GradeFeatures) else np.asarray(features, float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("feature vector has undefined entries (calibration missing?)")
    span = cents.max(axis=0) - cents.min(axis=0)
    scale = np.where(span > 0, span, 1.0)
    dist = np.sqrt((((x - cents) / scale) ** 2).sum(axis=1))
    best = min(range(len(grades)), key=lambda i: (dist[i], grades[i]))
    return grades[best], {g: float(d) for g, d in zip(grades, dist)}

