"""Slub-yarn parameters from a width profile.

A slub is a maximal run of columns whose (median-smoothed) width reaches
``amplitude_threshold_pct`` of the base width and whose length is at least
``min_len_mm``; shorter thick runs count as ordinary unevenness.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import median_filter as _median1d

from .errors import AnalysisError, ParameterError
from .raster import as_binary, row_projection

APERIODIC = "aperiodic"


@dataclass
class SlubSegment:
    start_mm: float
    length_mm: float
    mean_width_px: float
    amplitude_pct: float
    start_col: int = 0
    end_col: int = 0  # inclusive

    def to_dict(self):
        return {"start_mm": self.start_mm, "length_mm": self.length_mm,
                "mean_width_px": self.mean_width_px, "amplitude_pct": self.amplitude_pct}


@dataclass
class SlubReport:
    base_width_px: int
    segments: list
    distances_mm: list
    scan_length_mm: float
    lead_margin_mm: float
    tail_margin_mm: float
    rejected: list = field(default_factory=list)  # (start_mm, length_mm) of short runs

    @property
    def period(self):
        return slub_period(self) if len(self.segments) >= 3 else APERIODIC

    def to_dict(self):
        return {
            "base_width_px": self.base_width_px,
            "segments": [s.to_dict() for s in self.segments],
            "distances_mm": list(self.distances_mm),
            "scan_length_mm": self.scan_length_mm,
            "lead_margin_mm": self.lead_margin_mm,
            "tail_margin_mm": self.tail_margin_mm,
            "n_rejected_short_runs": len(self.rejected),
            "period": self.period,
        }


def detect_base_width(profile):
    """Most frequent nonzero width; ties go to the smaller width."""
    p = np.asarray(profile, dtype=np.int64)
    nz = p[p > 0]
    if p.size == 0 or nz.size * 2 < p.size:
        raise AnalysisError("no base width: fewer than half of the columns hold yarn")
    counts = np.bincount(nz)
    return int(np.argmax(counts))


def smooth_profile(profile, window=5):
    """Running median over ``window`` columns (edge values replicated)."""
    p = np.asarray(profile, dtype=np.float64)
    if window <= 1:
        return p
    return _median1d(p, size=window, mode="nearest")


def _runs(flags):
    """Inclusive (start, end) index pairs of the True runs."""
    f = np.concatenate([[False], np.asarray(flags, dtype=bool), [False]])
    d = np.diff(f.astype(np.int8))
    starts = np.nonzero(d == 1)[0]
    ends = np.nonzero(d == -1)[0] - 1
    return list(zip(starts.tolist(), ends.tolist()))


def detect_slubs(profile, cal, amplitude_threshold_pct=140.0, min_len_mm=20.0,
                 smooth_window=5, base_width=None):
    """Segment a width profile into slubs and inter-slub distances."""
    if amplitude_threshold_pct <= 100:
        raise ParameterError("amplitude threshold must exceed 100%")
    if min_len_mm < 0:
        raise ParameterError("min_len_mm must be >= 0")
    raw = np.asarray(profile, dtype=np.float64)
    base = detect_base_width(raw) if base_width is None else int(base_width)
    if base <= 0:
        raise AnalysisError("no base width")
    sm = smooth_profile(raw, smooth_window)
    thick = sm >= amplitude_threshold_pct / 100.0 * base
    ppm = cal.pixels_per_mm
    segs, rejected = [], []
    for s, e in _runs(thick):
        n = e - s + 1
        length = n / ppm
        if length + 1e-9 < min_len_mm:
            rejected.append((s / ppm, length))
            continue
        mw = float(raw[s:e + 1].mean())
        segs.append(SlubSegment(s / ppm, length, mw, 100.0 * mw / base, s, e))
    dists = [(b.start_col - a.end_col - 1) / ppm for a, b in zip(segs, segs[1:])]
    total = raw.size / ppm
    lead = segs[0].start_col / ppm if segs else total
    tail = (raw.size - 1 - segs[-1].end_col) / ppm if segs else 0.0
    return SlubReport(base, segs, dists, total, lead, tail, rejected)


def _close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b))


def slub_period(report, tol=0.10):
    """Shortest repeat cycle of (length, amplitude, following distance).

    A cycle ``p`` is accepted when at least two full repeats are present
    and every segment matches the one ``p`` places later within ``tol``
    (relative) on all three quantities.  Returns ``p`` or ``"aperiodic"``.
    """
    segs = report.segments
    n = len(segs)
    if n < 3:
        raise AnalysisError("period needs at least three slub segments")
    dist = list(report.distances_mm) + [None]
    for p in range(1, n // 2 + 1):
        ok = True
        for i in range(n - p):
            a, b = segs[i], segs[i + p]
            if not (_close(a.length_mm, b.length_mm, tol)
                    and _close(a.amplitude_pct, b.amplitude_pct, tol)):
                ok = False
                break
            if dist[i] is not None and dist[i + p] is not None and not _close(dist[i], dist[i + p], tol):
                ok = False
                break
        if ok:
            return p
    return APERIODIC


def split_lanes(mask, min_gap=1, min_height=1):
    """Split a multi-strand image into horizontal lanes at empty row runs.

    Returns inclusive ``(top, bottom)`` row pairs of every lane at least
    ``min_height`` rows tall; lanes separated by fewer than ``min_gap``
    empty rows are kept together.
    """
    proj = row_projection(as_binary(mask).astype(np.uint8))
    lanes = _runs(proj > 0)
    merged = []
    for s, e in lanes:
        if merged and s - merged[-1][1] - 1 < min_gap:
            merged[-1] = (merged[-1][0], e)
        else:
            merged.append((s, e))
    return [(s, e) for s, e in merged if e - s + 1 >= min_height]


def width_histogram(profile):
    """``(width, count)`` pairs for the nonzero widths of a profile."""
    p = np.asarray(profile, dtype=np.int64)
    counts = np.bincount(p[p > 0]) if np.any(p > 0) else np.zeros(1, dtype=np.int64)
    return [(w, int(c)) for w, c in enumerate(counts) if c]

