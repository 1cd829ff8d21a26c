"""Splice-opening geometry and the eight-grade decision tree.

Measurements come from a binary silhouette whose parent yarn sits on the
left (``orientation="right"`` mirrors the image first).  The opening starts
at the first column whose width departs from the parent width ``Y`` by more
than ``start_tol`` (relative); zones are [0, 5), [5, 10) and [10, inf) mm
from that start point.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, ParameterError
from .metrology import width_profile
from .raster import as_binary, as_gray, binarize, keep_largest_component, median_filter, remove_small_objects

GRADES = ("A", "B1", "B2", "C1", "C2", "D", "E", "F")
ZONE_MM = (5.0, 10.0)


@dataclass
class OpeningMeasurement:
    Y: float
    L: float
    W1: float
    W2: float | None = None
    W3: float | None = None
    start_column: int | None = None

    def __post_init__(self):
        for k in ("Y", "L", "W1", "W2", "W3"):
            v = getattr(self, k)
            if v is not None and v < 0:
                raise ParameterError(f"{k} must be >= 0")

    def to_dict(self):
        return {"Y_mm": self.Y, "L_mm": self.L, "W1_mm": self.W1, "W2_mm": self.W2,
                "W3_mm": self.W3}


@dataclass(frozen=True)
class SpliceThresholds:
    r_open: float = 2.0
    r_over: float = 0.5

    def __post_init__(self):
        if not (0 < self.r_over < 1 < self.r_open):
            raise ParameterError("need 0 < r_over < 1 < r_open")


def preprocess_opening(img, window=3, min_area=20, invert=False):
    """Median filter, Otsu binarization, speck removal, largest component."""
    g = median_filter(as_gray(img), window)
    mask = remove_small_objects(binarize(g, None, invert), min_area)
    return keep_largest_component(mask)


def _mode(values):
    c = Counter(int(v) for v in values)
    top = max(c.values())
    return min(v for v, n in c.items() if n == top)


def measure_opening(mask, cal, orientation="left", start_tol=0.25, probe=5):
    """Measure Y, L, W1..W3 (mm) of a splice opening silhouette."""
    if orientation not in ("left", "right"):
        raise ParameterError("orientation must be 'left' or 'right'")
    m = as_binary(mask)
    if orientation == "right":
        m = m[:, ::-1]
    prof = width_profile(m)
    cols = np.nonzero(prof > 0)[0]
    if cols.size == 0:
        raise AnalysisError("no parent region: image is empty")
    first, last = int(cols[0]), int(cols[-1])
    seg = prof[first:last + 1].astype(np.float64)
    ref = float(np.median(seg[:probe]))
    if ref <= 0:
        raise AnalysisError("no parent region: leading columns are empty")
    depart = np.abs(seg - ref) > start_tol * ref
    if not depart.any():
        raise AnalysisError("opening zone empty: width never departs from the parent yarn")
    k = int(np.argmax(depart))
    if k == 0:
        raise AnalysisError("no parent region: opening starts at the first column")
    y_px = _mode(seg[:k])
    # refine the start against the modal parent width
    depart = np.abs(seg - y_px) > start_tol * y_px
    k = int(np.argmax(depart)) if depart.any() else k
    start = first + k
    ppm = cal.pixels_per_mm
    L_px = last - start + 1
    z5, z10 = (int(round(z * ppm)) for z in ZONE_MM)
    zone = prof[start:last + 1].astype(np.float64)
    W1 = float(zone[:z5].mean()) / ppm
    L = L_px / ppm
    W2 = float(zone[z5:z10].mean()) / ppm if L_px > z5 else None
    W3 = float(zone[z10:].mean()) / ppm if L_px > z10 else None
    return OpeningMeasurement(y_px / ppm, L, W1, W2, W3, start)


def classify_opening(m, thresholds=None):
    """Walk the grade tree top-down; see the module docstring for zones."""
    t = thresholds or SpliceThresholds()
    if m.Y <= 0:
        raise ParameterError("parent width Y must be positive")
    if m.W1 <= m.Y:
        return "D"
    if m.L < ZONE_MM[0]:
        return "C1" if m.W1 / m.Y >= t.r_open else "C2"
    if m.L < ZONE_MM[1]:
        if m.W2 is None:
            raise AnalysisError("W2 is undefined for a 5-10 mm opening")
        r = m.W2 / m.Y
        if r >= t.r_open:
            return "B1"
        if r >= 1.0:
            return "B2"
        if r >= t.r_over:
            return "E"
        return "F"
    if m.W3 is None:
        raise AnalysisError("W3 is undefined for an opening of 10 mm or more")
    return "A" if m.W3 / m.Y >= 1.0 else "E"


def round_half_up(x):
    return int(math.floor(x + 0.5))


def classification_report(predicted, truth):
    """Per-class counts and error percentages, with a total row.

    Totals are given three ways: the raw pooled error (wrong / total), the
    mean of the per-class error percentages, and that mean rounded.
    """
    predicted, truth = list(predicted), list(truth)
    if len(predicted) != len(truth):
        raise ParameterError("predicted and truth must have equal length")
    counts = {}
    for p, t in zip(predicted, truth):
        c = counts.setdefault(t, [0, 0])
        c[0 if p == t else 1] += 1
    return report_from_counts({k: tuple(v) for k, v in counts.items()})


def report_from_counts(counts):
    """Build the report from ``{grade: (correct, incorrect)}``."""
    order = [g for g in GRADES if g in counts] + sorted(g for g in counts if g not in GRADES)
    rows = []
    for g in order:
        ok, bad = counts[g]
        n = ok + bad
        err = 100.0 * bad / n if n else 0.0
        rows.append({"grade": g, "n": n, "correct": ok, "incorrect": bad,
                     "error_pct": err, "error_pct_rounded": round_half_up(err)})
    n_all = sum(r["n"] for r in rows)
    bad_all = sum(r["incorrect"] for r in rows)
    macro = sum(r["error_pct"] for r in rows) / len(rows) if rows else 0.0
    return {
        "classes": rows,
        "total": {"n": n_all, "correct": n_all - bad_all, "incorrect": bad_all,
                  "error_pct_raw": 100.0 * bad_all / n_all if n_all else 0.0,
                  "error_pct_class_mean": macro,
                  "error_pct_class_mean_rounded": round_half_up(macro)},
    }


def report_to_csv(report):
    lines = ["grade,n,correct,incorrect,error_pct"]
    for r in report["classes"]:
        lines.append(f"{r['grade']},{r['n']},{r['correct']},{r['incorrect']},{r['error_pct_rounded']}")
    t = report["total"]
    lines.append(f"total,{t['n']},{t['correct']},{t['incorrect']},{t['error_pct_class_mean_rounded']}")
    return "\n".join(lines) + "\n"
