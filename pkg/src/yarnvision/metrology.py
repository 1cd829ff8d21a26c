"""Pixel/metric calibration, yarn width and diameter, count conversion."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, ParameterError
from .raster import as_binary, as_gray

TEX_PER_NE1 = 590.5  # tex = 590.5 / Ne1
TEX_PER_NM = 1000.0  # tex = 1000 / Nm
SYSTEMS = ("tex", "Nm", "Ne1")


@dataclass(frozen=True)
class Calibration:
    pixels_per_mm: float

    def __post_init__(self):
        if not (self.pixels_per_mm > 0 and math.isfinite(self.pixels_per_mm)):
            raise ParameterError(f"pixels_per_mm must be positive, got {self.pixels_per_mm}")

    def to_mm(self, pixels):
        return px_to_mm(self, pixels)

    def to_px(self, mm):
        return mm * self.pixels_per_mm


@dataclass(frozen=True)
class YarnCount:
    value: float
    system: str = "tex"

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ParameterError(f"unknown count system {self.system!r}; use one of {SYSTEMS}")
        if not self.value > 0:
            raise ParameterError(f"yarn count must be positive, got {self.value}")


def calibrate(p, l_mm):
    """Scale factor from a reference object ``p`` pixels long and ``l_mm`` long."""
    if not (p > 0 and l_mm > 0):
        raise ParameterError(f"calibration needs p > 0 and l > 0, got p={p}, l={l_mm}")
    return Calibration(p / l_mm)


def px_to_mm(cal, p):
    return p / cal.pixels_per_mm


def width_profile(mask):
    """Per-column outer extent of the foreground, in pixels.

    Width is ``bottom - top + 1`` over the foreground rows of the column
    (interior gaps are bridged); empty columns give 0.
    """
    mask = as_binary(mask)
    h, _ = mask.shape
    any_fg = mask.any(axis=0)
    top = np.argmax(mask, axis=0)
    bottom = h - 1 - np.argmax(mask[::-1, :], axis=0)
    return np.where(any_fg, bottom - top + 1, 0).astype(np.int64)


def edge_rows(mask):
    """Per-column (top, bottom) foreground rows; -1 where the column is empty."""
    mask = as_binary(mask)
    h, _ = mask.shape
    any_fg = mask.any(axis=0)
    top = np.where(any_fg, np.argmax(mask, axis=0), -1)
    bottom = np.where(any_fg, h - 1 - np.argmax(mask[::-1, :], axis=0), -1)
    return top, bottom


@dataclass
class DiameterStats:
    mean_mm: float
    min_mm: float
    max_mm: float
    cv: float
    n_columns: int
    mean_px: float

    def to_dict(self):
        return {"mean_mm": self.mean_mm, "min_mm": self.min_mm, "max_mm": self.max_mm,
                "cv": self.cv, "n_columns": self.n_columns, "mean_px": self.mean_px}


def mean_diameter(profile, cal):
    """Mean, extremes and CV of the nonzero widths, converted to mm.

    CV is the population standard deviation over the mean.
    """
    w = np.asarray(profile, dtype=np.float64)
    w = w[w > 0]
    if w.size == 0:
        raise AnalysisError("no yarn found: width profile is empty")
    mean = float(w.mean())
    return DiameterStats(
        mean_mm=px_to_mm(cal, mean),
        min_mm=px_to_mm(cal, float(w.min())),
        max_mm=px_to_mm(cal, float(w.max())),
        cv=float(w.std() / mean),
        n_columns=int(w.size),
        mean_px=mean,
    )


def transverse_profile(img, smooth=1):
    """Mean intensity of every row, smoothed with a ``2*smooth+1`` box."""
    img = as_gray(img).astype(np.float64)
    prof = img.mean(axis=1)
    if smooth > 0:
        k = 2 * smooth + 1
        prof = np.convolve(np.pad(prof, smooth, mode="edge"), np.ones(k) / k, mode="valid")
    return prof


def _crossing(prof, level, i_in, step):
    """Walk from ``i_in`` by ``step`` until ``prof`` drops below ``level``.

    Returns the interpolated fractional row of the crossing.
    """
    i = i_in
    n = len(prof)
    while 0 <= i + step < n and prof[i + step] >= level:
        i += step
    j = i + step
    if not 0 <= j < n:
        raise AnalysisError("no plateau: yarn profile touches the image border")
    a, b = prof[i], prof[j]
    frac = (a - level) / (a - b) if a != b else 0.5
    return i + step * frac


def _inflection(prof, i_peak, step):
    """Fractional position of the steepest descent walking away from the peak."""
    d = np.diff(prof)  # d[k] sits at k + 0.5
    if step < 0:
        seg = d[:i_peak]
        if seg.size == 0:
            raise AnalysisError("no plateau: no rising edge")
        k = int(np.argmax(seg))
        s = seg
    else:
        seg = -d[i_peak:]
        if seg.size == 0:
            raise AnalysisError("no plateau: no falling edge")
        k = int(np.argmax(seg))
        s = seg
    if s[k] <= 0:
        raise AnalysisError("no plateau: flat profile")
    off = 0.0
    # a blurred step has several equally steep differences: use their middle
    tie = 1e-9 * s[k]
    end = k
    while end + 1 < len(s) and s[end + 1] >= s[k] - tie:
        end += 1
    if end > k:
        off = (end - k) / 2.0
    elif 0 < k < len(s) - 1:
        y0, y1, y2 = s[k - 1], s[k], s[k + 1]
        den = y0 - 2 * y1 + y2
        if den != 0:
            off = 0.5 * (y0 - y2) / den
    base = 0 if step < 0 else i_peak
    return base + k + off + 0.5


def histogram_level_diameter(img, mode="perc", percentile=50.0, polarity="bright", smooth=1):
    """Yarn width in pixels from the transverse intensity profile.

    ``mode="perc"`` measures between the two crossings of ``percentile`` %
    of the plateau height above background; ``mode="infl"`` between the
    steepest rising and falling edges (zero of the second difference).
    ``polarity="dark"`` handles dark yarn on a light background.
    """
    if mode not in ("perc", "infl"):
        raise ParameterError(f"mode must be 'perc' or 'infl', got {mode!r}")
    if not 0 < percentile < 100:
        raise ParameterError("percentile must lie strictly between 0 and 100")
    prof = transverse_profile(img, smooth)
    if polarity == "dark":
        prof = -prof
    elif polarity != "bright":
        raise ParameterError("polarity must be 'bright' or 'dark'")
    lo, hi = float(prof.min()), float(prof.max())
    if hi - lo <= 1e-9 * max(1.0, abs(hi)):
        raise AnalysisError("no plateau: transverse profile is flat")
    i_peak = int(np.argmax(prof))
    if mode == "perc":
        level = lo + (hi - lo) * percentile / 100.0
        top = _crossing(prof, level, i_peak, -1)
        bottom = _crossing(prof, level, i_peak, +1)
        return float(bottom - top)
    return float(_inflection(prof, i_peak, +1) - _inflection(prof, i_peak, -1))


def count_convert(count, target):
    """Convert a yarn count between tex, Nm and Ne1."""
    if target not in SYSTEMS:
        raise ParameterError(f"unknown count system {target!r}")
    tex = {"tex": lambda v: v, "Nm": lambda v: TEX_PER_NM / v,
           "Ne1": lambda v: TEX_PER_NE1 / v}[count.system](count.value)
    value = {"tex": lambda t: t, "Nm": lambda t: TEX_PER_NM / t,
             "Ne1": lambda t: TEX_PER_NE1 / t}[target](tex)
    return YarnCount(value, target)


def trommer_band(count):
    """Theoretical diameter band ``(0.035, 0.040) * sqrt(tex)`` in mm."""
    tex = count_convert(count, "tex").value
    root = math.sqrt(tex)
    return 0.035 * root, 0.040 * root
