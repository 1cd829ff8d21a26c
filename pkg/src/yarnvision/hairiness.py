"""Hair density distribution profile (HDDP) and its split log-log fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, ParameterError
from .raster import as_binary, connected_components
from .stats import linfit


@dataclass
class HDDP:
    """Hairs per mm of scanned yarn, binned by hair length.

    Bin ``i`` covers lengths ``[i*w, (i+1)*w)`` mm and is represented by its
    centre ``(i + 0.5) * w``.
    """

    bin_width_mm: float
    density: np.ndarray
    scan_length_mm: float
    hair_lengths_mm: list = field(default_factory=list)

    def __post_init__(self):
        if not self.bin_width_mm > 0:
            raise ParameterError("bin width must be positive")
        if not self.scan_length_mm > 0:
            raise AnalysisError("zero scan length")
        self.density = np.asarray(self.density, dtype=np.float64)
        if np.any(self.density < 0):
            raise ParameterError("densities must be >= 0")

    @property
    def centers_mm(self):
        return (np.arange(self.density.size) + 0.5) * self.bin_width_mm

    @property
    def counts(self):
        return self.density * self.scan_length_mm

    def bin_of(self, length_mm):
        i = _bin_index(length_mm, self.bin_width_mm)
        return float(self.density[i]) if i < self.density.size else 0.0

    def rows(self):
        return list(zip(self.centers_mm.tolist(), self.density.tolist()))

    def to_csv(self):
        lines = ["length_mm,density_per_mm"]
        lines += [f"{c!r},{d!r}" for c, d in self.rows()]
        return "\n".join(lines) + "\n"


def _bin_index(length_mm, bin_width_mm):
    return int(math.floor(length_mm / bin_width_mm + 1e-9))


def hddp_from_lengths(lengths_mm, scan_length_mm, bin_width_mm=0.25, n_bins=None):
    lengths = [float(v) for v in lengths_mm]
    idx = [_bin_index(v, bin_width_mm) for v in lengths]
    size = max(idx) + 1 if idx else 0
    if n_bins is not None:
        size = max(size, n_bins)
    counts = np.bincount(np.asarray(idx, dtype=np.int64), minlength=size).astype(np.float64)
    if not scan_length_mm > 0:
        raise AnalysisError("zero scan length")
    return HDDP(bin_width_mm, counts / scan_length_mm, scan_length_mm, sorted(lengths))


def hair_lengths_px(mask, band):
    """Protruding extent (pixels) of every hair column above and below the band.

    Only foreground connected (8-neighbourhood) to the core band counts;
    each column contributes at most one hair per side.  Returns
    ``(lengths, core_columns)``.
    """
    mask = as_binary(mask)
    top, bottom = band
    h, w = mask.shape
    if not (0 <= top <= bottom < h):
        raise ParameterError(f"core band {band} outside a {h}-row image")
    labels, count = connected_components(mask, 8)
    attached = np.zeros(count + 1, dtype=bool)
    attached[np.unique(labels[top:bottom + 1])] = True
    attached[0] = False
    hair = attached[labels]
    core_cols = mask[top:bottom + 1].any(axis=0)
    lengths = []
    above = hair[:top]
    if above.shape[0]:
        has = above.any(axis=0)
        first = np.argmax(above, axis=0)
        lengths.extend((top - first[has]).tolist())
    below = hair[bottom + 1:]
    if below.shape[0]:
        has = below.any(axis=0)
        last = below.shape[0] - 1 - np.argmax(below[::-1], axis=0)
        lengths.extend((last[has] + 1).tolist())
    return lengths, int(core_cols.sum())


def compute_hddp(mask, cal, band, bin_width_mm=0.25, n_bins=None):
    """HDDP of a binary yarn image with a known core band.

    Scan length is the number of columns containing core pixels, in mm.
    """
    lengths, ncols = hair_lengths_px(mask, band)
    if ncols == 0:
        raise AnalysisError("zero scan length: no core columns in the band")
    scan = ncols / cal.pixels_per_mm
    return hddp_from_lengths([v / cal.pixels_per_mm for v in lengths], scan, bin_width_mm, n_bins)


def merge_hddp(a, b):
    """HDDP of two back-to-back scans (counts add, lengths add)."""
    if not math.isclose(a.bin_width_mm, b.bin_width_mm):
        raise ParameterError("cannot merge HDDPs with different bin widths")
    n = max(a.density.size, b.density.size)
    ca = np.pad(a.counts, (0, n - a.density.size))
    cb = np.pad(b.counts, (0, n - b.density.size))
    scan = a.scan_length_mm + b.scan_length_mm
    return HDDP(a.bin_width_mm, (ca + cb) / scan, scan,
                sorted(a.hair_lengths_mm + b.hair_lengths_mm))


def hairiness_count_ge(hddp, threshold_mm=2.0):
    """Hairs per mm whose bin centre is at least ``threshold_mm``."""
    if threshold_mm < 0:
        raise ParameterError("threshold must be >= 0")
    sel = hddp.centers_mm >= threshold_mm - 1e-12
    return float(hddp.density[sel].sum())


@dataclass
class LogFit:
    m: float
    b: float
    r2: float
    segment: str
    n_points: int
    n_zero_excluded: int

    def to_dict(self):
        return {"segment": self.segment, "m": self.m, "b": self.b, "r2": self.r2,
                "n_points": self.n_points, "n_zero_excluded": self.n_zero_excluded}


def _fit_segment(lengths, dens, name):
    nz = dens > 0
    if nz.sum() < 2:
        raise AnalysisError(f"segment {name}: fewer than two nonzero bins")
    fit = linfit(np.log10(lengths[nz]), np.log10(dens[nz]))
    return LogFit(fit.m, fit.b, fit.r2, name, int(nz.sum()), int((~nz).sum()))


def fit_loglinear(lengths_mm, densities, split_mm=0.75, strict=True):
    """Fit ``log10(density) = m*log10(length) + b`` below and above ``split_mm``.

    Zero densities are skipped.  Returns ``(short, long)``; with
    ``strict=False`` a segment that cannot be fitted comes back as ``None``.
    """
    L = np.asarray(lengths_mm, dtype=np.float64)
    D = np.asarray(densities, dtype=np.float64)
    if np.any(L <= 0):
        raise ParameterError("bin lengths must be positive")
    out = []
    for sel, name in ((L <= split_mm, f"L<={split_mm}mm"), (L > split_mm, f"L>{split_mm}mm")):
        try:
            out.append(_fit_segment(L[sel], D[sel], name))
        except AnalysisError:
            if strict:
                raise
            out.append(None)
    return tuple(out)


def fit_hddp_loglinear(hddp, split_mm=0.75, strict=True):
    return fit_loglinear(hddp.centers_mm, hddp.density, split_mm, strict)
