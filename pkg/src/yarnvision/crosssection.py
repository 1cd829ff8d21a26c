"""Packing density of yarn cross-sections (fiber area over ellipse area)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, ParameterError
from .raster import as_binary, as_gray, binarize, fill_holes, remove_small_objects
from .stats import one_way_anova, pairwise_from_means


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    M: float  # full axis along ``orientation_deg``
    N: float  # full perpendicular axis
    orientation_deg: float = 0.0

    @property
    def area(self):
        """Analytic area ``pi * M * N / 4``."""
        return math.pi * self.M * self.N / 4.0

    def contains(self, shape):
        """Boolean mask of pixels whose centres satisfy the ellipse (<= 1)."""
        h, w = shape
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        t = math.radians(self.orientation_deg)
        dx, dy = xx - self.cx, yy - self.cy
        u = dx * math.cos(t) + dy * math.sin(t)
        v = -dx * math.sin(t) + dy * math.cos(t)
        return (u / (self.M / 2.0)) ** 2 + (v / (self.N / 2.0)) ** 2 <= 1.0

    def to_dict(self):
        return {"center_x_px": self.cx, "center_y_px": self.cy, "M_px": self.M, "N_px": self.N,
                "orientation_deg": self.orientation_deg}


def fit_yarn_ellipse(mask, mode="moments"):
    """Ellipse enclosing a yarn cross-section silhouette.

    ``mode="moments"``: centre and axis directions from the second-order
    moments, ``M``/``N`` the extents of the pixel set along the major and
    minor axes (pixel-inclusive, so a 100-pixel run measures 100).
    ``mode="bbox"``: axis-aligned bounding box of the foreground.
    """
    m = as_binary(mask)
    ys, xs = np.nonzero(m)
    if xs.size == 0:
        raise AnalysisError("empty mask: nothing to fit")
    if mode == "bbox":
        x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
        if x0 == x1 or y0 == y1:
            raise AnalysisError("degenerate mask: foreground is a line or a point")
        return Ellipse((x0 + x1) / 2.0, (y0 + y1) / 2.0, float(x1 - x0 + 1), float(y1 - y0 + 1), 0.0)
    if mode != "moments":
        raise ParameterError("mode must be 'moments' or 'bbox'")
    pts = np.column_stack([xs, ys]).astype(np.float64)
    c = pts.mean(axis=0)
    cov = np.cov((pts - c).T, bias=True) if xs.size > 1 else np.zeros((2, 2))
    evals, evecs = np.linalg.eigh(cov)
    if xs.size < 3 or evals[0] <= 1e-9 * max(evals[1], 1.0):
        raise AnalysisError("degenerate mask: foreground is collinear")
    major = evecs[:, 1]
    minor = evecs[:, 0]
    u = (pts - c) @ major
    v = (pts - c) @ minor
    M = float(u.max() - u.min()) + 1.0
    N = float(v.max() - v.min()) + 1.0
    ang = math.degrees(math.atan2(major[1], major[0]))
    if ang <= -90.0:
        ang += 180.0
    elif ang > 90.0:
        ang -= 180.0
    cx = float(c[0] + (u.max() + u.min()) / 2.0 * major[0] + (v.max() + v.min()) / 2.0 * minor[0])
    cy = float(c[1] + (u.max() + u.min()) / 2.0 * major[1] + (v.max() + v.min()) / 2.0 * minor[1])
    return Ellipse(cx, cy, M, N, ang)


@dataclass
class CrossSectionMeasurement:
    ellipse: Ellipse
    fiber_area_px: int
    yarn_area_px: float
    packing_density_pct: float

    def to_dict(self):
        d = {"M_px": self.ellipse.M, "N_px": self.ellipse.N,
             "fiber_area_px": self.fiber_area_px, "yarn_area_px": self.yarn_area_px,
             "density_pct": self.packing_density_pct}
        d["ellipse"] = self.ellipse.to_dict()
        return d


def packing_density(fibers, ellipse):
    """100 * fiber pixels inside the ellipse / (pi*M*N/4); fibers outside are ignored."""
    f = as_binary(fibers)
    area = ellipse.area
    if not area > 0:
        raise AnalysisError("zero yarn area")
    inside = int((f & ellipse.contains(f.shape)).sum())
    pct = min(100.0, 100.0 * inside / area)
    return CrossSectionMeasurement(ellipse, inside, area, pct)


def pretreat(img, invert=False, min_area=3, fill_lumens=True, threshold=None):
    """Otsu binarization, speck removal and (optionally) lumen filling."""
    if np.asarray(img).dtype == bool:
        mask = as_binary(img)
    else:
        mask = binarize(as_gray(img), threshold, invert)
    if min_area > 1:
        mask = remove_small_objects(mask, min_area)
    if fill_lumens:
        mask = fill_holes(mask)
    return mask


def analyze_cross_section(fibers, yarn=None, mode="moments"):
    """Fit the ellipse on ``yarn`` (default: the fiber mask itself) and measure."""
    f = as_binary(fibers)
    outline = f if yarn is None else as_binary(yarn)
    if mode == "moments" and yarn is None:
        outline = fill_holes(outline)
    return packing_density(f, fit_yarn_ellipse(outline, mode))


def compare_systems(groups):
    """ANOVA plus pairwise mean differences over named groups of densities.

    ``groups`` maps a system name to its samples (insertion order kept).
    """
    names = list(groups)
    arrs = [np.asarray(groups[k], dtype=np.float64) for k in names]
    table = one_way_anova(arrs)
    pairs = pairwise_from_means([a.mean() for a in arrs], [a.size for a in arrs],
                                table.ms_error, table.df_error)
    return {
        "anova": table.to_dict(),
        "means": {k: float(a.mean()) for k, a in zip(names, arrs)},
        "pairwise": [dict(p.to_dict(), i=names[p.i], j=names[p.j]) for p in pairs],
    }
