"""Twist formulas and two image estimators of the surface helix angle.

Angles are measured from the yarn axis (image rows): 0 deg means surface
fibers parallel to the axis.  Z twist shows as stripes rising to the right
(``/``), S twist as stripes falling to the right (``\\``).

The angle/turns bridge is the ideal helix ``tan(theta) = pi * d * T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, ParameterError
from .raster import as_gray, box_mean, otsu_from_histogram, row_projection, skeletonize, sobel_float
from .texture import corrective_procedure, thin_staircases, trace_fibers

DIRECTIONS = ("S", "Z")


@dataclass(frozen=True)
class RingFrameParams:
    n_bobbin: float  # rev/min
    v_f: float  # front-roll delivery, m/min
    d_bobbin: float  # m

    def __post_init__(self):
        for name in ("n_bobbin", "v_f", "d_bobbin"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ParameterError(f"{name} must be positive, got {v}")


@dataclass
class TwistResult:
    angle_deg: float
    tpm: float | None
    direction: str
    method: str
    n_segments: int | None = None

    def __post_init__(self):
        if not 0 <= self.angle_deg < 90:
            raise AnalysisError(f"twist angle {self.angle_deg} outside [0, 90)")

    def to_dict(self):
        return {"angle_deg": self.angle_deg, "tpm": self.tpm, "direction": self.direction,
                "method": self.method, "n_segments": self.n_segments}


# ---------------------------------------------------------------------------
# formulas
# ---------------------------------------------------------------------------

def neckar_twist(alpha_m, nm):
    """Turns per meter from the metric twist factor: ``T = alpha_m * Nm**0.6``."""
    if not (alpha_m > 0 and nm > 0):
        raise ParameterError("alpha_m and nm must be positive")
    return alpha_m * nm ** 0.6


def ring_twist(p, direction="Z"):
    """Ring-frame twist ``n/v_f -/+ 1/(pi*D)`` (minus for S, plus for Z)."""
    if direction not in DIRECTIONS:
        raise ParameterError("direction must be 'S' or 'Z'")
    base = p.n_bobbin / p.v_f
    corr = 1.0 / (math.pi * p.d_bobbin)
    return base - corr if direction == "S" else base + corr


def angle_to_tpm(angle_deg, diameter_mm):
    if not 0 <= angle_deg < 90:
        raise ParameterError("angle must lie in [0, 90) degrees")
    if not diameter_mm > 0:
        raise ParameterError("diameter must be positive")
    return math.tan(math.radians(angle_deg)) / (math.pi * diameter_mm * 1e-3)


def tpm_to_angle(tpm, diameter_mm):
    if tpm < 0 or not diameter_mm > 0:
        raise ParameterError("need tpm >= 0 and a positive diameter")
    return math.degrees(math.atan(math.pi * diameter_mm * 1e-3 * tpm))


def accuracy_pct(ref_tpm, est_tpm):
    """``100 * (1 - |ref - est| / ref)``."""
    if not ref_tpm > 0:
        raise ParameterError("reference twist must be positive")
    return 100.0 * (1.0 - abs(ref_tpm - est_tpm) / ref_tpm)


# ---------------------------------------------------------------------------
# core band
# ---------------------------------------------------------------------------

def extract_core(img, fraction=0.5, invert=False):
    """Crop the yarn core from a horizontal yarn image.

    The row projection is baseline-subtracted (minimum row removed); every
    row whose excess reaches ``fraction`` of the peak excess belongs to the
    core, and the band spans the first to the last such row.  Returns
    ``(crop, (top, bottom))`` with inclusive row indices.
    """
    if not 0 < fraction < 1:
        raise ParameterError("fraction must lie in (0, 1)")
    g = as_gray(img)
    if invert:
        g = 255 - g
    proj = row_projection(g).astype(np.float64)
    excess = proj - proj.min()
    peak = excess.max()
    if peak <= 0:
        raise AnalysisError("no core found: row projection is flat")
    rows = np.nonzero(excess >= fraction * peak)[0]
    top, bottom = int(rows[0]), int(rows[-1])
    return np.asarray(img)[top:bottom + 1].copy(), (top, bottom)


# ---------------------------------------------------------------------------
# spectral estimator
# ---------------------------------------------------------------------------

@dataclass
class SpectralPeak:
    angle_deg: float
    direction: str
    fx: float  # cycles per pixel along columns
    fy: float  # cycles per pixel along rows
    snr: float

    @property
    def period_px(self):
        return 1.0 / math.hypot(self.fx, self.fy)


def _parabolic(y0, y1, y2):
    den = y0 - 2.0 * y1 + y2
    return 0.0 if den == 0 else 0.5 * (y0 - y2) / den


def spectral_peak(core, pad=4, guard=2, min_snr=100.0):
    """Dominant off-DC peak of the windowed 2-D power spectrum."""
    g = np.asarray(core, dtype=np.float64)
    if g.ndim != 2 or min(g.shape) < 4:
        raise ParameterError("core must be a 2-D image of at least 4x4")
    h, w = g.shape
    f = (g - g.mean()) * np.outer(np.hanning(h), np.hanning(w))
    H = 1 << int(math.ceil(math.log2(h * pad)))
    W = 1 << int(math.ceil(math.log2(w * pad)))
    P = np.abs(np.fft.fftshift(np.fft.fft2(f, s=(H, W)))) ** 2
    cy, cx = H // 2, W // 2
    gy = int(math.ceil(guard * H / h))
    gx = int(math.ceil(guard * W / w))
    Pm = P.copy()
    Pm[cy - gy:cy + gy + 1, cx - gx:cx + gx + 1] = 0.0
    Pm[:cy] = 0.0  # conjugate symmetry: keep fy >= 0
    Pm[cy, :cx] = 0.0
    iy, ix = np.unravel_index(int(np.argmax(Pm)), Pm.shape)
    peak = Pm[iy, ix]
    floor = float(np.median(P[P > 0])) if np.any(P > 0) else 0.0
    snr = peak / floor if floor > 0 else (math.inf if peak > 0 else 0.0)
    if peak <= 0 or snr < min_snr:
        raise AnalysisError(f"no periodic structure (peak/median power {snr:.3g} < {min_snr})")
    L = np.log(P + 1e-300)
    dy = _parabolic(L[iy - 1, ix], L[iy, ix], L[iy + 1, ix]) if 0 < iy < H - 1 else 0.0
    dx = _parabolic(L[iy, ix - 1], L[iy, ix], L[iy, ix + 1]) if 0 < ix < W - 1 else 0.0
    fy = (iy + dy - cy) / H
    fx = (ix + dx - cx) / W
    angle = math.degrees(math.atan2(abs(fx), abs(fy)))
    if angle >= 90.0:
        angle = math.nextafter(90.0, 0.0)
    direction = "Z" if fx * fy >= 0 else "S"
    return SpectralPeak(angle, direction, fx, fy, snr)


def dominant_angle_fft(core, pad=4, guard=2, min_snr=100.0):
    """Stripe inclination in [0, 90) from the strongest spectral peak."""
    return spectral_peak(core, pad, guard, min_snr).angle_deg


# ---------------------------------------------------------------------------
# skeleton-line estimator
# ---------------------------------------------------------------------------

@dataclass
class LineSegment:
    points: np.ndarray  # (n, 2) row, col
    angle_deg: float  # signed: > 0 rises to the right (Z), < 0 falls (S)
    length: float
    centroid: np.ndarray
    direction_vec: np.ndarray  # unit (dx, dy) in image coordinates


def _fit_segment(points):
    pts = np.asarray(points, dtype=np.float64)
    c = pts.mean(axis=0)
    xy = np.column_stack([pts[:, 1] - c[1], pts[:, 0] - c[0]])
    _, _, vt = np.linalg.svd(xy, full_matrices=False)
    d = vt[0]
    if d[0] < 0 or (d[0] == 0 and d[1] > 0):
        d = -d
    t = xy @ d
    length = float(t.max() - t.min()) + 1.0
    ang = math.degrees(math.atan2(-d[1], d[0]))  # rows grow downwards
    if ang <= -90.0:
        ang += 180.0
    elif ang > 90.0:
        ang -= 180.0
    return LineSegment(pts, ang, length, c, d)


def _split_polyline(path, tol):
    """Douglas-Peucker breakpoints: split a pixel path into near-straight runs."""
    pts = np.asarray(path, dtype=np.float64)
    out = []
    stack = [(0, len(pts) - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            out.append((i, j))
            continue
        a, b = pts[i], pts[j]
        ab = b - a
        nrm = math.hypot(*ab)
        seg = pts[i + 1:j]
        if nrm == 0:
            dist = np.hypot(*(seg - a).T)
        else:
            dist = np.abs(ab[0] * (seg[:, 1] - a[1]) - ab[1] * (seg[:, 0] - a[0])) / nrm
        k = int(np.argmax(dist))
        if dist[k] > tol:
            stack.append((i + 1 + k, j))
            stack.append((i, i + 1 + k))
        else:
            out.append((i, j))
    out.sort()
    return [pts[i:j + 1] for i, j in out]


def _angle_gap(a, b):
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def _mergeable(s, t, max_angle, max_dist):
    if _angle_gap(s.angle_deg, t.angle_deg) >= max_angle:
        return False
    d = s.direction_vec
    n = np.array([-d[1], d[0]])
    rel = np.column_stack([t.points[:, 1] - s.centroid[1], t.points[:, 0] - s.centroid[0]])
    if np.abs(rel @ n).mean() >= max_dist:
        return False
    # the two must also overlap or nearly touch along the line
    ts = np.column_stack([s.points[:, 1] - s.centroid[1], s.points[:, 0] - s.centroid[0]]) @ d
    tt = rel @ d
    gap = max(tt.min() - ts.max(), ts.min() - tt.max())
    return gap < max_dist


def merge_segments(segments, max_angle=5.0, max_dist=3.0):
    """Merge near-parallel, near-collinear segments; each group is refitted.

    Mergeable pairs are linked transitively (union-find), so the result
    does not depend on the order of the input.
    """
    segs = list(segments)
    n = len(segs)
    if n < 2:
        return segs
    ang = np.array([s.angle_deg for s in segs])
    cen = np.array([s.centroid for s in segs])
    half = np.array([s.length for s in segs]) / 2.0
    gap = np.abs(ang[:, None] - ang[None, :]) % 180.0
    gap = np.minimum(gap, 180.0 - gap)
    dist = np.hypot(cen[:, 0, None] - cen[None, :, 0], cen[:, 1, None] - cen[None, :, 1])
    cand = (gap < max_angle) & (dist < half[:, None] + half[None, :] + max_dist)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in zip(*np.nonzero(np.triu(cand, 1))):
        if find(i) != find(j) and _mergeable(segs[i], segs[j], max_angle, max_dist):
            parent[find(j)] = find(i)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for root in sorted(groups):
        idx = groups[root]
        out.append(segs[idx[0]] if len(idx) == 1
                   else _fit_segment(np.vstack([segs[i].points for i in idx])))
    return out


def line_segments(core, blur_radius=2, min_len=8.0, merge_angle=5.0, merge_dist=3.0,
                  split_tol=1.5, spur_len=4):
    """Low-pass, Sobel + Otsu, thin, trace, split, fit, merge, and filter."""
    g = np.asarray(core, dtype=np.float64)
    if g.ndim != 2 or min(g.shape) < 3:
        raise ParameterError("core must be a 2-D image of at least 3x3")
    smooth = box_mean(g, blur_radius) if blur_radius > 0 else g
    gx, gy = sobel_float(smooth)
    mag = np.hypot(gx, gy)
    top = mag.max()
    if top <= 0:
        raise AnalysisError("no line segments: image has no gradient")
    scaled = np.rint(mag * (255.0 / top)).astype(np.uint8)
    hist = np.bincount(scaled.ravel(), minlength=256)
    edges = scaled > otsu_from_histogram(hist)
    skel = corrective_procedure(thin_staircases(skeletonize(edges)), spur_len)
    segs = []
    for tr in trace_fibers(skel, 8, min_trace_len=2, chord=2):
        for piece in _split_polyline(tr.path, split_tol):
            if len(piece) >= 2:
                segs.append(_fit_segment(piece))
    segs = merge_segments(segs, merge_angle, merge_dist)
    return [s for s in segs if s.length >= min_len]


def dominant_direction(segments, bin_deg=10.0):
    """Length-weighted mean angle of the modal ``bin_deg`` direction bin.

    Bins cover signed angles (-90, 90]; the mode's weighted mean is then
    refined over every segment within half a bin of it.  Returns
    ``(angle_deg, direction, members)`` where ``angle_deg`` is unsigned.
    """
    if not segments:
        raise AnalysisError("no line segments survived filtering")
    ang = np.array([s.angle_deg for s in segments])
    w = np.array([s.length for s in segments])
    nb = int(round(180.0 / bin_deg))
    idx = np.clip(np.floor((ang + 90.0) / bin_deg).astype(int), 0, nb - 1)
    weight = np.bincount(idx, weights=w, minlength=nb)
    mode = int(np.argmax(weight))
    sel = idx == mode
    m0 = float(np.sum(w[sel] * ang[sel]) / w[sel].sum())
    near = np.array([_angle_gap(a, m0) <= bin_deg / 2.0 for a in ang])
    # express members on m0's side of the +-90 wrap before averaging
    adj = np.where(ang - m0 > 90.0, ang - 180.0, np.where(ang - m0 < -90.0, ang + 180.0, ang))
    mean = float(np.sum(w[near] * adj[near]) / w[near].sum())
    direction = "Z" if mean >= 0 else "S"
    a = abs(mean)
    if a >= 90.0:
        a = math.nextafter(90.0, 0.0)
    return a, direction, [s for s, k in zip(segments, near) if k]


def dominant_angle_lines(core, blur_radius=2, min_len=8.0, merge_angle=5.0, merge_dist=3.0,
                         bin_deg=10.0):
    """Length-weighted twist angle of the dominant line direction."""
    segs = line_segments(core, blur_radius, min_len, merge_angle, merge_dist)
    return dominant_direction(segs, bin_deg)[0]


# ---------------------------------------------------------------------------
# end-to-end
# ---------------------------------------------------------------------------

def estimate_twist(img, method="fft", diameter_mm=None, fraction=0.5, invert=False,
                   crop=True, **kw):
    """Crop the core (optional) and estimate the twist angle (and tpm)."""
    core = extract_core(img, fraction, invert)[0] if crop else np.asarray(img)
    if method == "fft":
        pk = spectral_peak(core, **kw)
        angle, direction, nseg = pk.angle_deg, pk.direction, None
    elif method == "lines":
        segs = line_segments(core, **kw)
        angle, direction, members = dominant_direction(segs)
        nseg = len(segs)
    else:
        raise ParameterError(f"unknown twist method {method!r}")
    tpm = angle_to_tpm(angle, diameter_mm) if diameter_mm else None
    return TwistResult(angle, tpm, direction, method, nseg)
