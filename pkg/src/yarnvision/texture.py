"""Filament orientation of textured yarn.

Pipeline: Otsu binarization, thinning, spur pruning (the "corrective"
step), crossing removal, fiber tracing over a 4- or 8-neighbourhood, and
length-weighted orientation statistics.  Angles are measured against the
yarn axis (image rows) and folded into [0, 90] degrees.

The orientation index is ``F = 1 - 1.5 * <sin^2(phi)>``, averaged over
local segment angles, which equals ``(3 <cos^2 phi> - 1) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, ParameterError
from .raster import as_binary, as_gray, binarize, remove_small_objects, skeletonize

# P2..P9, clockwise from north
_OFFS8 = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]
_OFFS4 = [(-1, 0), (0, 1), (1, 0), (0, -1)]
_ORDER8 = _OFFS4 + [(-1, 1), (1, 1), (1, -1), (-1, -1)]  # 4-neighbours first


def _stack(mask):
    p = np.pad(mask.astype(np.uint8), 1)
    h, w = mask.shape
    return np.stack([p[1 + dr:1 + dr + h, 1 + dc:1 + dc + w] for dr, dc in _OFFS8])


def neighbour_count(mask):
    return _stack(as_binary(mask)).sum(axis=0)


def crossing_number(mask):
    """Number of 0->1 transitions around each pixel's 8-neighbour cycle."""
    s = _stack(as_binary(mask))
    return ((s == 0) & (np.roll(s, -1, axis=0) == 1)).sum(axis=0)


def connectivity_number(mask):
    """Yokoi 8-connectivity number of every pixel.

    It counts how many separate 8-connected foreground pieces touch the
    pixel: 1 on a curve's interior or end, 3+ at branch points.
    """
    s = _stack(as_binary(mask)).astype(np.int32)
    n, ne, e, se, so, sw, w, nw = s
    # counter-clockwise ring starting east: x1..x8
    x = [e, ne, n, nw, w, sw, so, se]
    xb = [1 - v for v in x]
    total = np.zeros_like(e)
    for k in (0, 2, 4, 6):
        total += xb[k] - xb[k] * xb[(k + 1) % 8] * xb[(k + 2) % 8]
    return total


def thin_staircases(skel):
    """Delete redundant corner pixels so diagonal runs become 8-minimal.

    A pixel is dropped when two perpendicular 4-neighbours are set, the
    diagonal between them is not, and removal cannot split anything
    (connectivity number 1).  Pixels are visited in raster order and
    re-checked against the already-updated image.
    """
    out = as_binary(skel).copy()
    h, w = out.shape
    s = _stack(out)
    n, ne, e, se, so, sw, wv, nw = s.astype(bool)
    corner = out & ((n & e & ~ne) | (e & so & ~se) | (so & wv & ~sw) | (wv & n & ~nw))
    for r, c in zip(*np.nonzero(corner)):
        r0, r1, c0, c1 = max(r - 1, 0), min(r + 2, h), max(c - 1, 0), min(c + 2, w)
        win = np.zeros((3, 3), dtype=bool)
        win[r0 - r + 1:r1 - r + 1, c0 - c + 1:c1 - c + 1] = out[r0:r1, c0:c1]
        N, NE, E, SE, S, SW, W, NW = (win[0, 1], win[0, 2], win[1, 2], win[2, 2],
                                      win[2, 1], win[2, 0], win[1, 0], win[0, 0])
        if not ((N and E and not NE) or (E and S and not SE) or (S and W and not SW)
                or (W and N and not NW)):
            continue
        xb = [not v for v in (E, NE, N, NW, W, SW, S, SE)]
        yokoi = sum(xb[k] - (xb[k] and xb[(k + 1) % 8] and xb[(k + 2) % 8]) for k in (0, 2, 4, 6))
        if yokoi == 1:
            out[r, c] = False
    return out


def junction_mask(skel):
    skel = as_binary(skel)
    return skel & ((connectivity_number(skel) >= 3) | (neighbour_count(skel) >= 4))


def endpoint_mask(skel):
    skel = as_binary(skel)
    return skel & (crossing_number(skel) == 1) & (neighbour_count(skel) <= 2)


def _walk(pixels, start, visited, offsets, stop=None):
    """Follow a thin curve from ``start``; neighbours in ``offsets`` order win."""
    path = [start]
    visited.add(start)
    cur = start
    while True:
        if stop is not None and cur != start and cur in stop:
            break
        nxt = None
        for dr, dc in offsets:
            q = (cur[0] + dr, cur[1] + dc)
            if q in pixels and q not in visited:
                nxt = q
                break
        if nxt is None:
            break
        path.append(nxt)
        visited.add(nxt)
        cur = nxt
    return path


def corrective_procedure(skel, spur_len):
    """Prune branches shorter than ``spur_len`` pixels that hang off a junction.

    Each pass removes at most one spur (the shortest) per junction, then the
    topology is re-evaluated; passes repeat until nothing changes.  Isolated
    short curves that touch no junction are left alone.
    """
    if spur_len < 1:
        raise ParameterError("spur_len must be >= 1")
    out = as_binary(skel).copy()
    while True:
        pixels = set(zip(*np.nonzero(out)))
        pixels = {(int(r), int(c)) for r, c in pixels}
        junctions = {(int(r), int(c)) for r, c in zip(*np.nonzero(junction_mask(out)))}
        ends = [(int(r), int(c)) for r, c in zip(*np.nonzero(endpoint_mask(out)))]
        if not junctions or not ends:
            return out
        best = {}
        for e in ends:
            path = _walk(pixels, e, set(), _ORDER8, stop=junctions)
            tail = path[-1]
            if tail not in junctions or tail == e:
                continue
            spur = path[:-1]
            if len(spur) < spur_len and (tail not in best or len(spur) < len(best[tail])):
                best[tail] = spur
        if not best:
            return out
        removed = set()
        for spur in sorted(best.values(), key=lambda s: (len(s), s[0])):
            if removed.intersection(spur):
                continue
            for r, c in spur:
                out[r, c] = False
            removed.update(spur)
        # a junction left behind as a one-pixel bump is now a simple pixel
        tails = [t for t in best if t not in removed]
        if tails:
            yk = connectivity_number(out)
            nb = neighbour_count(out)
            for r, c in tails:
                if out[r, c] and yk[r, c] == 1 and nb[r, c] >= 2:
                    out[r, c] = False


def _bridge_diagonals(mask):
    """Make an 8-connected curve 4-connected by filling one corner per diagonal step."""
    m = as_binary(mask).copy()
    h, w = m.shape
    rows, cols = np.nonzero(m)
    for r, c in zip(rows.tolist(), cols.tolist()):
        for dc in (-1, 1):
            r2, c2 = r + 1, c + dc
            if 0 <= r2 < h and 0 <= c2 < w and m[r2, c2]:
                if not m[r, c2] and not m[r2, c]:
                    m[r2, c] = True
    return m


@dataclass
class FiberTrace:
    path: np.ndarray  # (n, 2) array of (row, col)
    segment_angles: np.ndarray = field(default_factory=lambda: np.zeros(0))
    segment_lengths: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def length(self):
        d = np.diff(self.path, axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum()) if len(d) else 0.0

    @property
    def angle(self):
        w = self.segment_lengths
        return float(np.sum(w * self.segment_angles) / w.sum()) if w.sum() > 0 else float("nan")


def chord_segments(path, chord=11):
    """Local angles from consecutive ``chord``-pixel chords along a path.

    Returns ``(angles_deg, lengths)``; angles are folded into [0, 90]
    against the row axis.  A trailing piece shorter than half a chord is
    dropped.
    """
    p = np.asarray(path, dtype=np.float64)
    step = max(1, int(chord) - 1)
    idx = list(range(0, len(p) - 1, step))
    angles, lengths = [], []
    for i in idx:
        j = min(i + step, len(p) - 1)
        if j - i < max(1, step // 2):
            continue
        dr, dc = p[j] - p[i]
        lengths.append(math.hypot(dr, dc))
        angles.append(math.degrees(math.atan2(abs(dr), abs(dc))))
    return np.asarray(angles), np.asarray(lengths)


def trace_fibers(skel, neighborhood=8, min_trace_len=5, chord=11, remove_crossings=True):
    """Walk every fiber of a cleaned skeleton.

    Crossing pixels (junctions) are deleted first so each trace is a simple
    path; paths start from endpoints, closed loops from their first pixel.
    Traces with fewer than ``min_trace_len`` pixels are dropped.
    """
    if neighborhood not in (4, 8):
        raise ParameterError("neighborhood must be 4 or 8")
    m = as_binary(skel).copy()
    if neighborhood == 4:
        m = _bridge_diagonals(m)
        offsets = _OFFS4
        if remove_crossings:
            s = _stack(m)
            deg4 = s[0] + s[2] + s[4] + s[6]
            m &= ~(deg4 >= 3)
    else:
        offsets = _ORDER8
        if remove_crossings:
            m &= ~junction_mask(m)
    pixels = {(int(r), int(c)) for r, c in zip(*np.nonzero(m))}
    if neighborhood == 4:
        s = _stack(m)
        deg = s[0] + s[2] + s[4] + s[6]
        starts = [(int(r), int(c)) for r, c in zip(*np.nonzero(m & (deg <= 1)))]
    else:
        starts = [(int(r), int(c)) for r, c in zip(*np.nonzero(endpoint_mask(m) | (m & (neighbour_count(m) == 0))))]
    visited = set()
    traces = []

    def emit(path):
        if len(path) >= min_trace_len:
            ang, ln = chord_segments(path, chord)
            traces.append(FiberTrace(np.asarray(path, dtype=np.int64), ang, ln))

    for s0 in starts:
        if s0 not in visited:
            emit(_walk(pixels, s0, visited, offsets))
    for s0 in sorted(pixels - visited):
        if s0 not in visited:
            emit(_walk(pixels, s0, visited, offsets))
    return traces


@dataclass
class OrientationResult:
    mean_angle_deg: float
    cv_pct: float
    orientation_index: float
    n_traces: int
    mean_sin2: float

    def to_dict(self):
        return {"mean_angle_deg": self.mean_angle_deg, "cv_pct": self.cv_pct,
                "orientation_index": self.orientation_index, "n_traces": self.n_traces}


def orientation_index(mean_sin2):
    return 1.0 - 1.5 * mean_sin2


def orientation_stats(traces):
    """Length-weighted angle statistics over all local segments of all traces."""
    traces = list(traces)
    if not traces:
        raise AnalysisError("no fiber traces")
    ang = np.concatenate([t.segment_angles for t in traces])
    w = np.concatenate([t.segment_lengths for t in traces])
    if ang.size == 0 or w.sum() <= 0:
        raise AnalysisError("fiber traces carry no measurable segments")
    wsum = w.sum()
    mean = float(np.sum(w * ang) / wsum)
    std = float(math.sqrt(np.sum(w * (ang - mean) ** 2) / wsum))
    sin2 = float(np.sum(w * np.sin(np.radians(ang)) ** 2) / wsum)
    cv = 100.0 * std / mean if mean > 0 else 0.0
    return OrientationResult(mean, cv, orientation_index(sin2), len(traces), sin2)


def fiber_skeleton(img, invert=False, min_area=5, spur_len=5, assume_binary=False):
    """Binarize (Otsu), drop specks, thin and prune an image of filaments."""
    if assume_binary or np.asarray(img).dtype == bool:
        mask = as_binary(img)
    else:
        mask = binarize(as_gray(img), None, invert)
    mask = remove_small_objects(mask, min_area)
    return corrective_procedure(thin_staircases(skeletonize(mask)), spur_len)


def analyze_texture(img, neighborhood=8, min_trace_len=10, chord=11, spur_len=5,
                    invert=False, min_area=5):
    """Full orientation analysis; returns ``(OrientationResult, traces)``."""
    skel = fiber_skeleton(img, invert=invert, min_area=min_area, spur_len=spur_len)
    traces = trace_fibers(skel, neighborhood, min_trace_len, chord)
    return orientation_stats(traces), traces


def angle_accuracy_check(samples, **kwargs):
    """Compare algorithmic mean angles with manual ones.

    ``samples`` is an iterable of ``(image, manual_angle_deg)``; returns one
    dict per sample with both angles and their absolute gap.
    """
    rows = []
    for img, manual in samples:
        res, _ = analyze_texture(img, **kwargs)
        rows.append({"manual_deg": float(manual), "algorithm_deg": res.mean_angle_deg,
                     "abs_diff_deg": abs(res.mean_angle_deg - float(manual))})
    return rows


def traces_to_csv(traces):
    lines = ["trace,n_pixels,length_px,angle_deg"]
    for i, t in enumerate(traces):
        lines.append(f"{i},{len(t.path)},{t.length!r},{t.angle!r}")
    return "\n".join(lines) + "\n"
