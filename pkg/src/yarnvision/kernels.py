"""Hot raster kernels, each in a numba loop form and a vectorised form.

The public names (``window_median``, ``window_median_mad``, ``box_sum``,
``label``, ``zhang_suen``) are bound to one implementation at import time
according to :data:`yarnvision._accel.USE_NUMBA`.  The ``*_numba`` and
``*_numpy`` variants stay importable so tests and the benchmark can run
both side by side.

All kernels take already padded inputs where a window is involved; edge
policy lives in the callers.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from ._accel import USE_NUMBA, njit

# Neighbour order used by the thinning code: P2..P9 clockwise from north.
_DR = np.array([-1, -1, 0, 1, 1, 1, 0, -1])
_DC = np.array([0, 1, 1, 1, 0, -1, -1, -1])


# ---------------------------------------------------------------------------
# windowed median / median absolute deviation
# ---------------------------------------------------------------------------

@njit
def _fill_sorted(padded, r, c, win, buf):
    """Copy the window at (r, c) into ``buf`` in ascending order (insertion sort)."""
    k = 0
    for i in range(win):
        for j in range(win):
            v = padded[r + i, c + j]
            p = k
            while p > 0 and buf[p - 1] > v:
                buf[p] = buf[p - 1]
                p -= 1
            buf[p] = v
            k += 1


@njit
def _window_median_numba(padded, win):
    h = padded.shape[0] - win + 1
    w = padded.shape[1] - win + 1
    n = win * win
    out = np.empty((h, w), dtype=np.uint8)
    buf = np.empty(n, dtype=np.int16)
    for r in range(h):
        for c in range(w):
            _fill_sorted(padded, r, c, win, buf)
            out[r, c] = buf[n // 2]
    return out


@njit
def _window_median_mad_numba(padded, win):
    h = padded.shape[0] - win + 1
    w = padded.shape[1] - win + 1
    n = win * win
    mid = n // 2
    med = np.empty((h, w), dtype=np.uint8)
    mad = np.empty((h, w), dtype=np.uint8)
    buf = np.empty(n, dtype=np.int16)
    for r in range(h):
        for c in range(w):
            _fill_sorted(padded, r, c, win, buf)
            m = buf[mid]
            # deviations grow walking outwards from the median in either
            # direction: merge the two ascending runs up to rank ``mid``
            lo = mid - 1
            hi = mid + 1
            d = 0
            for _ in range(mid):
                if lo >= 0 and (hi >= n or m - buf[lo] <= buf[hi] - m):
                    d = m - buf[lo]
                    lo -= 1
                else:
                    d = buf[hi] - m
                    hi += 1
            med[r, c] = m
            mad[r, c] = d
    return med, mad


def _windows(padded, win):
    h = padded.shape[0] - win + 1
    w = padded.shape[1] - win + 1
    return sliding_window_view(padded, (win, win)).reshape(h, w, win * win)


def _window_median_numpy(padded, win):
    n = win * win
    vals = _windows(padded, win)
    return np.partition(vals, n // 2, axis=-1)[..., n // 2].astype(np.uint8)


def _window_median_mad_numpy(padded, win):
    n = win * win
    vals = _windows(padded, win).astype(np.int16)
    med = np.partition(vals, n // 2, axis=-1)[..., n // 2]
    dev = np.abs(vals - med[..., None])
    mad = np.partition(dev, n // 2, axis=-1)[..., n // 2]
    return med.astype(np.uint8), mad.astype(np.uint8)


# ---------------------------------------------------------------------------
# box sums
# ---------------------------------------------------------------------------

@njit
def _box_sum_numba(padded, win):
    h = padded.shape[0] - win + 1
    w = padded.shape[1] - win + 1
    # vertical running sums first, then horizontal
    col = np.zeros((h, padded.shape[1]), dtype=np.float64)
    for c in range(padded.shape[1]):
        s = 0.0
        for i in range(win):
            s += padded[i, c]
        col[0, c] = s
        for r in range(1, h):
            s += padded[r + win - 1, c] - padded[r - 1, c]
            col[r, c] = s
    out = np.empty((h, w), dtype=np.float64)
    for r in range(h):
        s = 0.0
        for j in range(win):
            s += col[r, j]
        out[r, 0] = s
        for c in range(1, w):
            s += col[r, c + win - 1] - col[r, c - 1]
            out[r, c] = s
    return out


def _box_sum_numpy(padded, win):
    a = np.asarray(padded, dtype=np.float64)
    ii = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=np.float64)
    ii[1:, 1:] = a.cumsum(axis=0).cumsum(axis=1)
    return ii[win:, win:] - ii[:-win, win:] - ii[win:, :-win] + ii[:-win, :-win]


# ---------------------------------------------------------------------------
# connected-component labelling
# ---------------------------------------------------------------------------

@njit
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


@njit
def _label_numba(mask, connectivity):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent = np.zeros(h * w + 1, dtype=np.int32)
    nxt = 1
    for r in range(h):
        for c in range(w):
            if not mask[r, c]:
                continue
            cur = 0
            # already-visited neighbours: W, N, and for 8-conn NW, NE
            if c > 0 and labels[r, c - 1] > 0:
                cur = labels[r, c - 1]
            if r > 0 and labels[r - 1, c] > 0:
                if cur == 0:
                    cur = labels[r - 1, c]
                else:
                    _union(parent, cur, labels[r - 1, c])
            if connectivity == 8 and r > 0:
                if c > 0 and labels[r - 1, c - 1] > 0:
                    if cur == 0:
                        cur = labels[r - 1, c - 1]
                    else:
                        _union(parent, cur, labels[r - 1, c - 1])
                if c + 1 < w and labels[r - 1, c + 1] > 0:
                    if cur == 0:
                        cur = labels[r - 1, c + 1]
                    else:
                        _union(parent, cur, labels[r - 1, c + 1])
            if cur == 0:
                cur = nxt
                parent[nxt] = nxt
                nxt += 1
            labels[r, c] = cur
    # roots are the smallest provisional label of each set, which is the
    # label of its first pixel in raster order; number them in that order
    final = np.zeros(nxt, dtype=np.int32)
    count = 0
    for lab in range(1, nxt):
        root = _find(parent, lab)
        if root == lab:
            count += 1
            final[lab] = count
    for r in range(h):
        for c in range(w):
            if labels[r, c] > 0:
                labels[r, c] = final[_find(parent, labels[r, c])]
    return labels, count


def _label_numpy(mask, connectivity):
    structure = ndimage.generate_binary_structure(2, 2 if connectivity == 8 else 1)
    labels, count = ndimage.label(mask, structure=structure)
    if count == 0:
        return labels.astype(np.int32), 0
    flat = labels.ravel()
    values, first = np.unique(flat, return_index=True)
    keep = values > 0
    order = np.argsort(first[keep], kind="stable")
    remap = np.zeros(values.max() + 1, dtype=np.int32)
    remap[values[keep][order]] = np.arange(1, count + 1, dtype=np.int32)
    return remap[labels], int(count)


# ---------------------------------------------------------------------------
# Zhang-Suen thinning
# ---------------------------------------------------------------------------

@njit
def _nbrs(img, r, c, out):
    h, w = img.shape
    for k in range(8):
        rr = r + _DR[k]
        cc = c + _DC[k]
        if 0 <= rr < h and 0 <= cc < w:
            out[k] = img[rr, cc]
        else:
            out[k] = 0


@njit
def _transitions(p):
    a = 0
    for k in range(8):
        if p[k] == 0 and p[(k + 1) % 8] == 1:
            a += 1
    return a


@njit
def _zhang_suen_numba(mask):
    img = mask.astype(np.uint8).copy()
    h, w = img.shape
    p = np.zeros(8, dtype=np.uint8)
    cand_r = np.empty(h * w, dtype=np.int64)
    cand_c = np.empty(h * w, dtype=np.int64)
    changed = True
    while changed:
        changed = False
        for step in range(2):
            n = 0
            for r in range(h):
                for c in range(w):
                    if img[r, c] == 0:
                        continue
                    _nbrs(img, r, c, p)
                    b = 0
                    for k in range(8):
                        b += p[k]
                    if b < 2 or b > 6:
                        continue
                    if _transitions(p) != 1:
                        continue
                    # p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
                    if step == 0:
                        if p[0] * p[2] * p[4] != 0 or p[2] * p[4] * p[6] != 0:
                            continue
                    else:
                        if p[0] * p[2] * p[6] != 0 or p[0] * p[4] * p[6] != 0:
                            continue
                    cand_r[n] = r
                    cand_c[n] = c
                    n += 1
            # sequential commit; a candidate whose neighbourhood changed so
            # that removal would cut the object is kept
            for i in range(n):
                r = cand_r[i]
                c = cand_c[i]
                _nbrs(img, r, c, p)
                b = 0
                for k in range(8):
                    b += p[k]
                if b >= 2 and b <= 6 and _transitions(p) == 1:
                    img[r, c] = 0
                    changed = True
    return img


def _neighbour_stack(img):
    pad = np.pad(img, 1)
    h, w = img.shape
    return np.stack([pad[1 + dr:1 + dr + h, 1 + dc:1 + dc + w] for dr, dc in zip(_DR, _DC)])


def _zhang_suen_numpy(mask):
    img = np.asarray(mask).astype(np.uint8).copy()
    h, w = img.shape
    changed = True
    while changed:
        changed = False
        for step in range(2):
            p = _neighbour_stack(img)
            b = p.sum(axis=0)
            a = ((p == 0) & (np.roll(p, -1, axis=0) == 1)).sum(axis=0)
            if step == 0:
                cond = (p[0] * p[2] * p[4] == 0) & (p[2] * p[4] * p[6] == 0)
            else:
                cond = (p[0] * p[2] * p[6] == 0) & (p[0] * p[4] * p[6] == 0)
            cand = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & cond
            rows, cols = np.nonzero(cand)
            for r, c in zip(rows.tolist(), cols.tolist()):
                q = [
                    img[r + dr, c + dc] if 0 <= r + dr < h and 0 <= c + dc < w else 0
                    for dr, dc in zip(_DR.tolist(), _DC.tolist())
                ]
                bb = sum(q)
                aa = sum(1 for k in range(8) if q[k] == 0 and q[(k + 1) % 8] == 1)
                if 2 <= bb <= 6 and aa == 1:
                    img[r, c] = 0
                    changed = True
    return img


if USE_NUMBA:
    window_median = _window_median_numba
    window_median_mad = _window_median_mad_numba
    box_sum = _box_sum_numba
    label = _label_numba
    zhang_suen = _zhang_suen_numba
else:
    window_median = _window_median_numpy
    window_median_mad = _window_median_mad_numpy
    box_sum = _box_sum_numpy
    label = _label_numpy
    zhang_suen = _zhang_suen_numpy

VARIANTS = {
    "window_median": (_window_median_numba, _window_median_numpy),
    "window_median_mad": (_window_median_mad_numba, _window_median_mad_numpy),
    "box_sum": (_box_sum_numba, _box_sum_numpy),
    "label": (_label_numba, _label_numpy),
    "zhang_suen": (_zhang_suen_numba, _zhang_suen_numpy),
}
