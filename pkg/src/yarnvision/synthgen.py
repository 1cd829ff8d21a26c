"""Deterministic synthetic yarn renders with ground truth.

Every renderer returns the image together with a plain ``dict`` of the
planted parameters, so downstream tests can derive expected values without
re-measuring the picture.  Edges are hard (no anti-aliasing); chain
:func:`yarnvision.raster.low_pass` for softer images.

Geometry conventions: the yarn runs along the image rows (horizontal), row
indices grow downwards, and stripe/fiber angles are measured from the yarn
axis, so 0 deg means stripes parallel to the axis.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .raster import save_pgm

SIDES = ("top", "bottom")


@dataclass
class Hair:
    column: int
    length: int
    side: str = "top"


@dataclass
class Slub:
    start: int
    length: int
    width: int


@dataclass
class YarnRenderSpec:
    """Planted parameters of a horizontal yarn render (all sizes in pixels)."""

    width: int = 256
    height: int = 64
    core_width: int = 11
    core_axis: int | None = None
    twist_angle: float = 30.0
    stripe_period: float = 12.0
    stripe_amplitude: int = 60
    twist_direction: str = "Z"
    hairs: list = field(default_factory=list)
    slubs: list = field(default_factory=list)
    fg: int = 220
    bg: int = 30
    noise: int = 0
    seed: int = 0
    px_per_mm: float | None = None

    def __post_init__(self):
        self.hairs = [h if isinstance(h, Hair) else Hair(**h) if isinstance(h, dict) else Hair(*h)
                      for h in self.hairs]
        self.slubs = [s if isinstance(s, Slub) else Slub(**s) if isinstance(s, dict) else Slub(*s)
                      for s in self.slubs]

    @property
    def axis(self):
        return self.height // 2 if self.core_axis is None else self.core_axis

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class OpeningShapeSpec:
    """Splice-opening contour; widths and length in pixels.

    ``W2`` is only meaningful when ``L`` exceeds the 5 mm zone and ``W3``
    when it exceeds 10 mm; pass ``None`` otherwise.
    """

    Y: int
    L: int
    W1: int
    W2: int | None = None
    W3: int | None = None
    px_per_mm: float = 20.0
    parent_length: int = 80
    margin: int = 10

    def zone_edges(self):
        return int(round(5 * self.px_per_mm)), int(round(10 * self.px_per_mm))

    def to_dict(self):
        return asdict(self)


@dataclass
class CrossSectionSpec:
    """Elliptic yarn cross-section with fiber disks.

    ``M`` and ``N`` are full axis lengths, so the yarn area is pi*M*N/4.
    Fiber tuples are ``(cx, cy, radius)`` in image coordinates; disks
    outside the ellipse are allowed on purpose.
    """

    M: int = 100
    N: int = 60
    fibers: list = field(default_factory=list)
    orientation_deg: float = 0.0
    margin: int = 8

    def __post_init__(self):
        self.fibers = [tuple(f) for f in self.fibers]

    @property
    def size(self):
        side = int(math.ceil(max(self.M, self.N))) + 2 * self.margin
        return side, side

    @property
    def center(self):
        h, w = self.size
        return (w - 1) / 2.0, (h - 1) / 2.0

    def to_dict(self):
        d = asdict(self)
        d["fibers"] = [list(f) for f in self.fibers]
        return d


# ---------------------------------------------------------------------------
# yarn bodies
# ---------------------------------------------------------------------------

def core_rows(spec, width=None):
    """Inclusive (top, bottom) rows of a band of ``width`` centred on the axis."""
    w = spec.core_width if width is None else width
    top = spec.axis - (w - 1) // 2
    return top, top + w - 1


def _check_spec(spec):
    if spec.width < 1 or spec.height < 1:
        raise ParameterError("image size must be positive")
    if spec.core_width < 1:
        raise ParameterError("core_width must be >= 1")
    top, bottom = core_rows(spec)
    if top < 0 or bottom >= spec.height:
        raise ParameterError(f"core rows {top}..{bottom} fall outside a {spec.height}-row image")
    for v in (spec.fg, spec.bg):
        if not 0 <= v <= 255:
            raise ParameterError("fg/bg must be within 0..255")


def _finish(img, spec):
    if spec.noise:
        rng = np.random.default_rng(spec.seed)
        noise = rng.integers(-spec.noise, spec.noise + 1, size=img.shape)
        img = img.astype(np.int32) + noise
    return np.clip(img, 0, 255).astype(np.uint8)


def _truth(kind, spec, **extra):
    t = {"kind": kind, "spec": spec.to_dict()}
    t.update(extra)
    return t


def render_plain_yarn(spec):
    """A horizontal band of ``fg`` exactly ``core_width`` rows tall."""
    _check_spec(spec)
    img = np.full((spec.height, spec.width), spec.bg, dtype=np.int32)
    top, bottom = core_rows(spec)
    img[top:bottom + 1, :] = spec.fg
    return _finish(img, spec), _truth("plain", spec, core_rows=[top, bottom])


def stripe_field(shape, angle_deg, period, direction="Z", phase=0.0):
    """Unit-amplitude sinusoid whose crests run at ``angle_deg`` to the rows."""
    h, w = shape
    t = math.radians(angle_deg)
    sign = 1.0 if direction == "Z" else -1.0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    # crest lines follow (cos t, -sign*sin t); the normal is (sign*sin t, cos t)
    return np.sin(2 * math.pi * (sign * xx * math.sin(t) + yy * math.cos(t)) / period + phase)


def render_twist_stripes(spec):
    """Core band filled with sinusoidal stripes inclined at ``twist_angle``.

    Z stripes rise to the right (``/``), S stripes fall (``\\``).
    """
    _check_spec(spec)
    if not (0.0 <= spec.twist_angle < 90.0) or not math.isfinite(spec.twist_angle):
        raise ParameterError(f"twist_angle must lie in [0, 90), got {spec.twist_angle}")
    if spec.stripe_period < 2:
        raise ParameterError("stripe_period must be >= 2 pixels")
    if spec.twist_direction not in ("S", "Z"):
        raise ParameterError("twist_direction must be 'S' or 'Z'")
    img = np.full((spec.height, spec.width), spec.bg, dtype=np.float64)
    top, bottom = core_rows(spec)
    band = stripe_field((bottom - top + 1, spec.width), spec.twist_angle,
                        spec.stripe_period, spec.twist_direction)
    img[top:bottom + 1, :] = spec.fg - spec.stripe_amplitude + spec.stripe_amplitude * band
    return _finish(np.rint(img), spec), _truth(
        "twist", spec, core_rows=[top, bottom], angle_deg=spec.twist_angle,
        direction=spec.twist_direction)


def render_mixed_stripes(spec, families):
    """Twist render whose columns are split between stripe families.

    ``families`` is a list of ``(angle_deg, column_fraction)``; the family
    regions are laid out left to right.
    """
    _check_spec(spec)
    img = np.full((spec.height, spec.width), spec.bg, dtype=np.float64)
    top, bottom = core_rows(spec)
    h = bottom - top + 1
    edges = np.rint(np.cumsum([0.0] + [f for _, f in families]) * spec.width).astype(int)
    edges[-1] = spec.width
    for (angle, _), c0, c1 in zip(families, edges[:-1], edges[1:]):
        band = stripe_field((h, spec.width), angle, spec.stripe_period, spec.twist_direction)
        img[top:bottom + 1, c0:c1] = (spec.fg - spec.stripe_amplitude
                                      + spec.stripe_amplitude * band[:, c0:c1])
    return _finish(np.rint(img), spec), _truth(
        "mixed_twist", spec, core_rows=[top, bottom],
        families=[[a, f] for a, f in families], column_edges=edges.tolist())


def flip_pixels(img, fraction, seed=0):
    """Replace ``fraction`` of the pixels by uniform random gray values."""
    rng = np.random.default_rng(seed)
    out = np.array(img, dtype=np.uint8, copy=True)
    n = int(round(fraction * out.size))
    idx = rng.choice(out.size, size=n, replace=False)
    out.ravel()[idx] = rng.integers(0, 256, size=n)
    return out


def render_hairy_yarn(spec):
    """Plain yarn plus 1-px vertical hairs protruding from the core edges."""
    img, truth = render_plain_yarn(spec)
    img = img.astype(np.int32)
    top, bottom = core_rows(spec)
    planted = []
    for hair in spec.hairs:
        if hair.length < 1:
            raise ParameterError("hair length must be >= 1")
        if hair.side not in SIDES:
            raise ParameterError(f"hair side must be one of {SIDES}")
        if not 0 <= hair.column < spec.width:
            raise ParameterError(f"hair column {hair.column} outside image")
        if hair.side == "top":
            r0, r1 = top - hair.length, top - 1
        else:
            r0, r1 = bottom + 1, bottom + hair.length
        if r0 < 0 or r1 >= spec.height:
            raise ParameterError(f"hair of length {hair.length} leaves the image")
        img[r0:r1 + 1, hair.column] = spec.fg
        planted.append([hair.column, hair.length, hair.side])
    truth["kind"] = "hairy"
    truth["hairs"] = planted
    return _finish(img, spec), truth


def render_slub_yarn(spec):
    """Plain yarn widened to each slub's width over its column span."""
    _check_spec(spec)
    slubs = sorted(spec.slubs, key=lambda s: s.start)
    for a, b in zip(slubs, slubs[1:]):
        if a.start + a.length > b.start:
            raise ParameterError("slub segments overlap")
    img = np.full((spec.height, spec.width), spec.bg, dtype=np.int32)
    top, bottom = core_rows(spec)
    img[top:bottom + 1, :] = spec.fg
    segs = []
    for s in slubs:
        if s.length < 1 or s.width < 1:
            raise ParameterError("slub length and width must be >= 1")
        if s.start < 0 or s.start + s.length > spec.width:
            raise ParameterError("slub extends past the image")
        t, b = core_rows(spec, s.width)
        if t < 0 or b >= spec.height:
            raise ParameterError("slub wider than the image")
        img[t:b + 1, s.start:s.start + s.length] = spec.fg
        segs.append({"start": s.start, "length": s.length, "width": s.width,
                     "amplitude_pct": 100.0 * s.width / spec.core_width})
    return _finish(img, spec), _truth("slub", spec, core_rows=[top, bottom], slubs=segs)


def slub_layout(pattern, px_per_mm, base_width, lead_mm=10.0, repeats=2):
    """Build slub segments from ``(length_mm, amplitude_pct, gap_mm)`` rows.

    Returns ``(slubs, total_columns)``: the pattern is repeated ``repeats``
    times, each slub followed by its gap; the image ends ``lead_mm`` after
    the final slub (its trailing gap is replaced by the margin).
    """
    slubs = []
    x = int(round(lead_mm * px_per_mm))
    rows = list(pattern) * repeats
    for i, (length_mm, amp_pct, gap_mm) in enumerate(rows):
        n = int(round(length_mm * px_per_mm))
        width = int(round(base_width * amp_pct / 100.0))
        slubs.append(Slub(x, n, width))
        x += n
        if i < len(rows) - 1:
            x += int(round(gap_mm * px_per_mm))
    return slubs, x + int(round(lead_mm * px_per_mm))


# ---------------------------------------------------------------------------
# splice opening
# ---------------------------------------------------------------------------

def render_opening_contour(spec):
    """Binary silhouette: parent yarn of width Y, then the opening zones.

    The opening starts right after ``parent_length`` columns of parent yarn
    and spans ``L`` columns: W1 over the first 5 mm, W2 over 5-10 mm and W3
    beyond 10 mm.  Every column is centred on the same axis.
    """
    z5, z10 = spec.zone_edges()
    vals = [spec.Y, spec.L, spec.W1] + [v for v in (spec.W2, spec.W3) if v is not None]
    if any(v < 0 for v in vals):
        raise ParameterError("opening dimensions must be >= 0")
    if spec.L > z5 and spec.W2 is None:
        raise ParameterError("L exceeds the 5 mm zone, W2 is required")
    if spec.L > z10 and spec.W3 is None:
        raise ParameterError("L exceeds the 10 mm zone, W3 is required")
    if spec.L <= z5 and (spec.W2 is not None or spec.W3 is not None):
        raise ParameterError("W2/W3 given for an opening no longer than 5 mm")
    if spec.L <= z10 and spec.W3 is not None:
        raise ParameterError("W3 given for an opening no longer than 10 mm")
    widths = [spec.Y] * spec.parent_length
    for i in range(spec.L):
        widths.append(spec.W1 if i < z5 else spec.W2 if i < z10 else spec.W3)
    tallest = max(widths)
    height = tallest + 2 * spec.margin
    width = len(widths) + 2 * spec.margin
    axis = height // 2
    mask = np.zeros((height, width), dtype=bool)
    for i, w in enumerate(widths):
        if w <= 0:
            continue
        top = axis - (w - 1) // 2
        mask[top:top + w, spec.margin + i] = True
    ppm = spec.px_per_mm
    truth = {
        "kind": "opening", "spec": spec.to_dict(),
        "start_column": spec.margin + spec.parent_length,
        "Y_mm": spec.Y / ppm, "L_mm": spec.L / ppm, "W1_mm": spec.W1 / ppm,
        "W2_mm": None if spec.W2 is None else spec.W2 / ppm,
        "W3_mm": None if spec.W3 is None else spec.W3 / ppm,
    }
    return mask, truth


# ---------------------------------------------------------------------------
# cross-sections
# ---------------------------------------------------------------------------

def ellipse_mask(shape, center, M, N, orientation_deg=0.0):
    """Pixels whose centres satisfy the ellipse inequality (<= 1)."""
    h, w = shape
    cx, cy = center
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    t = math.radians(orientation_deg)
    dx, dy = xx - cx, yy - cy
    u = dx * math.cos(t) + dy * math.sin(t)
    v = -dx * math.sin(t) + dy * math.cos(t)
    return (u / (M / 2.0)) ** 2 + (v / (N / 2.0)) ** 2 <= 1.0


def disk_mask(shape, cx, cy, r):
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r


def render_cross_section(spec):
    """Return ``(fibers, yarn, truth)`` masks for a cross-section spec."""
    if spec.M < 2 or spec.N < 2:
        raise ParameterError("ellipse axes must be >= 2 pixels")
    shape = spec.size
    yarn = ellipse_mask(shape, spec.center, spec.M, spec.N, spec.orientation_deg)
    fibers = np.zeros(shape, dtype=bool)
    for cx, cy, r in spec.fibers:
        if r <= 0:
            raise ParameterError("fiber radius must be > 0")
        fibers |= disk_mask(shape, cx, cy, r)
    inside = fibers & yarn
    truth = {
        "kind": "cross_section", "spec": spec.to_dict(),
        "center": list(spec.center),
        "yarn_area_px": math.pi * spec.M * spec.N / 4.0,
        "fiber_area_analytic_px": float(sum(math.pi * r * r for _, _, r in spec.fibers)),
        "fiber_pixels_inside": int(inside.sum()),
    }
    return fibers, yarn, truth


def scatter_fibers(spec, radius, count, seed=0, max_tries=20000):
    """Non-overlapping disks placed wholly inside the ellipse of ``spec``."""
    rng = np.random.default_rng(seed)
    cx0, cy0 = spec.center
    a, b = spec.M / 2.0 - radius - 1, spec.N / 2.0 - radius - 1
    if a <= 0 or b <= 0:
        raise ParameterError("fiber radius too large for the ellipse")
    t = math.radians(spec.orientation_deg)
    placed = []
    tries = 0
    while len(placed) < count and tries < max_tries:
        tries += 1
        u, v = rng.uniform(-a, a), rng.uniform(-b, b)
        if (u / a) ** 2 + (v / b) ** 2 > 1:
            continue
        x = cx0 + u * math.cos(t) - v * math.sin(t)
        y = cy0 + u * math.sin(t) + v * math.cos(t)
        if all((x - px) ** 2 + (y - py) ** 2 > (2 * radius + 1) ** 2 for px, py, _ in placed):
            placed.append((x, y, radius))
    return placed


# ---------------------------------------------------------------------------
# filament fields
# ---------------------------------------------------------------------------

def draw_segment(mask, x0, y0, x1, y1):
    """Rasterise a straight segment as an 8-connected digital line."""
    h, w = mask.shape
    n = int(math.ceil(max(abs(x1 - x0), abs(y1 - y0))))
    for i in range(n + 1):
        s = i / n if n else 0.0
        x = int(round(x0 + s * (x1 - x0)))
        y = int(round(y0 + s * (y1 - y0)))
        if 0 <= x < w and 0 <= y < h:
            mask[y, x] = True
    return mask


def render_fiber_field(angle_deg, size=(160, 240), spacing=12, margin=6, length=None):
    """Parallel straight filaments at ``angle_deg`` to the rows.

    Positive angles rise to the right.  Filaments are clipped ``margin``
    pixels inside the frame; ``length`` caps each filament's extent.
    """
    h, w = size
    mask = np.zeros((h, w), dtype=bool)
    t = math.radians(angle_deg)
    d = np.array([math.cos(t), -math.sin(t)])
    nrm = np.array([math.sin(t), math.cos(t)])
    c = np.array([(w - 1) / 2.0, (h - 1) / 2.0])
    half_diag = math.hypot(w, h) / 2.0
    lo_x, hi_x, lo_y, hi_y = margin, w - 1 - margin, margin, h - 1 - margin
    k = -int(half_diag // spacing)
    drawn = 0
    while k * spacing <= half_diag:
        p = c + nrm * (k * spacing)
        k += 1
        # clip the infinite line p + s*d against the inner box
        s_lo, s_hi = -1e9, 1e9
        ok = True
        for comp, lo, hi in ((0, lo_x, hi_x), (1, lo_y, hi_y)):
            if abs(d[comp]) < 1e-12:
                if not lo <= p[comp] <= hi:
                    ok = False
                continue
            a, b = (lo - p[comp]) / d[comp], (hi - p[comp]) / d[comp]
            s_lo, s_hi = max(s_lo, min(a, b)), min(s_hi, max(a, b))
        if not ok or s_hi - s_lo < 4:
            continue
        if length is not None and s_hi - s_lo > length:
            mid = (s_lo + s_hi) / 2.0
            s_lo, s_hi = mid - length / 2.0, mid + length / 2.0
        a, b = p + s_lo * d, p + s_hi * d
        draw_segment(mask, a[0], a[1], b[0], b[1])
        drawn += 1
    return mask, {"kind": "fiber_field", "angle_deg": angle_deg, "spacing": spacing,
                  "n_fibers": drawn, "size": [h, w]}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def to_gray(mask, fg=255, bg=0):
    return np.where(np.asarray(mask, dtype=bool), fg, bg).astype(np.uint8)


def write_render(img, truth, path, px_per_mm=None):
    """Write ``img`` as PGM plus a ``.json`` ground-truth sidecar.

    ``path == "-"`` streams the PGM to stdout and skips the sidecar.
    """
    comments = [f"yarnvision.kind={truth.get('kind', 'unknown')}"]
    if px_per_mm is not None:
        comments.append(f"px_per_mm={px_per_mm!r}")
    if np.asarray(img).dtype == bool:
        img = to_gray(img)
    save_pgm(img, path, comments=comments)
    if str(path) == "-":
        return None
    sidecar = Path(path).with_suffix(".json")
    sidecar.write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return sidecar


# ---------------------------------------------------------------------------
# named presets (used by the CLI ``synth`` subcommand and the test-suite)
# ---------------------------------------------------------------------------

SLUB_PATTERN = [(30.0, 250.0, 40.0), (50.0, 250.0, 60.0)]

# per-grade opening plans at 20 px/mm with a 10 px (0.5 mm) parent yarn
SPLICE_PLANS = {
    "A": dict(L=240, W1=30, W2=20, W3=12),
    "B1": dict(L=160, W1=30, W2=25),
    "B2": dict(L=160, W1=30, W2=15),
    "C1": dict(L=80, W1=30),
    "C2": dict(L=80, W1=15),
    "D": dict(L=160, W1=5, W2=5),
    "E": dict(L=160, W1=30, W2=7),
    "F": dict(L=160, W1=30, W2=3),
}


def _preset_diameter():
    # widths 10,10,10,10,11 repeating: mean 10.2 px = 0.150 mm at 68 px/mm
    spec = YarnRenderSpec(width=340, height=40, core_width=10,
                          slubs=[Slub(c, 1, 11) for c in range(4, 340, 5)], px_per_mm=68.0)
    img, truth = render_slub_yarn(spec)
    truth.update(kind="diameter", mean_width_px=10.2, mean_diameter_mm=10.2 / 68.0)
    return img, truth, 68.0


def _preset_slub():
    ppm, base = 4.0, 20
    slubs, total = slub_layout(SLUB_PATTERN, ppm, base)
    spec = YarnRenderSpec(width=total, height=80, core_width=base, slubs=slubs, px_per_mm=ppm)
    img, truth = render_slub_yarn(spec)
    truth["pattern"] = [list(p) for p in SLUB_PATTERN]
    return img, truth, ppm


def _preset_twist(angle=30.0, direction="Z"):
    spec = YarnRenderSpec(width=256, height=80, core_width=48, twist_angle=angle,
                          twist_direction=direction, px_per_mm=50.0)
    img, truth = render_twist_stripes(spec)
    truth["diameter_mm"] = 48 / 50.0
    return img, truth, 50.0


def _preset_hairy():
    hairs = [Hair(c, 10 if i % 5 else 30, SIDES[i % 2]) for i, c in enumerate(range(3, 200, 4))]
    spec = YarnRenderSpec(width=200, height=96, core_width=16, hairs=hairs, px_per_mm=10.0)
    img, truth = render_hairy_yarn(spec)
    return img, truth, 10.0


def _preset_splice(grade):
    spec = OpeningShapeSpec(Y=10, px_per_mm=20.0, **SPLICE_PLANS[grade])
    mask, truth = render_opening_contour(spec)
    truth["grade"] = grade
    return to_gray(mask), truth, 20.0


def _preset_cross_section():
    spec = CrossSectionSpec(M=100, N=60)
    spec.fibers = scatter_fibers(spec, 3.0, 40, seed=0)
    fibers, yarn, truth = render_cross_section(spec)
    # yarn outline drawn faintly so the ellipse can be fitted from one image
    img = np.where(fibers & yarn, 255, np.where(yarn, 1, 0)).astype(np.uint8)
    truth["note"] = "fiber pixels are 255, yarn background inside the ellipse is 1"
    return img, truth, None


def _preset_fibers(angle=30.0):
    mask, truth = render_fiber_field(angle)
    return to_gray(mask), truth, None


def _preset_grade_nep():
    spec = YarnRenderSpec(width=600, height=80, core_width=12,
                          slubs=[Slub(285, 30, 36)], px_per_mm=20.0)
    img, truth = render_slub_yarn(spec)
    truth["kind"] = "grade_nep"
    return img, truth, 20.0


PRESETS = {
    "diameter-s2": _preset_diameter,
    "slub-pattern": _preset_slub,
    "twist": _preset_twist,
    "hairy": _preset_hairy,
    "cross-section": _preset_cross_section,
    "fibers": _preset_fibers,
    "grade-nep": _preset_grade_nep,
}
PRESETS.update({f"splice-{g}": (lambda g=g: _preset_splice(g)) for g in SPLICE_PLANS})


def render_preset(name):
    """Return ``(image, truth, px_per_mm)`` for a named preset."""
    try:
        fn = PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return fn()
