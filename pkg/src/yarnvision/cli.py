"""Command-line front end: one subcommand per pipeline.

Every analysis prints (or writes with ``--out``) a versioned JSON report;
numeric keys carry their unit as a suffix.  Exit status is 0 on success,
2 for bad input (flags, files, config, parameters) and 3 when the image is
valid but the measurement fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from . import crosssection, grade, hairiness, metrology, slub, splice, stats, synthgen, texture, twist
from .errors import AnalysisError, ParameterError, PGMError
from .raster import (
    as_gray,
    binarize,
    keep_largest_component,
    load_pgm_with_meta,
    median_filter,
    remove_small_objects,
    series_to_csv,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_ANALYSIS = 0, 2, 3
DIAMETER_ALIASES = {"edge": "profile", "histogram": "perc"}


class InputError(Exception):
    """Bad command-line input detected after argument parsing."""


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to tags."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isinf(f):
            return stats.INFINITE if f > 0 else "-" + stats.INFINITE
        if math.isnan(f):
            return None
        return f
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_image(path):
    try:
        img, meta = load_pgm_with_meta(path)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read image {path}: no such file") from exc
    except OSError as exc:
        raise InputError(f"cannot read image {path}: {exc}") from exc
    return img, meta


def _calibration(args_cal, meta, required):
    if args_cal is not None:
        return metrology.Calibration(float(args_cal)), "flag"
    if "px_per_mm" in meta:
        try:
            return metrology.Calibration(float(meta["px_per_mm"])), "pgm-comment"
        except ValueError as exc:
            raise InputError(f"bad px_per_mm comment {meta['px_per_mm']!r}") from exc
    if required:
        raise InputError("calibration required: pass --cal PX_PER_MM or embed px_per_mm in the PGM")
    return None, None


def _segment(img, seg):
    g = as_gray(img)
    if seg["median_window"] > 1:
        g = median_filter(g, seg["median_window"])
    mask = binarize(g, None, seg["invert"])
    if seg["min_area"] > 1:
        mask = remove_small_objects(mask, seg["min_area"])
    return mask


# ---------------------------------------------------------------------------
# analyses (shared by single runs and batch)
# ---------------------------------------------------------------------------

def analyze_diameter(img, cal, cfg, opts):
    c = cfg["diameter"]
    mode = opts.get("mode") or c["mode"]
    mode = DIAMETER_ALIASES.get(mode, mode)
    out = {}
    if mode == "profile":
        mask = keep_largest_component(_segment(img, cfg["segmentation"]))
        prof = metrology.width_profile(mask)
        d = metrology.mean_diameter(prof, cal)
        out.update(mean_mm=d.mean_mm, min_mm=d.min_mm, max_mm=d.max_mm, cv_pct=100 * d.cv,
                   mean_px=d.mean_px, n_columns=d.n_columns)
        out["_csv"] = series_to_csv(prof.tolist(), header=["column", "width_px"])
    elif mode in ("perc", "infl"):
        pol = "dark" if cfg["segmentation"]["invert"] else "bright"
        px = metrology.histogram_level_diameter(img, mode, c["percentile"], pol, c["smooth"])
        out.update(mean_px=px, mean_mm=metrology.px_to_mm(cal, px))
    else:
        raise ParameterError(f"unknown diameter mode {mode!r}")
    out["mode"] = mode
    count = opts.get("count")
    if count is not None:
        yc = metrology.YarnCount(*count)
        lo, hi = metrology.trommer_band(yc)
        out.update(count_tex=metrology.count_convert(yc, "tex").value,
                   theory_band_low_mm=lo, theory_band_high_mm=hi,
                   within_theory_band=bool(lo <= out["mean_mm"] <= hi))
    return out


def analyze_twist(img, cal, cfg, opts):
    c = cfg["twist"]
    method = opts.get("method") or c["method"]
    diameter = opts.get("diameter_mm")
    core, band = twist.extract_core(img, c["core_fraction"], cfg["segmentation"]["invert"])
    res = {"core_top_row": band[0], "core_bottom_row": band[1]}
    runs = {}
    if method in ("fft", "both"):
        pk = twist.spectral_peak(core, c["fft_pad"], c["fft_guard_bins"], c["fft_min_snr"])
        runs["fft"] = {"angle_deg": pk.angle_deg, "direction": pk.direction,
                       "stripe_period_px": pk.period_px, "n_segments": None}
    if method in ("lines", "both"):
        segs = twist.line_segments(core, c["blur_radius"], c["min_len_px"],
                                   c["merge_angle_deg"], c["merge_dist_px"])
        ang, direction, members = twist.dominant_direction(segs, c["bin_deg"])
        runs["lines"] = {"angle_deg": ang, "direction": direction, "n_segments": len(segs),
                         "n_dominant_segments": len(members)}
    if not runs:
        raise ParameterError(f"unknown twist method {method!r}")
    for r in runs.values():
        r["tpm"] = twist.angle_to_tpm(r["angle_deg"], diameter) if diameter else None
    if method == "both":
        res.update(method="both", fft=runs["fft"], lines=runs["lines"],
                   agreement_deg=abs(runs["fft"]["angle_deg"] - runs["lines"]["angle_deg"]))
        res.update(angle_deg=runs["fft"]["angle_deg"], tpm=runs["fft"]["tpm"],
                   direction=runs["fft"]["direction"], n_segments=runs["lines"]["n_segments"])
    else:
        res.update(method=method, **runs[method])
    if diameter:
        res["diameter_mm"] = diameter
    return res


def analyze_hairiness(img, cal, cfg, opts):
    c = cfg["hairiness"]
    seg = cfg["segmentation"]
    _, band = twist.extract_core(img, c["core_fraction"], seg["invert"])
    mask = binarize(as_gray(img), None, seg["invert"])
    h = hairiness.compute_hddp(mask, cal, band, c["bin_width_mm"])
    short, long_ = hairiness.fit_hddp_loglinear(h, c["split_mm"], strict=False)
    key = f"hairs_ge_{c['count_threshold_mm']:g}mm_per_mm".replace(".", "p")
    return {
        "core_top_row": band[0], "core_bottom_row": band[1],
        "scan_length_mm": h.scan_length_mm, "n_hairs": len(h.hair_lengths_mm),
        "bin_width_mm": h.bin_width_mm,
        "hddp": [{"length_mm": L, "density_per_mm": d} for L, d in h.rows()],
        key: hairiness.hairiness_count_ge(h, c["count_threshold_mm"]),
        "fit_short": None if short is None else short.to_dict(),
        "fit_long": None if long_ is None else long_.to_dict(),
        "_csv": h.to_csv(),
    }


def _slub_lane(mask, cal, c):
    prof = metrology.width_profile(mask)
    rep = slub.detect_slubs(prof, cal, c["amplitude_threshold_pct"], c["min_len_mm"],
                            c["smooth_window"])
    d = rep.to_dict()
    d["period"] = (slub.slub_period(rep, c["period_tol"]) if len(rep.segments) >= 3
                   else slub.APERIODIC)
    return d, prof


def analyze_slub(img, cal, cfg, opts):
    c = cfg["slub"]
    mask = _segment(img, cfg["segmentation"])
    if opts.get("lanes"):
        lanes = slub.split_lanes(mask)
        out = {"lanes": []}
        for top, bottom in lanes:
            d, _ = _slub_lane(mask[top:bottom + 1], cal, c)
            d.update(top_row=top, bottom_row=bottom)
            out["lanes"].append(d)
        return out
    d, prof = _slub_lane(mask, cal, c)
    hist = slub.width_histogram(prof)
    d["_csv"] = "width_px,count\n" + "".join(f"{w},{n}\n" for w, n in hist)
    return d


def analyze_splice(img, cal, cfg, opts):
    c = cfg["splice"]
    seg = cfg["segmentation"]
    mask = splice.preprocess_opening(img, c["median_window"], c["min_area"], seg["invert"])
    m = splice.measure_opening(mask, cal, opts.get("orientation") or c["orientation"],
                               c["start_tol"])
    r_open, r_over = opts.get("ratios") or (c["r_open"], c["r_over"])
    g = splice.classify_opening(m, splice.SpliceThresholds(r_open, r_over))
    out = m.to_dict()
    out.update(grade=g, start_column=m.start_column)
    return out


def analyze_packing(img, cal, cfg, opts):
    c = cfg["packing"]
    seg = cfg["segmentation"]
    fibers = crosssection.pretreat(img, seg["invert"], c["min_area"], c["fill_lumens"])
    yarn = None
    if opts.get("yarn_image") is not None:
        yimg, _ = _load_image(opts["yarn_image"])
        yarn = binarize(yimg, None, seg["invert"])
    elif opts.get("yarn_level") is not None:
        yarn = as_gray(img) >= int(opts["yarn_level"])
    meas = crosssection.analyze_cross_section(fibers, yarn, c["mode"])
    out = meas.to_dict()
    out["mode"] = c["mode"]
    if cal is not None:
        out["M_mm"] = meas.ellipse.M / cal.pixels_per_mm
        out["N_mm"] = meas.ellipse.N / cal.pixels_per_mm
    return out


def analyze_texture(img, cal, cfg, opts):
    c = cfg["texture"]
    res, traces = texture.analyze_texture(
        img, neighborhood=c["neighborhood"], min_trace_len=c["min_trace_len"],
        chord=c["chord_px"], spur_len=c["spur_len"], invert=cfg["segmentation"]["invert"],
        min_area=c["min_area"])
    return {"mean_angle_deg": res.mean_angle_deg, "cv_pct": res.cv_pct,
            "orientation_index": res.orientation_index, "n_traces": res.n_traces,
            "_csv": texture.traces_to_csv(traces)}


def analyze_grade(img, cal, cfg, opts):
    c = cfg["grade"]
    feats = grade.extract_grade_features(img, cal, c["levels"], c["wavelet"],
                                         c["saliency_window"], c["defect_threshold"],
                                         cfg["segmentation"]["invert"])
    out = feats.to_dict()
    ref_path = opts.get("reference") or c["reference"]
    if cal is not None:
        ref = grade.ReferenceSet.load(ref_path) if ref_path else grade.default_reference()
        label, dists = grade.classify_grade(feats, ref)
        out.update(grade=label, distances=dists)
    lines = ["column,width_px,saliency"]
    lines += [f"{i},{int(w)},{s!r}" for i, (w, s) in enumerate(zip(feats.width_map, feats.saliency))]
    out["_csv"] = "\n".join(lines) + "\n"
    return out


ANALYSES = {
    "diameter": (analyze_diameter, True),
    "twist": (analyze_twist, False),
    "hairiness": (analyze_hairiness, True),
    "slub": (analyze_slub, True),
    "splice": (analyze_splice, True),
    "packing": (analyze_packing, False),
    "texture": (analyze_texture, False),
    "grade": (analyze_grade, False),
}


def run_analysis(command, image, cal_value, cfg, opts):
    """Load ``image``, resolve calibration and run one pipeline.

    Returns ``(report, csv_text)``.
    """
    fn, needs_cal = ANALYSES[command]
    img, meta = _load_image(image)
    cal, source = _calibration(cal_value, meta, needs_cal)
    result = fn(img, cal, cfg, opts)
    csv_text = result.pop("_csv", None)
    report = {
        "schema_version": SCHEMA_VERSION, "tool": "yarnvision", "version": __version__,
        "subcommand": command, "input": str(image),
        "calibration": {"px_per_mm": None if cal is None else cal.pixels_per_mm,
                        "source": source},
        "result": result, "warnings": [],
    }
    return report, csv_text


# ---------------------------------------------------------------------------
# non-image commands
# ---------------------------------------------------------------------------

def cmd_calibrate(args, cfg):
    cal = metrology.calibrate(args.pixels, args.length_mm)
    res = {"px_per_mm": cal.pixels_per_mm}
    if args.width_px is not None:
        res["width_px"] = args.width_px
        res["width_mm"] = metrology.px_to_mm(cal, args.width_px)
    return _envelope("calibrate", None, cal, "flag", res)


def _envelope(command, image, cal, source, result):
    return {"schema_version": SCHEMA_VERSION, "tool": "yarnvision", "version": __version__,
            "subcommand": command, "input": image,
            "calibration": {"px_per_mm": None if cal is None else cal.pixels_per_mm,
                            "source": source},
            "result": result, "warnings": []}


def _read_groups(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    groups = {}
    reader = csv.reader(io.StringIO(text))
    for i, row in enumerate(reader):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise InputError(f"line {i + 1}: expected 'group,value'")
        try:
            v = float(row[1])
        except ValueError:
            if i == 0:
                continue  # header
            raise InputError(f"line {i + 1}: {row[1]!r} is not a number") from None
        groups.setdefault(row[0], []).append(v)
    return groups


def cmd_stats(args, cfg):
    if args.csv:
        res = crosssection.compare_systems(_read_groups(args.csv))
    elif args.means:
        means = [float(v) for v in args.means.split(",")]
        ns = [int(v) for v in args.ns.split(",")] if args.ns else None
        if ns is None or args.mse is None:
            raise InputError("--means needs --ns and --mse")
        if len(ns) == 1:
            ns = ns * len(means)
        if len(ns) != len(means):
            raise InputError("--ns must have one entry or one per mean")
        df = args.df if args.df is not None else sum(ns) - len(ns)
        pairs = stats.pairwise_from_means(means, ns, args.mse, df)
        res = {"pairwise": [p.to_dict() for p in pairs], "df_error": df, "ms_error": args.mse}
    else:
        raise InputError("stats needs --csv or --means")
    return _envelope("stats", args.csv, None, None, res)


def cmd_synth(args, cfg):
    img, truth, ppm = synthgen.render_preset(args.preset)
    synthgen.write_render(img, truth, args.out or "-", ppm)
    return None


def cmd_splice_confusion(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if rows and rows[0][:2] == ["predicted", "truth"]:
        rows = rows[1:]
    rep = splice.classification_report([r[0] for r in rows], [r[1] for r in rows])
    return rep


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------

def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            continue
        else:
            out[key] = v
    return out


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return stats.INFINITE
        return repr(v)
    return str(v)


def run_batch(manifest, cfg, workers=1):
    """Process a manifest; returns CSV text with one row per item, in order."""
    command = manifest.get("subcommand")
    if command not in ANALYSES:
        raise InputError(f"manifest subcommand must be one of {sorted(ANALYSES)}")
    items = manifest.get("items", [])
    if not isinstance(items, list):
        raise InputError("manifest 'items' must be a list")

    def one(item):
        try:
            if isinstance(item, str):
                item = {"image": item}
            item_cfg = cfgmod.merge(cfg, item.get("overrides", {}))
            opts = dict(item.get("options", {}))
            report, _ = run_analysis(command, item["image"], item.get("cal"), item_cfg, opts)
            row = {"status": "ok", "error": ""}
            row.update(_flatten(report["result"]))
            if "truth" in item:
                row["truth"] = item["truth"]
            return row
        except (InputError, AnalysisError, ParameterError, PGMError, OSError, KeyError) as exc:
            return {"status": "error", "error": f"{type(exc).__name__}: {exc}",
                    **({"truth": item["truth"]} if isinstance(item, dict) and "truth" in item else {})}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, items))
    else:
        rows = [one(it) for it in items]
    keys = sorted({k for r in rows for k in r} - {"status", "error"})
    header = ["index", "image", "status", "error"] + keys
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i, (item, row) in enumerate(zip(items, rows)):
        image = item if isinstance(item, str) else item.get("image", "")
        w.writerow([i, image, row["status"], row["error"]] + [_cell(row.get(k)) for k in keys])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _pair(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers") from None
    return a, b


def _count(text):
    try:
        value, system = text.split(":") if ":" in text else (text, "tex")
        return float(value), system
    except ValueError:
        raise argparse.ArgumentTypeError("expected VALUE[:tex|Nm|Ne1]") from None


def build_parser():
    p = argparse.ArgumentParser(prog="yarnvision", description="Yarn image measurement toolkit.")
    p.add_argument("--version", action="version", version=f"yarnvision {__version__}")
    p.add_argument("--config", help="JSON config file (default: $YARNVISION_CONFIG)")
    p.add_argument("--dump-config", action="store_true",
                   help="print the effective configuration and exit")
    sub = p.add_subparsers(dest="command")

    def image_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--image", required=True, help="PGM input ('-' for stdin)")
        sp.add_argument("--cal", type=float, help="pixels per mm (default: PGM px_per_mm comment)")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--csv", help="write the pipeline's CSV dump here")
        sp.add_argument("--invert", action="store_true", help="dark yarn on a light background")
        return sp

    sp = sub.add_parser("calibrate", help="pixels per mm from a reference object")
    sp.add_argument("--pixels", type=float, required=True)
    sp.add_argument("--length-mm", type=float, required=True)
    sp.add_argument("--width-px", type=float, help="also convert this width to mm")
    sp.add_argument("--out")

    sp = image_cmd("diameter", "yarn diameter from a horizontal yarn image")
    sp.add_argument("--mode", choices=["profile", "perc", "infl", "edge", "histogram"],
                    help="profile (alias edge): per-column extent; perc (alias histogram) "
                         "or infl: transverse intensity profile")
    sp.add_argument("--count", type=_count, help="yarn count VALUE[:tex|Nm|Ne1] for the theory band")

    sp = image_cmd("twist", "surface twist angle (and tpm)")
    sp.add_argument("--method", choices=["fft", "lines", "both"])
    sp.add_argument("--diameter-mm", type=float)

    image_cmd("hairiness", "hair density distribution profile")

    sp = image_cmd("slub", "slub length, amplitude, distance and period")
    sp.add_argument("--lanes", action="store_true", help="split multi-strand images into lanes")

    sp = sub.add_parser("splice", help="splice-opening geometry and grade")
    sp.add_argument("--image", help="PGM input ('-' for stdin)")
    sp.add_argument("--cal", type=float)
    sp.add_argument("--out")
    sp.add_argument("--csv")
    sp.add_argument("--invert", action="store_true")
    sp.add_argument("--orientation", choices=["left", "right"])
    sp.add_argument("--ratios", type=_pair, help="r_open,r_over")
    sp.add_argument("--confusion", help="CSV of predicted,truth grades: emit the error summary")

    sp = image_cmd("packing", "cross-section packing density")
    sp.add_argument("--yarn-image", help="separate PGM holding the yarn outline")
    sp.add_argument("--yarn-level", type=int, help="pixels >= LEVEL form the yarn outline")
    sp.add_argument("--mode", choices=["moments", "bbox"])

    sp = image_cmd("texture", "filament orientation of textured yarn")
    sp.add_argument("--neighborhood", type=int, choices=[4, 8])

    sp = image_cmd("grade", "appearance-grade features and class")
    sp.add_argument("--reference", help="JSON reference set")

    sp = sub.add_parser("stats", help="ANOVA and pairwise mean differences")
    sp.add_argument("--csv", help="long-format CSV: group,value")
    sp.add_argument("--means", help="comma-separated group means")
    sp.add_argument("--ns", help="group sizes (one value or one per mean)")
    sp.add_argument("--mse", type=float)
    sp.add_argument("--df", type=int)
    sp.add_argument("--out")

    sp = sub.add_parser("synth", help="render a synthetic test image")
    sp.add_argument("--preset", required=True, choices=sorted(synthgen.PRESETS))
    sp.add_argument("--out", help="PGM path ('-' or omitted: stdout)")

    sp = sub.add_parser("batch", help="run one pipeline over a JSON manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="CSV path (default stdout)")
    return p


def _apply_flags(cfg, args):
    if getattr(args, "invert", False):
        cfg["segmentation"]["invert"] = True
    if args.command == "packing" and args.mode:
        cfg["packing"]["mode"] = args.mode
    if args.command == "texture" and args.neighborhood:
        cfg["texture"]["neighborhood"] = args.neighborhood
    return cfg


def _options(args):
    c = args.command
    if c == "diameter":
        return {"mode": args.mode, "count": args.count}
    if c == "twist":
        return {"method": args.method, "diameter_mm": args.diameter_mm}
    if c == "slub":
        return {"lanes": args.lanes}
    if c == "splice":
        return {"orientation": args.orientation, "ratios": args.ratios}
    if c == "packing":
        return {"yarn_image": args.yarn_image, "yarn_level": args.yarn_level}
    if c == "grade":
        return {"reference": args.reference}
    return {}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    try:
        cfg = cfgmod.load_config(args.config)
        if args.dump_config:
            _write_text(None, cfgmod.dump_config(cfg))
            return EXIT_OK
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_INPUT
        cfg = _apply_flags(cfg, args)
        if args.command == "calibrate":
            _write_text(args.out, dumps(cmd_calibrate(args, cfg)))
        elif args.command == "stats":
            _write_text(args.out, dumps(cmd_stats(args, cfg)))
        elif args.command == "synth":
            cmd_synth(args, cfg)
        elif args.command == "batch":
            try:
                manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"unreadable manifest {args.manifest}: {exc}") from exc
            if args.workers < 1:
                raise InputError("--workers must be >= 1")
            _write_text(args.out, run_batch(manifest, cfg, args.workers))
        elif args.command == "splice" and args.confusion:
            rep = cmd_splice_confusion(args.confusion)
            _write_text(args.out, dumps(_envelope("splice", args.confusion, None, None, rep)))
            if args.csv:
                _write_text(args.csv, splice.report_to_csv(rep))
        else:
            if not getattr(args, "image", None):
                raise InputError(f"{args.command} needs --image")
            report, csv_text = run_analysis(args.command, args.image, args.cal, cfg, _options(args))
            _write_text(args.out, dumps(report))
            if args.csv and csv_text is not None:
                _write_text(args.csv, csv_text)
        return EXIT_OK
    except AnalysisError as exc:
        print(f"yarnvision: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except (InputError, ParameterError, PGMError, OSError) as exc:
        print(f"yarnvision: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
