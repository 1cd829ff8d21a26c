"""Tunable defaults shared by the CLI, with JSON overrides.

A config file is a JSON object of sections mirroring :data:`DEFAULTS`;
unknown sections or keys are rejected so typos never pass silently.  The
default config path may be set with the ``YARNVISION_CONFIG`` environment
variable.
"""
from __future__ import annotations

import copy
import json
import os
from pathlib import Path

from .errors import ParameterError

ENV_VAR = "YARNVISION_CONFIG"

DEFAULTS = {
    "segmentation": {
        "median_window": 1,
        "invert": False,
        "min_area": 5,
    },
    "diameter": {
        "mode": "profile",  # profile (edge) | perc (histogram) | infl
        "percentile": 50.0,
        "smooth": 1,
    },
    "twist": {
        "method": "fft",  # fft | lines | both
        "core_fraction": 0.5,
        "fft_pad": 4,
        "fft_guard_bins": 2,
        "fft_min_snr": 100.0,
        "blur_radius": 2,
        "min_len_px": 8.0,
        "merge_angle_deg": 5.0,
        "merge_dist_px": 3.0,
        "bin_deg": 10.0,
    },
    "hairiness": {
        "bin_width_mm": 0.25,
        "split_mm": 0.75,
        "count_threshold_mm": 2.0,
        "core_fraction": 0.5,
    },
    "slub": {
        "amplitude_threshold_pct": 140.0,
        "min_len_mm": 20.0,
        "smooth_window": 5,
        "period_tol": 0.10,
    },
    "splice": {
        "r_open": 2.0,
        "r_over": 0.5,
        "start_tol": 0.25,
        "orientation": "left",
        "median_window": 3,
        "min_area": 20,
    },
    "packing": {
        "mode": "moments",  # moments | bbox
        "min_area": 3,
        "fill_lumens": True,
    },
    "texture": {
        "neighborhood": 8,
        "min_trace_len": 10,
        "chord_px": 11,
        "spur_len": 5,
        "min_area": 5,
    },
    "grade": {
        "levels": 2,
        "wavelet": "haar",
        "saliency_window": 103,
        "defect_threshold": 0.4,
        "reference": None,
    },
}


def defaults():
    return copy.deepcopy(DEFAULTS)


def _check_value(section, key, value, default):
    if default is None:
        return value
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, (int, float)):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok and isinstance(default, int) and not isinstance(default, bool):
            ok = float(value).is_integer()
            value = int(value) if ok else value
    else:
        ok = isinstance(value, type(default))
    if not ok:
        raise ParameterError(f"config {section}.{key}: expected {type(default).__name__}, "
                             f"got {value!r}")
    return value


def merge(base, overrides):
    """Return ``base`` updated with ``overrides``; unknown keys raise."""
    out = copy.deepcopy(base)
    if not isinstance(overrides, dict):
        raise ParameterError("config must be a JSON object of sections")
    for section, values in overrides.items():
        if section not in DEFAULTS:
            raise ParameterError(f"unknown config section {section!r}")
        if not isinstance(values, dict):
            raise ParameterError(f"config section {section!r} must be an object")
        for key, value in values.items():
            if key not in DEFAULTS[section]:
                raise ParameterError(f"unknown config key {section}.{key}")
            out[section][key] = _check_value(section, key, value, DEFAULTS[section][key])
    return out


def load_config(path=None):
    """Defaults merged with ``path`` (or ``$YARNVISION_CONFIG`` when unset)."""
    path = path or os.environ.get(ENV_VAR) or None
    cfg = defaults()
    if path is None:
        return cfg
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {path} is not valid JSON: {exc}") from exc
    return merge(cfg, data)


def dump_config(cfg):
    return json.dumps(cfg, indent=2, sort_keys=True) + "\n"
