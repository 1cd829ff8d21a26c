"""Bundled reference tables (published measurements kept as plain CSV)."""
from __future__ import annotations

import csv
import io
from importlib import resources

import numpy as np


def _text(name):
    return resources.files("yarnvision").joinpath("data", name).read_text("utf-8")


def available():
    return sorted(p.name for p in resources.files("yarnvision").joinpath("data").iterdir()
                  if p.name.endswith((".csv", ".json")))


def load_table(name):
    """Rows of a bundled CSV as dicts; numeric cells become floats, empty ones None."""
    if not name.endswith(".csv"):
        name += ".csv"
    rows = []
    for row in csv.DictReader(io.StringIO(_text(name))):
        out = {}
        for k, v in row.items():
            if v is None or v == "":
                out[k] = None
                continue
            try:
                out[k] = float(v)
            except ValueError:
                out[k] = v
        rows.append(out)
    return rows


def load_matrix(name):
    """A header-less numeric CSV as a 2-D integer array."""
    if not name.endswith(".csv"):
        name += ".csv"
    return np.loadtxt(io.StringIO(_text(name)), delimiter=",", dtype=np.int64)
