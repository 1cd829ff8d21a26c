"""Histograms, projections and their CSV dumps."""
import numpy as np

from ._types import as_gray


def histogram(img):
    """256-bin intensity histogram (sums to the pixel count)."""
    return np.bincount(as_gray(img).ravel(), minlength=256).astype(np.int64)


def row_projection(img):
    """Sum of each row."""
    return np.asarray(img).astype(np.int64).sum(axis=1)


def column_projection(img):
    """Sum of each column."""
    return np.asarray(img).astype(np.int64).sum(axis=0)


def format_number(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if f.is_integer() and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def series_to_csv(values, header=None, index=None):
    """``index,value`` lines with LF endings and dot decimals."""
    lines = []
    if header:
        lines.append(",".join(header))
    idx = range(len(values)) if index is None else index
    for i, v in zip(idx, values):
        lines.append(f"{format_number(i)},{format_number(v)}")
    return "\n".join(lines) + "\n" if lines else ""


def write_series_csv(path, values, header=None, index=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(series_to_csv(values, header, index))
